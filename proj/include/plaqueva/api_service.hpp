#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "plaqueva/cohort.hpp"
#include "plaqueva/ml_pipeline.hpp"

namespace plaqueva {

struct ServiceConfig {
  std::filesystem::path cohort_dir;
  std::string host = "127.0.0.1";
  int port = 8080;
  SvmParams defaults;
  int verbosity = 0;
  std::chrono::milliseconds train_timeout{60'000};
};

/// A trained CvResult with every payload derived from it, serialized once.
struct Analysis {
  CvResult cv;
  std::string train_body;
  std::string top_body;
  std::string parallel_body;
  std::string radar_body;
  std::string boxplot_body;
  std::string confusion_body;
  std::string roc_body;
  std::string pr_body;
};

/// Canonical text form of the parameters, used in cache keys.
std::string canonical_params(const SvmParams& p);

/// Memoizes analyses by (cohort fingerprint, canonical params). Lookups take
/// a shared lock; concurrent requests for the same key wait on one
/// computation.
class AnalysisCache {
 public:
  using Compute = std::function<std::shared_ptr<const Analysis>()>;

  struct Lookup {
    std::shared_ptr<const Analysis> analysis;
    bool hit = false;
  };

  Lookup get_or_compute(const std::string& key, const Compute& compute);
  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_future<std::shared_ptr<const Analysis>>> entries_;
};

struct Response {
  int status = 200;
  std::string body;
  bool cache_hit = false;
};

/// Route handling for one immutable cohort. Thread-safe.
class ApiService {
 public:
  ApiService(Cohort cohort, SvmParams defaults,
             std::chrono::milliseconds train_timeout = std::chrono::milliseconds{60'000});

  Response handle(const std::string& method, const std::string& path,
                  const std::map<std::string, std::string>& query = {},
                  const std::string& body = {});

  const Cohort& cohort() const noexcept { return cohort_; }
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

  /// Trains (or fetches from cache) and makes the result current.
  AnalysisCache::Lookup train(const SvmParams& params);
  /// Full computation bypassing the cache.
  std::shared_ptr<const Analysis> compute_analysis(const SvmParams& params) const;

 private:
  Response route(const std::string& method, const std::string& path,
                 const std::map<std::string, std::string>& query, const std::string& body);
  std::shared_ptr<const Analysis> current() const;

  Cohort cohort_;
  SvmParams defaults_;
  std::chrono::milliseconds train_timeout_;
  std::uint64_t fingerprint_;
  AnalysisCache cache_;
  mutable std::mutex current_mutex_;
  std::shared_ptr<const Analysis> current_;
};

/// cpp-httplib front end for an ApiService.
class HttpServer {
 public:
  explicit HttpServer(ApiService& service, int verbosity = 0);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds an ephemeral port and returns it.
  int bind_any_port(const std::string& host);
  bool bind(const std::string& host, int port);
  /// Blocks until stop().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace plaqueva
