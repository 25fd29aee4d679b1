#include "plaqueva/api_service.hpp"

#include <charconv>
#include <cstdio>
#include <iostream>

#include <httplib.h>

#include "plaqueva/clinical_views.hpp"
#include "plaqueva/cohort_dir.hpp"
#include "plaqueva/eval_metrics.hpp"
#include "plaqueva/feature_views.hpp"
#include "plaqueva/json_io.hpp"
#include "plaqueva/stat_tests.hpp"

namespace plaqueva {

using json::Json;

std::string canonical_params(const SvmParams& p) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "C=%.17g;tol=%.17g;max_passes=%d;seed=%llu;k=%d;top_k=%d", p.C,
                p.tol, p.max_passes, static_cast<unsigned long long>(p.seed), p.k_folds, p.top_k);
  return buf;
}

AnalysisCache::Lookup AnalysisCache::get_or_compute(const std::string& key,
                                                    const Compute& compute) {
  std::shared_future<std::shared_ptr<const Analysis>> future;
  {
    std::shared_lock lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) future = it->second;
  }
  if (future.valid()) return {future.get(), true};

  std::promise<std::shared_ptr<const Analysis>> promise;
  {
    std::unique_lock lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) {
      future = it->second;
    } else {
      future = promise.get_future().share();
      entries_.emplace(key, future);
      lock.unlock();
      try {
        promise.set_value(compute());
      } catch (...) {
        promise.set_exception(std::current_exception());
        std::unique_lock relock(mutex_);
        entries_.erase(key);
      }
      return {future.get(), false};
    }
  }
  return {future.get(), true};
}

std::size_t AnalysisCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

ApiService::ApiService(Cohort cohort, SvmParams defaults, std::chrono::milliseconds train_timeout)
    : cohort_(std::move(cohort)),
      defaults_(defaults),
      train_timeout_(train_timeout),
      fingerprint_(cohort_fingerprint(cohort_)) {
  check_params(defaults_);
}

std::shared_ptr<const Analysis> ApiService::compute_analysis(const SvmParams& params) const {
  auto a = std::make_shared<Analysis>();
  a->cv = cross_validate(cohort_, params, std::chrono::steady_clock::now() + train_timeout_);
  const auto& cv = a->cv;
  auto curves = ovr_curves(cv);
  a->train_body = json::cv_result(cv).dump();
  a->top_body = json::top_features(cv).dump();
  a->parallel_body = json::parallel_coords(parallel_coords_data(cohort_, cv)).dump();
  a->radar_body = json::radar(radar_data(cohort_, cv)).dump();
  a->boxplot_body = json::boxplot(boxplot_data(cohort_, cv)).dump();
  a->confusion_body = json::metrics(confusion_and_scores(cv)).dump();
  a->roc_body = json::roc_curves(curves).dump();
  a->pr_body = json::pr_curves(curves).dump();
  return a;
}

AnalysisCache::Lookup ApiService::train(const SvmParams& params) {
  check_params(params);
  auto key = std::to_string(fingerprint_) + "|" + canonical_params(params);
  auto lookup = cache_.get_or_compute(key, [&] { return compute_analysis(params); });
  std::lock_guard lock(current_mutex_);
  current_ = lookup.analysis;
  return lookup;
}

std::shared_ptr<const Analysis> ApiService::current() const {
  std::lock_guard lock(current_mutex_);
  return current_;
}

namespace {

Response json_response(const Json& j, int status = 200) { return {status, j.dump(), false}; }

Response error_response(int status, const std::string& message) {
  return json_response(Json{{"error", message}, {"status", status}}, status);
}

std::optional<std::string> query_value(const std::map<std::string, std::string>& q,
                                       const std::string& key) {
  auto it = q.find(key);
  if (it == q.end()) return std::nullopt;
  return it->second;
}

template <typename T>
T parse_query_number(const std::string& key, const std::string& text) {
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw ValidationError("query parameter " + key + " is not a valid number: '" + text + "'");
  return v;
}

std::size_t resolve_feature(const Cohort& cohort, const std::string& text) {
  if (!text.empty() && std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    auto idx = parse_query_number<std::size_t>("feature", text);
    if (idx >= cohort.dimension()) throw NotFoundError("unknown feature " + text);
    return idx;
  }
  const auto& names = cohort.feature_names();
  auto it = std::find(names.begin(), names.end(), text);
  if (text.empty()) throw ValidationError("query parameter feature is empty");
  if (it == names.end()) throw NotFoundError("unknown feature " + text);
  return static_cast<std::size_t>(it - names.begin());
}

}  // namespace

Response ApiService::handle(const std::string& method, const std::string& path,
                            const std::map<std::string, std::string>& query,
                            const std::string& body) {
  try {
    return route(method, path, query, body);
  } catch (const NotFoundError& e) {
    return error_response(404, e.what());
  } catch (const ValidationError& e) {
    return error_response(400, e.what());
  } catch (const ParseError& e) {
    return error_response(400, e.what());
  } catch (const TimeoutError& e) {
    return error_response(504, e.what());
  } catch (const Json::exception& e) {
    return error_response(400, std::string{"malformed JSON: "} + e.what());
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

Response ApiService::route(const std::string& method, const std::string& path,
                           const std::map<std::string, std::string>& query,
                           const std::string& body) {
  const bool get = method == "GET";
  auto method_not_allowed = [&] { return error_response(405, "method not allowed"); };

  if (path == "/api/train") {
    if (method != "POST") return method_not_allowed();
    Json request = body.empty() ? Json(nullptr) : Json::parse(body);
    auto lookup = train(json::params_from(request, defaults_));
    Response r{200, lookup.analysis->train_body, lookup.hit};
    return r;
  }
  if (!get) {
    if (path.starts_with("/api/")) return method_not_allowed();
    return error_response(404, "unknown route " + path);
  }

  if (path == "/api/patients") {
    Json arr = Json::array();
    for (const auto& [id, p] : cohort_.patients()) arr.push_back(json::patient_summary(p));
    return json_response(arr);
  }
  if (path.starts_with("/api/patients/")) {
    auto id = path.substr(std::string_view{"/api/patients/"}.size());
    return json_response(json::patient_detail(cohort_, cohort_.patient(id)));
  }

  if (path == "/api/views/age") {
    AgeBuckets b;
    if (auto v = query_value(query, "width")) b.width = parse_query_number<int>("width", *v);
    if (auto v = query_value(query, "lo")) b.lo = parse_query_number<int>("lo", *v);
    if (auto v = query_value(query, "hi")) b.hi = parse_query_number<int>("hi", *v);
    if (auto v = query_value(query, "aggregation")) {
      if (*v == "sum")
        b.aggregation = AgeAggregation::SUM;
      else if (*v == "mean")
        b.aggregation = AgeAggregation::MEAN;
      else
        throw ValidationError("aggregation must be sum or mean");
    }
    return json_response(json::chart(age_stacked_area(cohort_, b)));
  }
  if (path == "/api/views/bmi") {
    BmiBins b;
    if (auto v = query_value(query, "width")) b.width = parse_query_number<double>("width", *v);
    if (auto v = query_value(query, "lo")) b.lo = parse_query_number<double>("lo", *v);
    if (auto v = query_value(query, "hi")) b.hi = parse_query_number<double>("hi", *v);
    return json_response(json::chart(bmi_line(cohort_, b)));
  }
  if (path == "/api/views/gender") {
    Json arr = Json::array();
    for (const auto& pie : gender_pies(cohort_)) arr.push_back(json::chart(pie));
    return json_response(arr);
  }
  if (path == "/api/views/chronic") return json_response(json::chart(chronic_stacks(cohort_)));
  if (path == "/api/views/scatter") {
    auto v = query_value(query, "marker");
    if (!v) throw ValidationError("query parameter marker is required (bnp or tn)");
    auto marker = parse_biomarker(*v);
    if (!marker) throw ValidationError("unknown marker " + *v);
    return json_response(json::chart(biomarker_scatter(cohort_, *marker)));
  }

  if (path == "/api/anova") {
    auto f = query_value(query, "feature");
    if (!f) throw ValidationError("query parameter feature is required");
    auto feature = resolve_feature(cohort_, *f);
    Json out = {{"feature_index", feature}, {"feature_name", cohort_.feature_names()[feature]}};
    if (auto c = query_value(query, "component")) {
      auto component = parse_component_name(*c);
      if (!component) throw ValidationError("unknown component " + *c);
      out["component"] = component_name(*component);
      out["diseases"] = json::disease_anova(feature_vs_chronic(cohort_, feature, *component));
    } else {
      out["grid"] = json::anova_grid(anova_grid(cohort_, feature));
    }
    return json_response(out);
  }

  if (path.starts_with("/api/features/") || path.starts_with("/api/metrics/")) {
    const std::map<std::string, std::string Analysis::*> bodies = {
        {"/api/features/top", &Analysis::top_body},
        {"/api/features/parallel", &Analysis::parallel_body},
        {"/api/features/radar", &Analysis::radar_body},
        {"/api/features/boxplot", &Analysis::boxplot_body},
        {"/api/metrics/confusion", &Analysis::confusion_body},
        {"/api/metrics/roc", &Analysis::roc_body},
        {"/api/metrics/pr", &Analysis::pr_body},
    };
    auto it = bodies.find(path);
    if (it == bodies.end()) return error_response(404, "unknown route " + path);
    auto analysis = current();
    if (!analysis) return error_response(409, "no training run yet; POST /api/train first");
    return {200, (*analysis).*(it->second), false};
  }

  return error_response(404, "unknown route " + path);
}

// ---------------------------------------------------------------------------

struct HttpServer::Impl {
  Impl(ApiService& s, int v) : service(s), verbosity(v) {}
  ApiService& service;
  int verbosity;
  httplib::Server server;
};

HttpServer::HttpServer(ApiService& service, int verbosity)
    : impl_(std::make_unique<Impl>(service, verbosity)) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    auto r = impl_->service.handle(req.method, req.path, query, req.body);
    res.status = r.status;
    res.set_header("X-Cache", r.cache_hit ? "hit" : "miss");
    res.set_content(r.body, "application/json");
    if (impl_->verbosity > 0)
      std::cerr << req.method << ' ' << req.path << " -> " << r.status << '\n';
  };
  impl_->server.Get(R"(/api/.*)", handler);
  impl_->server.Post(R"(/api/.*)", handler);
  impl_->server.Put(R"(/api/.*)", handler);
  impl_->server.Delete(R"(/api/.*)", handler);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind_any_port(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool HttpServer::bind(const std::string& host, int port) {
  return impl_->server.bind_to_port(host, port);
}

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace plaqueva
