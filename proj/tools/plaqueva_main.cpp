// plaqueva command line: serve | train | anova | gen | views

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>

#include "plaqueva/api_service.hpp"
#include "plaqueva/clinical_views.hpp"
#include "plaqueva/cohort_dir.hpp"
#include "plaqueva/ingestion.hpp"
#include "plaqueva/json_io.hpp"
#include "plaqueva/stat_tests.hpp"

namespace {

using plaqueva::json::Json;


plaqueva::Cohort load(const std::string& dir) {
  auto loaded = plaqueva::load_cohort_dir(dir);
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << '\n';
  return std::move(loaded.cohort);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw plaqueva::Error("cannot write " + path);
  out << text << '\n';
}

std::string format_p(double p) {
  if (p < 0.0001) return "<0.0001";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", p);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Carotid plaque cohort analytics"};
  app.require_subcommand(1);

  std::string cohort_dir;
  auto add_cohort = [&](CLI::App* sub) {
    sub->add_option("--cohort", cohort_dir, "Cohort directory")->envname("PLAQUEVA_COHORT")->required();
  };

  plaqueva::SvmParams params;
  auto add_params = [&](CLI::App* sub) {
    sub->add_option("--C", params.C, "SVM regularization")->capture_default_str();
    sub->add_option("--k", params.k_folds, "Cross-validation folds")->capture_default_str();
    sub->add_option("--seed", params.seed, "Random seed")->capture_default_str();
    sub->add_option("--tol", params.tol, "KKT tolerance")->capture_default_str();
    sub->add_option("--max-passes", params.max_passes, "SMO pass limit")->capture_default_str();
    sub->add_option("--top-k", params.top_k, "Number of ranked features")->capture_default_str();
  };

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP JSON API");
  add_cohort(serve);
  add_params(serve);
  std::string host = "127.0.0.1";
  int port = 8080;
  int verbosity = 0;
  double timeout_s = 60.0;
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--timeout", timeout_s, "Training timeout in seconds")->capture_default_str();
  serve->add_flag("-v,--verbose", verbosity, "Log requests");

  // train
  auto* train = app.add_subcommand("train", "Cross-validate the SVM and print the result as JSON");
  add_cohort(train);
  add_params(train);
  std::string out_path;
  train->add_option("--out", out_path, "Output file (default stdout)");

  // anova
  auto* anova = app.add_subcommand("anova", "ANOVA of one feature against chronic diseases");
  add_cohort(anova);
  std::string feature;
  bool as_json = false;
  anova->add_option("--feature", feature, "Feature index or name")->required();
  anova->add_flag("--json", as_json, "Print JSON instead of a table");

  // gen
  auto* gen = app.add_subcommand("gen", "Write a synthetic cohort directory");
  plaqueva::SyntheticSpec spec;
  std::string gen_out;
  gen->add_option("--seed", spec.seed)->capture_default_str();
  gen->add_option("--patients", spec.n_patients)->capture_default_str();
  gen->add_option("--features", spec.d_features)->capture_default_str();
  gen->add_option("--separation", spec.separation)->capture_default_str();
  gen->add_option("--samples", spec.n_samples, "Exact sample count (0 = from patients)")
      ->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory")->required();

  // views
  auto* views = app.add_subcommand("views", "Dump the clinical chart payloads as JSON");
  add_cohort(views);
  std::string views_out;
  views->add_option("--out", views_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*serve) {
      plaqueva::check_params(params);
      plaqueva::ApiService service(load(cohort_dir), params,
                                   std::chrono::milliseconds{static_cast<long long>(timeout_s * 1000)});
      plaqueva::HttpServer server(service, verbosity);
      if (!server.bind(host, port)) throw plaqueva::Error("cannot bind " + host + ":" + std::to_string(port));
      // SIGINT/SIGTERM are taken by a dedicated thread; stop() is not signal safe.
      sigset_t stop_signals;
      sigemptyset(&stop_signals);
      sigaddset(&stop_signals, SIGINT);
      sigaddset(&stop_signals, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);
      std::thread waiter([&] {
        int sig = 0;
        sigwait(&stop_signals, &sig);
        server.stop();
      });
      std::cerr << "serving " << cohort_dir << " on http://" << host << ':' << port << '\n';
      server.listen_after_bind();
      pthread_kill(waiter.native_handle(), SIGTERM);
      waiter.join();
    } else if (*train) {
      plaqueva::check_params(params);
      auto cohort = load(cohort_dir);
      auto cv = plaqueva::cross_validate(cohort, params);
      for (const auto& w : cv.warnings) std::cerr << "warning: " << w << '\n';
      write_output(out_path, plaqueva::json::cv_result(cv).dump());
    } else if (*anova) {
      auto cohort = load(cohort_dir);
      std::size_t index = 0;
      const auto& names = cohort.feature_names();
      if (auto it = std::find(names.begin(), names.end(), feature); it != names.end()) {
        index = static_cast<std::size_t>(it - names.begin());
      } else {
        std::size_t pos = 0;
        try {
          index = std::stoul(feature, &pos);
        } catch (const std::exception&) {
          pos = 0;
        }
        if (pos != feature.size() || index >= names.size())
          throw plaqueva::NotFoundError("unknown feature " + feature);
      }
      auto grid = plaqueva::anova_grid(cohort, index);
      if (as_json) {
        std::cout << plaqueva::json::anova_grid(grid).dump(2) << '\n';
      } else {
        std::printf("feature %zu (%s)\n", index, names[index].c_str());
        std::printf("%-10s %-4s %12s %9s %8s %6s\n", "component", "dis", "F", "p", "eta2", "df");
        for (auto c : plaqueva::kAllComponents) {
          for (const auto& cell : grid[plaqueva::index_of(c)]) {
            auto comp = std::string{plaqueva::component_name(c)};
            auto dis = std::string{plaqueva::disease_name(cell.disease)};
            if (!cell.result) {
              std::printf("%-10s %-4s %12s  (%s)\n", comp.c_str(), dis.c_str(), "-",
                          cell.null_reason.c_str());
              continue;
            }
            const auto& r = *cell.result;
            std::printf("%-10s %-4s %12.3f %9s %8.4f %2d,%-3d\n", comp.c_str(), dis.c_str(),
                        r.f_value, format_p(r.p_value).c_str(), r.eta_squared, r.df_between,
                        r.df_within);
          }
        }
      }
    } else if (*gen) {
      auto cohort = plaqueva::generate_synthetic_cohort(spec);
      plaqueva::write_cohort_dir(cohort, gen_out, spec.seed);
      std::cerr << "wrote " << cohort.patients().size() << " patients, "
                << cohort.samples().size() << " samples, " << cohort.dimension()
                << " features to " << gen_out << '\n';
    } else if (*views) {
      auto cohort = load(cohort_dir);
      Json out = Json::object();
      out["age"] = plaqueva::json::chart(plaqueva::age_stacked_area(cohort));
      out["bmi"] = plaqueva::json::chart(plaqueva::bmi_line(cohort));
      Json pies = Json::array();
      for (const auto& pie : plaqueva::gender_pies(cohort)) pies.push_back(plaqueva::json::chart(pie));
      out["gender"] = pies;
      out["scatter_bnp"] =
          plaqueva::json::chart(plaqueva::biomarker_scatter(cohort, plaqueva::Biomarker::BNP));
      out["scatter_tn"] =
          plaqueva::json::chart(plaqueva::biomarker_scatter(cohort, plaqueva::Biomarker::TN));
      out["chronic"] = plaqueva::json::chart(plaqueva::chronic_stacks(cohort));
      write_output(views_out, out.dump());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
