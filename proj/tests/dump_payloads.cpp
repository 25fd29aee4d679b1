// Writes one JSON file per route response into the given directory. Files
// are named <schema>__<case>.json so the validator can pick the schema.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "plaqueva/api_service.hpp"
#include "plaqueva/ingestion.hpp"

using namespace plaqueva;
namespace fs = std::filesystem;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: dump_payloads <dir>\n");
    return 2;
  }
  const fs::path out = argv[1];
  fs::remove_all(out);
  fs::create_directories(out);

  // IPH_LIPID is dropped from a small cohort so the absent-class paths are covered too.
  auto full = generate_synthetic_cohort({.seed = 7, .n_patients = 30, .d_features = 12});
  std::vector<PlaqueSample> kept;
  for (const auto& s : full.samples())
    if (s.component != PlaqueComponent::IPH_LIPID) kept.push_back(s);
  std::vector<PatientRecord> patients;
  for (const auto& [id, p] : full.patients()) patients.push_back(p);
  auto partial = validate_cohort(patients, kept, full.feature_names(), full.voxels());

  int failures = 0;
  auto dump = [&](ApiService& api, const std::string& file, int want, const std::string& method,
                  const std::string& path, const std::map<std::string, std::string>& query = {},
                  const std::string& body = {}) {
    auto r = api.handle(method, path, query, body);
    if (r.status != want) {
      std::fprintf(stderr, "%s %s: status %d, expected %d\n", method.c_str(), path.c_str(), r.status, want);
      ++failures;
    }
    std::ofstream(out / (file + ".json")) << r.body;
  };

  for (auto* cohort : {&full, &partial}) {
    const std::string tag = cohort == &full ? "full" : "partial";
    ApiService api(*cohort, {});
    dump(api, "error__untrained_" + tag, 409, "GET", "/api/metrics/roc");
    dump(api, "patients__" + tag, 200, "GET", "/api/patients");
    dump(api, "patient__" + tag, 200, "GET", "/api/patients/" + cohort->patients().begin()->first);
    dump(api, "chart__age_" + tag, 200, "GET", "/api/views/age");
    dump(api, "chart__age_mean_" + tag, 200, "GET", "/api/views/age", {{"width", "5"}, {"aggregation", "mean"}});
    dump(api, "chart__bmi_" + tag, 200, "GET", "/api/views/bmi");
    dump(api, "chart__chronic_" + tag, 200, "GET", "/api/views/chronic");
    dump(api, "chart__scatter_bnp_" + tag, 200, "GET", "/api/views/scatter", {{"marker", "bnp"}});
    dump(api, "chart__scatter_tn_" + tag, 200, "GET", "/api/views/scatter", {{"marker", "tn"}});
    dump(api, "gender__" + tag, 200, "GET", "/api/views/gender");
    dump(api, "anova_component__" + tag, 200, "GET", "/api/anova", {{"feature", "0"}, {"component", "CALCIUM"}});
    dump(api, "anova_component__lipid_" + tag, 200, "GET", "/api/anova",
         {{"feature", "0"}, {"component", "IPH_LIPID"}});
    dump(api, "anova_grid__" + tag, 200, "GET", "/api/anova", {{"feature", "orig_glrlm_RLNU"}});
    dump(api, "train__" + tag, 200, "POST", "/api/train", {}, R"({"seed": 7, "k": 5})");
    dump(api, "top__" + tag, 200, "GET", "/api/features/top");
    dump(api, "parallel__" + tag, 200, "GET", "/api/features/parallel");
    dump(api, "radar__" + tag, 200, "GET", "/api/features/radar");
    dump(api, "boxplot__" + tag, 200, "GET", "/api/features/boxplot");
    dump(api, "confusion__" + tag, 200, "GET", "/api/metrics/confusion");
    dump(api, "roc__" + tag, 200, "GET", "/api/metrics/roc");
    dump(api, "pr__" + tag, 200, "GET", "/api/metrics/pr");
    dump(api, "error__not_found_" + tag, 404, "GET", "/api/patients/NOPE");
    dump(api, "error__bad_param_" + tag, 400, "POST", "/api/train", {}, R"({"C": -1})");
    dump(api, "error__method_" + tag, 405, "GET", "/api/train");
  }
  ApiService slow(full, {}, std::chrono::milliseconds{0});
  dump(slow, "error__timeout", 504, "POST", "/api/train", {}, "{}");
  return failures == 0 ? 0 : 1;
}
