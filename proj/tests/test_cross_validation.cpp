#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "oracles.hpp"
#include "plaqueva/errors.hpp"
#include "plaqueva/ingestion.hpp"
#include "plaqueva/ml_pipeline.hpp"

using namespace plaqueva;

namespace {

Cohort rescale_feature(const Cohort& cohort, std::size_t feature, double factor, double offset = 0) {
  std::vector<PatientRecord> patients;
  for (const auto& [id, p] : cohort.patients()) patients.push_back(p);
  auto samples = cohort.samples();
  for (auto& s : samples) s.features[feature] = s.features[feature] * factor + offset;
  return validate_cohort(patients, samples, cohort.feature_names(), cohort.voxels());
}

}  // namespace

TEST_CASE("stratified folds deal one sample per class per fold") {
  std::vector<PlaqueComponent> labels;
  for (auto c : kAllComponents)
    for (int i = 0; i < 5; ++i) labels.push_back(c);
  auto folds = stratified_kfold(labels, 5, 42);
  REQUIRE(folds.size() == 20);
  std::map<std::pair<int, PlaqueComponent>, int> cells;
  for (std::size_t i = 0; i < 20; ++i) ++cells[{folds[i], labels[i]}];
  CHECK(cells.size() == 20);
  for (const auto& [key, n] : cells) CHECK(n == 1);
  CHECK(stratified_kfold(labels, 5, 42) == folds);
}

TEST_CASE("stratified fold sizes differ by at most one per class") {
  std::vector<PlaqueComponent> labels;
  for (int i = 0; i < 13; ++i) labels.push_back(PlaqueComponent::IPH);
  for (int i = 0; i < 7; ++i) labels.push_back(PlaqueComponent::FIBROUS);
  for (int k : {2, 3, 5, 7}) {
    auto folds = stratified_kfold(labels, k, 9);
    for (auto c : {PlaqueComponent::IPH, PlaqueComponent::FIBROUS}) {
      std::vector<int> sizes(k, 0);
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == c) ++sizes[folds[i]];
      auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
      CHECK(*hi - *lo <= 1);
    }
  }
}

TEST_CASE("stratification errors name the class") {
  std::vector<PlaqueComponent> labels(10, PlaqueComponent::IPH);
  labels.push_back(PlaqueComponent::CALCIUM);
  labels.push_back(PlaqueComponent::CALCIUM);
  labels.push_back(PlaqueComponent::CALCIUM);
  try {
    stratified_kfold(labels, 5, 0);
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string{e.what()}.find("CALCIUM") != std::string::npos);
  }
  CHECK_THROWS_AS(stratified_kfold(labels, 1, 0), ValidationError);
}

TEST_CASE("top_k ties go to the lower index") {
  std::vector<double> v = {0.5, 0.9, 0.5, 0.9, 0.1};
  CHECK(top_k_indices(v, 3) == std::vector<std::size_t>{1, 3, 0});
  CHECK(top_k_indices(v, 10).size() == 5);
}

TEST_CASE("generator classes are linearly separable for a nearest-centroid oracle") {
  auto cohort = generate_synthetic_cohort({.seed = 7, .n_patients = 50, .d_features = 20, .separation = 3});
  std::vector<std::vector<double>> x;
  std::vector<int> labels;
  for (const auto& s : cohort.samples()) {
    std::vector<double> row(s.features.begin(), s.features.begin() + 3);
    x.push_back(row);
    labels.push_back(static_cast<int>(index_of(s.component)));
  }
  // Standardize the planted axes so raw scales do not dominate.
  for (std::size_t j = 0; j < 3; ++j) {
    double m = 0, v = 0;
    for (auto& r : x) m += r[j];
    m /= x.size();
    for (auto& r : x) v += (r[j] - m) * (r[j] - m);
    double sd = std::sqrt(v / x.size());
    for (auto& r : x) r[j] = (r[j] - m) / sd;
  }
  CHECK(oracle::nearest_centroid_loo(x, labels, 4) >= 0.95);
}

TEST_CASE("cross validation on the planted cohort") {
  auto cohort = generate_synthetic_cohort({.seed = 7, .n_patients = 50, .d_features = 20, .separation = 3});
  auto cv = cross_validate(cohort, {});
  const auto n = cohort.samples().size();
  CHECK(cv.folds.size() == n);
  for (int f : cv.folds) {
    CHECK(f >= 0);
    CHECK(f < 5);
  }
  CHECK(cv.oof_scores.size() == n);
  CHECK(cv.oof_predictions.size() == n);
  CHECK(cv.fold_models.size() == 5);
  CHECK(cv.fold_saliency.size() == 5);
  CHECK(cv.accuracy() >= 0.95);
  for (double s : cv.saliency) CHECK(s >= 0.0);
  REQUIRE(cv.top_features.size() == 10);
  for (std::size_t i = 1; i < cv.top_features.size(); ++i)
    CHECK(cv.saliency[cv.top_features[i - 1]] >= cv.saliency[cv.top_features[i]]);
  std::set<std::size_t> top3(cv.top_features.begin(), cv.top_features.begin() + 3);
  CHECK(top3 == std::set<std::size_t>{0, 1, 2});
  CHECK(cv.top_feature_names[0] == cohort.feature_names()[cv.top_features[0]]);
  CHECK(cv.saliency_method == kSaliencyMethod);

  // averaged saliency is the fold mean
  for (std::size_t j = 0; j < cohort.dimension(); ++j) {
    double m = 0;
    for (const auto& f : cv.fold_saliency) m += f[j];
    CHECK(cv.saliency[j] == doctest::Approx(m / 5).epsilon(1e-14));
  }
  // out-of-fold scores come from the model that did not see the sample
  const auto& s0 = cohort.samples()[0];
  auto p = predict(cv.fold_models[cv.folds[0]], s0.features);
  CHECK(p.scores == cv.oof_scores[0]);
}

TEST_CASE("cross validation is deterministic for a seed") {
  auto cohort = generate_synthetic_cohort({.seed = 12, .n_patients = 30, .d_features = 8});
  SvmParams params{.seed = 77};
  auto a = cross_validate(cohort, params);
  auto b = cross_validate(cohort, params);
  CHECK(a == b);
  params.seed = 78;
  auto c = cross_validate(cohort, params);
  CHECK(c.folds != a.folds);
}

TEST_CASE("ranking is invariant to positive rescaling of a column") {
  auto cohort = generate_synthetic_cohort({.seed = 7, .n_patients = 50, .d_features = 20});
  auto base = cross_validate(cohort, {});
  std::set<std::size_t> expect(base.top_features.begin(), base.top_features.end());
  for (std::size_t j : {0, 5, 13}) {
    auto scaled = cross_validate(rescale_feature(cohort, j, 1000.0), {});
    CHECK(std::set<std::size_t>(scaled.top_features.begin(), scaled.top_features.end()) == expect);
    CHECK(scaled.folds == base.folds);
  }
  auto affine = cross_validate(rescale_feature(cohort, 4, 0.25, 17.0), {});
  CHECK(std::set<std::size_t>(affine.top_features.begin(), affine.top_features.end()) == expect);
}

TEST_CASE("cross validation propagates stratification errors") {
  auto cohort = generate_synthetic_cohort({.seed = 7, .n_patients = 22, .d_features = 10});
  CHECK_THROWS_AS(cross_validate(cohort, {.k_folds = 50}), ValidationError);
}

TEST_CASE("top_k larger than D returns every feature") {
  auto cohort = generate_synthetic_cohort({.seed = 7, .n_patients = 30, .d_features = 4});
  auto cv = cross_validate(cohort, {.top_k = 10});
  CHECK(cv.top_features.size() == 4);
}

TEST_CASE("parallel coordinates follow the ranking") {
  auto cohort = generate_synthetic_cohort({.seed = 7, .n_patients = 30, .d_features = 6});
  auto cv = cross_validate(cohort, {.top_k = 2});
  auto pc = parallel_coords_data(cohort, cv);
  REQUIRE(pc.axes.size() == 2);
  CHECK(pc.polylines.size() == cohort.samples().size());
  for (std::size_t a = 0; a < 2; ++a) {
    auto j = cv.top_features[a];
    CHECK(pc.axes[a].feature_index == j);
    CHECK(pc.axes[a].name == cohort.feature_names()[j]);
    double lo = 1e300, hi = -1e300;
    for (const auto& s : cohort.samples()) {
      lo = std::min(lo, s.features[j]);
      hi = std::max(hi, s.features[j]);
    }
    CHECK(pc.axes[a].min == lo);
    CHECK(pc.axes[a].max == hi);
  }
  for (std::size_t i = 0; i < pc.polylines.size(); ++i) {
    const auto& line = pc.polylines[i];
    const auto& s = cohort.samples()[i];
    CHECK(line.sample_id == s.sample_id);
    CHECK(line.component == s.component);
    REQUIRE(line.values.size() == 2);
    CHECK(line.values[0] == s.features[cv.top_features[0]]);
  }
}

TEST_CASE("calcium separates on the top-ranked axes") {
  auto cohort = generate_synthetic_cohort({.seed = 7, .n_patients = 50, .d_features = 20});
  auto cv = cross_validate(cohort, {});
  auto pc = parallel_coords_data(cohort, cv);
  // Calcium sits on the positive side of every planted axis, so its mean
  // exceeds the mean of all other samples on each of the top three axes.
  for (std::size_t a = 0; a < 3; ++a) {
    double ca = 0, rest = 0, n_ca = 0, n_rest = 0;
    for (const auto& line : pc.polylines) {
      if (line.component == PlaqueComponent::CALCIUM) {
        ca += line.values[a];
        ++n_ca;
      } else {
        rest += line.values[a];
        ++n_rest;
      }
    }
    CHECK(ca / n_ca > rest / n_rest);
  }
}
