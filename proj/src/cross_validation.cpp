#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <random>

#include "plaqueva/ml_pipeline.hpp"

namespace plaqueva {

std::vector<int> stratified_kfold(std::span<const PlaqueComponent> labels, int k,
                                  std::uint64_t seed) {
  if (k < 2) throw ValidationError("k must be >= 2");
  std::array<std::vector<std::size_t>, kNumComponents> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[index_of(labels[i])].push_back(i);
  for (auto c : kAllComponents) {
    const auto count = members[index_of(c)].size();
    if (count > 0 && count < static_cast<std::size_t>(k))
      throw ValidationError("class " + std::string{component_name(c)} + " has " +
                            std::to_string(count) + " samples, fewer than k=" +
                            std::to_string(k));
  }

  std::vector<int> folds(labels.size(), -1);
  std::mt19937_64 rng(seed);
  for (auto& idx : members) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t r = 0; r < idx.size(); ++r)
      folds[idx[r]] = static_cast<int>(r % static_cast<std::size_t>(k));
  }
  return folds;
}

std::vector<std::size_t> top_k_indices(std::span<const double> values, std::size_t k) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  order.resize(std::min(k, order.size()));
  return order;
}

double CvResult::accuracy() const {
  if (labels.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hit += labels[i] == oof_predictions[i];
  return static_cast<double>(hit) / static_cast<double>(labels.size());
}

namespace {

struct FoldOutput {
  SvmModel model;
  std::vector<double> saliency;
  std::vector<std::size_t> held_out;
  std::vector<Prediction> predictions;
};

FoldOutput run_fold(const Matrix& x, std::span<const PlaqueComponent> labels,
                    std::span<const int> folds, int fold, const SvmParams& params,
                    const Deadline& deadline) {
  FoldOutput out;
  std::vector<std::size_t> train;
  std::vector<PlaqueComponent> train_labels;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (folds[i] == fold) {
      out.held_out.push_back(i);
    } else {
      train.push_back(i);
      train_labels.push_back(labels[i]);
    }
  }

  SvmParams p = params;
  p.seed = params.seed * 1000003ULL + static_cast<std::uint64_t>(fold) + 1;
  out.model = train_ovr(x.select_rows(train), train_labels, p, deadline);

  out.saliency.assign(x.cols(), 0.0);
  const auto trained = static_cast<double>(out.model.trained_classes());
  for (const auto& svm : out.model.classes) {
    if (!svm) continue;
    for (std::size_t j = 0; j < x.cols(); ++j) out.saliency[j] += std::abs(svm->weights[j]);
  }
  for (auto& s : out.saliency) s /= trained;

  for (auto i : out.held_out) out.predictions.push_back(predict(out.model, x.row(i)));
  return out;
}

}  // namespace

CvResult cross_validate(const Cohort& cohort, const SvmParams& params, const Deadline& deadline) {
  check_params(params);
  if (cohort.dimension() == 0) throw ValidationError("cross_validate: cohort has no features");

  CvResult cv;
  cv.params = params;
  cv.labels = sample_labels(cohort);
  const Matrix x = feature_matrix(cohort);
  cv.folds = stratified_kfold(cv.labels, params.k_folds, params.seed);

  std::vector<std::future<FoldOutput>> jobs;
  for (int f = 0; f < params.k_folds; ++f)
    jobs.push_back(std::async(std::launch::async, run_fold, std::cref(x),
                              std::span<const PlaqueComponent>(cv.labels),
                              std::span<const int>(cv.folds), f, std::cref(params),
                              std::cref(deadline)));

  const std::size_t n = cv.labels.size();
  cv.oof_scores.assign(n, {});
  cv.oof_predictions.assign(n, PlaqueComponent::IPH);
  cv.saliency.assign(cohort.dimension(), 0.0);
  // get() in fold order: merge is independent of completion order.
  std::vector<FoldOutput> outputs;
  for (auto& job : jobs) outputs.push_back(job.get());

  for (int f = 0; f < params.k_folds; ++f) {
    auto& out = outputs[static_cast<std::size_t>(f)];
    for (std::size_t r = 0; r < out.held_out.size(); ++r) {
      cv.oof_scores[out.held_out[r]] = out.predictions[r].scores;
      cv.oof_predictions[out.held_out[r]] = out.predictions[r].label;
    }
    for (std::size_t j = 0; j < cv.saliency.size(); ++j) cv.saliency[j] += out.saliency[j];
    for (const auto& w : out.model.warnings)
      cv.warnings.push_back("fold " + std::to_string(f) + ": " + w);
    cv.fold_saliency.push_back(std::move(out.saliency));
    cv.fold_models.push_back(std::move(out.model));
  }
  for (auto& s : cv.saliency) s /= static_cast<double>(params.k_folds);

  cv.top_features = top_k_indices(cv.saliency, static_cast<std::size_t>(params.top_k));
  for (auto j : cv.top_features) cv.top_feature_names.push_back(cohort.feature_names()[j]);
  return cv;
}

ParallelCoords parallel_coords_data(const Cohort& cohort, const CvResult& cv) {
  ParallelCoords pc;
  for (auto j : cv.top_features) {
    ParallelAxis axis;
    axis.feature_index = j;
    axis.name = cohort.feature_names().at(j);
    axis.min = std::numeric_limits<double>::infinity();
    axis.max = -std::numeric_limits<double>::infinity();
    for (const auto& s : cohort.samples()) {
      axis.min = std::min(axis.min, s.features[j]);
      axis.max = std::max(axis.max, s.features[j]);
    }
    if (cohort.samples().empty()) axis.min = axis.max = 0.0;
    pc.axes.push_back(std::move(axis));
  }
  for (const auto& s : cohort.samples()) {
    Polyline line;
    line.sample_id = s.sample_id;
    line.component = s.component;
    for (auto j : cv.top_features) line.values.push_back(s.features[j]);
    pc.polylines.push_back(std::move(line));
  }
  return pc;
}

}  // namespace plaqueva
