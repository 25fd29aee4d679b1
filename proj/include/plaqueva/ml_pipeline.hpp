#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plaqueva/cohort.hpp"
#include "plaqueva/matrix.hpp"

namespace plaqueva {

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

struct SvmParams {
  double C = 1.0;
  double tol = 1e-3;  // KKT tolerance
  int max_passes = 200;
  std::uint64_t seed = 0;
  int k_folds = 5;
  int top_k = 10;

  friend bool operator==(const SvmParams&, const SvmParams&) = default;
};

/// Throws ValidationError when a field is out of range.
void check_params(const SvmParams& params);

// ---------------------------------------------------------------------------
// Standardization
// ---------------------------------------------------------------------------

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;  // population standard deviation
  std::vector<bool> constant;  // stddev == 0

  friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

Standardizer standardize_fit(const Matrix& x);
Matrix standardize_apply(const Standardizer& s, const Matrix& x);
std::vector<double> standardize_apply(const Standardizer& s, std::span<const double> x);

// ---------------------------------------------------------------------------
// Binary soft-margin SVM (linear kernel, SMO)
// ---------------------------------------------------------------------------

struct BinarySvm {
  std::vector<double> alpha;
  double bias = 0.0;
  std::vector<double> weights;         // sum_i alpha_i y_i x_i
  std::vector<std::size_t> support;    // indices with alpha > 0
  bool converged = false;
  int passes = 0;

  double decision(std::span<const double> x) const { return dot(weights, x) + bias; }

  friend bool operator==(const BinarySvm&, const BinarySvm&) = default;
};

/// Solves the soft-margin dual with Platt's SMO. Labels must be +1/-1 with
/// both present. On hitting max_passes the current iterate is returned with
/// converged == false.
BinarySvm train_binary_svm(const Matrix& x, std::span<const int> y, const SvmParams& params,
                           const Deadline& deadline = std::nullopt);

// ---------------------------------------------------------------------------
// One-vs-rest model
// ---------------------------------------------------------------------------

struct SvmModel {
  Standardizer standardizer;
  SvmParams params;
  std::array<std::optional<BinarySvm>, kNumComponents> classes;  // empty = no samples
  std::vector<std::string> warnings;

  std::size_t trained_classes() const;

  friend bool operator==(const SvmModel&, const SvmModel&) = default;
};

/// One binary problem per component present in `labels`, on features
/// standardized with statistics of `x`.
SvmModel train_ovr(const Matrix& x, std::span<const PlaqueComponent> labels,
                   const SvmParams& params, const Deadline& deadline = std::nullopt);
SvmModel train_ovr(const Cohort& cohort, const SvmParams& params);

struct Prediction {
  PlaqueComponent label = PlaqueComponent::IPH;
  std::array<double, kNumComponents> scores{};  // -inf for untrained classes
};

/// Argmax of per-class decision values on the standardized input; ties go
/// to the lowest component code.
Prediction predict(const SvmModel& model, std::span<const double> x);

// ---------------------------------------------------------------------------
// Cross-validation and ranking
// ---------------------------------------------------------------------------

/// Each class is shuffled with the seed and dealt round-robin over k folds.
/// Throws ValidationError naming a class with fewer than k samples.
std::vector<int> stratified_kfold(std::span<const PlaqueComponent> labels, int k,
                                  std::uint64_t seed);

inline constexpr const char* kSaliencyMethod =
    "mean over one-vs-rest classes of |w| on standardized features, averaged over folds";

struct CvResult {
  SvmParams params;
  std::vector<int> folds;                                    // per sample
  std::vector<PlaqueComponent> labels;                       // true label per sample
  std::vector<std::array<double, kNumComponents>> oof_scores;
  std::vector<PlaqueComponent> oof_predictions;
  std::vector<std::vector<double>> fold_saliency;            // k x D
  std::vector<double> saliency;                              // D
  std::vector<std::size_t> top_features;                     // descending saliency
  std::vector<std::string> top_feature_names;
  std::vector<SvmModel> fold_models;
  std::vector<std::string> warnings;
  std::string saliency_method = kSaliencyMethod;

  double accuracy() const;

  friend bool operator==(const CvResult&, const CvResult&) = default;
};

/// Stratified k-fold CV of the one-vs-rest SVM. Folds train concurrently;
/// merge order is fixed so the result does not depend on scheduling.
CvResult cross_validate(const Cohort& cohort, const SvmParams& params,
                        const Deadline& deadline = std::nullopt);

/// Indices of the `k` largest values, ties by lower index.
std::vector<std::size_t> top_k_indices(std::span<const double> values, std::size_t k);

struct ParallelAxis {
  std::size_t feature_index = 0;
  std::string name;
  double min = 0.0;
  double max = 0.0;
};

struct Polyline {
  std::string sample_id;
  PlaqueComponent component = PlaqueComponent::IPH;
  std::vector<double> values;  // raw values along the axes
};

struct ParallelCoords {
  std::vector<ParallelAxis> axes;
  std::vector<Polyline> polylines;
};

ParallelCoords parallel_coords_data(const Cohort& cohort, const CvResult& cv);

/// Raw sample feature matrix (N x D) and labels.
Matrix feature_matrix(const Cohort& cohort);
std::vector<PlaqueComponent> sample_labels(const Cohort& cohort);

}  // namespace plaqueva
