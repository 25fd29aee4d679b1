#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plaqueva/ml_pipeline.hpp"

namespace plaqueva {

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;       // true count
  bool precision_undefined = false;  // no predictions of the class; reported as 0
  bool recall_undefined = false;     // class absent from truth; reported as 0
};

struct MetricsTable {
  std::array<std::array<std::int64_t, kNumComponents>, kNumComponents> confusion{};  // [true][pred]
  std::array<ClassScores, kNumComponents> per_class{};
  double accuracy = 0.0;
  std::int64_t total = 0;
};

MetricsTable metrics_from_predictions(std::span<const PlaqueComponent> truth,
                                      std::span<const PlaqueComponent> predicted);
MetricsTable confusion_and_scores(const CvResult& cv);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // +inf for the origin
};

struct RocCurve {
  std::optional<PlaqueComponent> component;
  std::vector<RocPoint> points;
  double auc = 0.0;
};

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
  double threshold = 0.0;
};

inline constexpr const char* kAveragePrecisionMethod =
    "step-wise sum of (R_n - R_{n-1}) * P_n over distinct thresholds, no interpolation";

struct PrCurve {
  std::optional<PlaqueComponent> component;
  std::vector<PrPoint> points;
  double average_precision = 0.0;
};

/// Thresholds sweep the distinct scores from high to low; tied scores move
/// as one (diagonal) step. Throws ValidationError without both classes.
RocCurve roc_curve(std::span<const double> scores, std::span<const bool> labels);

/// Throws ValidationError when no label is positive.
PrCurve pr_curve(std::span<const double> scores, std::span<const bool> labels);

struct OvrCurves {
  std::vector<RocCurve> roc;
  std::vector<PrCurve> pr;
  std::vector<std::string> warnings;
};

/// Per-component curves from out-of-fold scores. Components with no positive
/// or no negative sample are omitted with a warning.
OvrCurves ovr_curves(const CvResult& cv);

}  // namespace plaqueva
