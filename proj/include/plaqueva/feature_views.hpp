#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plaqueva/cohort.hpp"
#include "plaqueva/ml_pipeline.hpp"

namespace plaqueva {

struct RadarData {
  std::vector<std::size_t> feature_indices;
  std::vector<std::string> axes;
  /// Per component, the mean min-max normalized value on each axis; empty
  /// when the component has no samples.
  std::array<std::optional<std::vector<double>>, kNumComponents> values;
};

/// Normalization spans all samples; a constant feature maps to 0.5.
RadarData radar_data(const Cohort& cohort, const CvResult& cv);

struct BoxStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
  std::vector<double> outliers;  // ascending
  std::size_t n = 0;
  bool degenerate = false;       // fewer than 2 values

  friend bool operator==(const BoxStats&, const BoxStats&) = default;
};

/// Quartile at probability p by linear interpolation between order
/// statistics at zero-based position p (n - 1). `sorted` must be ascending.
double quantile_sorted(std::span<const double> sorted, double p);

/// Tukey box with 1.5 IQR fences. Throws ValidationError for no values.
BoxStats box_stats(std::span<const double> values);

struct BoxplotEntry {
  std::size_t feature_index = 0;
  std::string feature_name;
  PlaqueComponent component = PlaqueComponent::IPH;
  BoxStats stats;
};

/// One entry per (top feature, component with samples), features in rank order.
std::vector<BoxplotEntry> boxplot_data(const Cohort& cohort, const CvResult& cv);

}  // namespace plaqueva
