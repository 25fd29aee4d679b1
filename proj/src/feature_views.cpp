#include "plaqueva/feature_views.hpp"

#include <algorithm>
#include <cmath>

namespace plaqueva {

RadarData radar_data(const Cohort& cohort, const CvResult& cv) {
  RadarData radar;
  radar.feature_indices = cv.top_features;
  for (auto j : cv.top_features) radar.axes.push_back(cohort.feature_names().at(j));

  std::array<std::size_t, kNumComponents> counts{};
  for (const auto& s : cohort.samples()) ++counts[index_of(s.component)];
  for (auto c : kAllComponents)
    if (counts[index_of(c)] > 0) radar.values[index_of(c)].emplace(cv.top_features.size(), 0.0);

  for (std::size_t a = 0; a < cv.top_features.size(); ++a) {
    const auto j = cv.top_features[a];
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& s : cohort.samples()) {
      lo = first ? s.features[j] : std::min(lo, s.features[j]);
      hi = first ? s.features[j] : std::max(hi, s.features[j]);
      first = false;
    }
    for (const auto& s : cohort.samples()) {
      double v = hi > lo ? (s.features[j] - lo) / (hi - lo) : 0.5;
      (*radar.values[index_of(s.component)])[a] += v;
    }
  }
  for (auto c : kAllComponents) {
    auto& vals = radar.values[index_of(c)];
    if (!vals) continue;
    for (auto& v : *vals) v = std::clamp(v / static_cast<double>(counts[index_of(c)]), 0.0, 1.0);
  }
  return radar;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ValidationError("quantile of empty data");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats(std::span<const double> values) {
  if (values.empty()) throw ValidationError("box_stats: no values");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());

  BoxStats b;
  b.n = v.size();
  b.min = v.front();
  b.max = v.back();
  if (v.size() < 2) {
    b.degenerate = true;
    b.q1 = b.median = b.q3 = b.whisker_lo = b.whisker_hi = v.front();
    return b;
  }
  b.q1 = quantile_sorted(v, 0.25);
  b.median = quantile_sorted(v, 0.5);
  b.q3 = quantile_sorted(v, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.whisker_lo = b.q1;
  b.whisker_hi = b.q3;
  for (double x : v) {
    if (x < lo_fence || x > hi_fence) {
      b.outliers.push_back(x);
      continue;
    }
    b.whisker_lo = std::min(b.whisker_lo, x);
    b.whisker_hi = std::max(b.whisker_hi, x);
  }
  return b;
}

std::vector<BoxplotEntry> boxplot_data(const Cohort& cohort, const CvResult& cv) {
  std::vector<BoxplotEntry> out;
  for (auto j : cv.top_features) {
    for (auto c : kAllComponents) {
      std::vector<double> values;
      for (const auto& s : cohort.samples())
        if (s.component == c) values.push_back(s.features[j]);
      if (values.empty()) continue;
      out.push_back({j, cohort.feature_names().at(j), c, box_stats(values)});
    }
  }
  return out;
}

}  // namespace plaqueva
