#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plaqueva/cohort.hpp"

namespace plaqueva {

enum class ChartKind { STACKED_AREA, LINE, PIE, SCATTER, STACKED_BARS, PARALLEL };
std::string_view chart_kind_name(ChartKind k);

/// Fixed palette shared by every chart.
std::string_view component_color(PlaqueComponent c);

struct Axis {
  std::string label;
  std::string unit;

  friend bool operator==(const Axis&, const Axis&) = default;
};

/// One datum. `y` empty marks an explicit gap (no interpolation).
struct ChartPoint {
  double x = 0.0;
  std::optional<double> y;
  std::string category;    // bucket / disease / slice label
  std::string patient_id;  // scatter hover detail
  std::optional<std::int64_t> count;  // lower-bar patient counts (chronic stacks)

  friend bool operator==(const ChartPoint&, const ChartPoint&) = default;
};

struct ComponentSeries {
  PlaqueComponent component;
  std::vector<ChartPoint> points;

  friend bool operator==(const ComponentSeries&, const ComponentSeries&) = default;
};

struct ChartSeries {
  ChartKind kind = ChartKind::LINE;
  std::string title;
  std::string group;        // e.g. "MALE" for a gender pie, marker name for scatter
  std::string aggregation;  // how y was computed, e.g. "sum", "mean"
  Axis x_axis;
  Axis y_axis;
  std::vector<ComponentSeries> series;  // always one per component, in code order

  const ComponentSeries& of(PlaqueComponent c) const { return series.at(index_of(c)); }

  friend bool operator==(const ChartSeries&, const ChartSeries&) = default;
};

enum class AgeAggregation { SUM, MEAN };

struct AgeBuckets {
  int width = 10;
  int lo = 30;
  int hi = 90;
  AgeAggregation aggregation = AgeAggregation::SUM;
};

/// Plaque size per age bucket and component. Buckets are "<lo", [lo, lo+w),
/// ..., ">=hi"; x is the bucket ordinal.
ChartSeries age_stacked_area(const Cohort& cohort, const AgeBuckets& buckets = {});

struct BmiBins {
  double width = 1.0;
  double lo = 17.0;
  double hi = 30.0;
};

/// Mean plaque size per BMI bin; empty bins carry a gap point.
ChartSeries bmi_line(const Cohort& cohort, const BmiBins& bins = {});

/// Fraction of each gender's plaque voxels per component. Returns
/// {male, female}.
std::vector<ChartSeries> gender_pies(const Cohort& cohort);

enum class Biomarker { BNP, TN };
std::optional<Biomarker> parse_biomarker(std::string_view name);

/// One point per (patient, component) with positive plaque size.
ChartSeries biomarker_scatter(const Cohort& cohort, Biomarker marker);

/// Per chronic disease: y = mean size over patients with the disease and the
/// component present, count = number of such patients.
ChartSeries chronic_stacks(const Cohort& cohort);

}  // namespace plaqueva
