#include "plaqueva/clinical_views.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace plaqueva {
namespace {

ChartSeries empty_chart(ChartKind kind, std::string title) {
  ChartSeries chart;
  chart.kind = kind;
  chart.title = std::move(title);
  for (auto c : kAllComponents) chart.series.push_back({c, {}});
  return chart;
}

std::string format_bin(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::string_view chart_kind_name(ChartKind k) {
  switch (k) {
    case ChartKind::STACKED_AREA: return "STACKED_AREA";
    case ChartKind::LINE: return "LINE";
    case ChartKind::PIE: return "PIE";
    case ChartKind::SCATTER: return "SCATTER";
    case ChartKind::STACKED_BARS: return "STACKED_BARS";
    case ChartKind::PARALLEL: return "PARALLEL";
  }
  return "?";
}

std::string_view component_color(PlaqueComponent c) {
  switch (c) {
    case PlaqueComponent::IPH: return "#d62728";
    case PlaqueComponent::IPH_LIPID: return "#ff7f0e";
    case PlaqueComponent::CALCIUM: return "#e6c229";
    case PlaqueComponent::FIBROUS: return "#7b3fa0";
  }
  return "#000000";
}

ChartSeries age_stacked_area(const Cohort& cohort, const AgeBuckets& buckets) {
  if (buckets.width <= 0) throw ValidationError("age bucket width must be > 0");
  if (buckets.hi <= buckets.lo) throw ValidationError("age range must satisfy lo < hi");

  auto chart = empty_chart(ChartKind::STACKED_AREA, "Age vs plaque size");
  chart.aggregation = buckets.aggregation == AgeAggregation::SUM ? "sum" : "mean";
  chart.x_axis = {"age group", "years"};
  chart.y_axis = {"plaque size", "voxels"};

  std::vector<std::string> labels{"<" + std::to_string(buckets.lo)};
  for (int lo = buckets.lo; lo < buckets.hi; lo += buckets.width)
    labels.push_back(std::to_string(lo) + "-" +
                     std::to_string(std::min(lo + buckets.width, buckets.hi)));
  labels.push_back(">=" + std::to_string(buckets.hi));

  const std::size_t n = labels.size();
  std::vector<std::array<std::int64_t, kNumComponents>> sums(n);
  std::vector<std::int64_t> members(n, 0);
  auto bucket_of = [&](int age) -> std::size_t {
    if (age < buckets.lo) return 0;
    if (age >= buckets.hi) return n - 1;
    return 1 + static_cast<std::size_t>((age - buckets.lo) / buckets.width);
  };

  for (const auto& [id, p] : cohort.patients()) {
    auto b = bucket_of(p.age);
    ++members[b];
    for (auto c : kAllComponents) sums[b][index_of(c)] += plaque_size(cohort, id, c);
  }

  for (auto c : kAllComponents) {
    auto& pts = chart.series[index_of(c)].points;
    for (std::size_t b = 0; b < n; ++b) {
      ChartPoint pt;
      pt.x = static_cast<double>(b);
      pt.category = labels[b];
      pt.count = members[b];
      auto total = sums[b][index_of(c)];
      if (buckets.aggregation == AgeAggregation::SUM)
        pt.y = static_cast<double>(total);
      else if (members[b] > 0)
        pt.y = static_cast<double>(total) / static_cast<double>(members[b]);
      pts.push_back(std::move(pt));
    }
  }
  return chart;
}

ChartSeries bmi_line(const Cohort& cohort, const BmiBins& bins) {
  if (!(bins.width > 0)) throw ValidationError("bmi bin width must be > 0");
  if (!(bins.hi > bins.lo)) throw ValidationError("bmi range must satisfy lo < hi");

  auto chart = empty_chart(ChartKind::LINE, "BMI vs plaque size");
  chart.aggregation = "mean";
  chart.x_axis = {"BMI", "kg/m2"};
  chart.y_axis = {"plaque size", "voxels"};

  const auto n = static_cast<std::size_t>(std::ceil((bins.hi - bins.lo) / bins.width - 1e-12));
  std::vector<std::array<std::int64_t, kNumComponents>> sums(n);
  std::vector<std::int64_t> members(n, 0);
  for (const auto& [id, p] : cohort.patients()) {
    if (p.bmi < bins.lo || p.bmi >= bins.hi) continue;
    auto b = std::min(n - 1, static_cast<std::size_t>(std::floor((p.bmi - bins.lo) / bins.width)));
    ++members[b];
    for (auto c : kAllComponents) sums[b][index_of(c)] += plaque_size(cohort, id, c);
  }

  for (auto c : kAllComponents) {
    auto& pts = chart.series[index_of(c)].points;
    for (std::size_t b = 0; b < n; ++b) {
      double lo = bins.lo + static_cast<double>(b) * bins.width;
      ChartPoint pt;
      pt.x = lo;
      pt.category = format_bin(lo) + "-" + format_bin(std::min(lo + bins.width, bins.hi));
      pt.count = members[b];
      if (members[b] > 0)
        pt.y = static_cast<double>(sums[b][index_of(c)]) / static_cast<double>(members[b]);
      pts.push_back(std::move(pt));
    }
  }
  return chart;
}

std::vector<ChartSeries> gender_pies(const Cohort& cohort) {
  std::vector<ChartSeries> pies;
  for (auto g : {Gender::MALE, Gender::FEMALE}) {
    auto chart = empty_chart(ChartKind::PIE, "Gender vs plaque components");
    chart.group = std::string{gender_name(g)};
    chart.aggregation = "fraction of voxels";
    chart.y_axis = {"fraction", ""};

    std::array<std::int64_t, kNumComponents> totals{};
    for (const auto& [id, p] : cohort.patients())
      if (p.gender == g)
        for (auto c : kAllComponents) totals[index_of(c)] += plaque_size(cohort, id, c);
    std::int64_t all = 0;
    for (auto t : totals) all += t;

    for (auto c : kAllComponents) {
      ChartPoint pt;
      pt.x = static_cast<double>(index_of(c));
      pt.category = std::string{component_name(c)};
      pt.count = totals[index_of(c)];
      pt.y = all > 0 ? static_cast<double>(totals[index_of(c)]) / static_cast<double>(all) : 0.0;
      chart.series[index_of(c)].points.push_back(std::move(pt));
    }
    pies.push_back(std::move(chart));
  }
  return pies;
}

std::optional<Biomarker> parse_biomarker(std::string_view name) {
  if (name == "bnp" || name == "BNP") return Biomarker::BNP;
  if (name == "tn" || name == "TN") return Biomarker::TN;
  return std::nullopt;
}

ChartSeries biomarker_scatter(const Cohort& cohort, Biomarker marker) {
  const bool bnp = marker == Biomarker::BNP;
  auto chart = empty_chart(ChartKind::SCATTER, bnp ? "BNP vs plaque size" : "TN vs plaque size");
  chart.group = bnp ? "BNP" : "TN";
  chart.aggregation = "none";
  chart.x_axis = bnp ? Axis{"BNP", "pg/mL"} : Axis{"TN", "ng/mL"};
  chart.y_axis = {"plaque size", "voxels"};

  for (const auto& [id, p] : cohort.patients()) {
    for (auto c : kAllComponents) {
      auto size = plaque_size(cohort, id, c);
      if (size <= 0) continue;
      ChartPoint pt;
      pt.x = bnp ? p.bnp : p.tn;
      pt.y = static_cast<double>(size);
      pt.patient_id = id;
      chart.series[index_of(c)].points.push_back(std::move(pt));
    }
  }
  return chart;
}

ChartSeries chronic_stacks(const Cohort& cohort) {
  auto chart = empty_chart(ChartKind::STACKED_BARS, "Chronic diseases vs plaque components");
  chart.aggregation = "upper: mean size over patients with the component; lower: patient count";
  chart.x_axis = {"chronic disease", ""};
  chart.y_axis = {"average plaque size / patients", "voxels / count"};

  for (auto d : kAllDiseases) {
    std::array<std::int64_t, kNumComponents> sums{}, counts{};
    for (const auto& [id, p] : cohort.patients()) {
      if (!p.has(d)) continue;
      for (auto c : kAllComponents) {
        auto size = plaque_size(cohort, id, c);
        if (size <= 0) continue;
        sums[index_of(c)] += size;
        ++counts[index_of(c)];
      }
    }
    for (auto c : kAllComponents) {
      auto i = index_of(c);
      ChartPoint pt;
      pt.x = static_cast<double>(static_cast<int>(d));
      pt.category = std::string{disease_name(d)};
      pt.y = counts[i] > 0 ? static_cast<double>(sums[i]) / static_cast<double>(counts[i]) : 0.0;
      pt.count = counts[i];
      chart.series[i].points.push_back(std::move(pt));
    }
  }
  return chart;
}

}  // namespace plaqueva
