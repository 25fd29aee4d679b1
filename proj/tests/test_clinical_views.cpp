#include <doctest.h>

#include <algorithm>
#include <random>

#include "plaqueva/clinical_views.hpp"
#include "plaqueva/errors.hpp"
#include "plaqueva/ingestion.hpp"

using namespace plaqueva;
using PC = PlaqueComponent;

namespace {

struct Builder {
  std::vector<PatientRecord> patients;
  VoxelCounts voxels;

  PatientRecord& add(const std::string& id, int age, double bmi = 23.0, Gender g = Gender::MALE) {
    PatientRecord p;
    p.patient_id = id;
    p.age = age;
    p.bmi = bmi;
    p.gender = g;
    patients.push_back(p);
    return patients.back();
  }
  void size(const std::string& id, PC c, std::int64_t left, std::int64_t right = 0) {
    if (left) voxels[{id, Side::LEFT, c}] = left;
    if (right) voxels[{id, Side::RIGHT, c}] = right;
  }
  Cohort build() const { return validate_cohort(patients, {}, {"f"}, voxels); }
};

const ChartPoint& bucket(const ChartSeries& chart, PC c, const std::string& category) {
  const auto& pts = chart.of(c).points;
  auto it = std::find_if(pts.begin(), pts.end(), [&](const auto& p) { return p.category == category; });
  REQUIRE(it != pts.end());
  return *it;
}

Cohort permuted(const Cohort& cohort, std::uint64_t seed) {
  std::vector<PatientRecord> patients;
  for (const auto& [id, p] : cohort.patients()) patients.push_back(p);
  auto samples = cohort.samples();
  std::mt19937_64 rng(seed);
  std::shuffle(patients.begin(), patients.end(), rng);
  std::shuffle(samples.begin(), samples.end(), rng);
  return validate_cohort(patients, samples, cohort.feature_names(), cohort.voxels());
}

}  // namespace

TEST_CASE("plaque size sums both sides") {
  Builder b;
  b.add("A", 50);
  b.size("A", PC::IPH, 100, 40);
  auto cohort = b.build();
  CHECK(plaque_size(cohort, "A", PC::IPH) == 140);
  CHECK(plaque_size(cohort, "A", PC::CALCIUM) == 0);
  CHECK_THROWS_AS(plaque_size(cohort, "ZZZ", PC::IPH), NotFoundError);
}

TEST_CASE("age stacked area examples") {
  Builder one;
  one.add("A", 45);
  one.size("A", PC::IPH, 60, 40);
  auto chart = age_stacked_area(one.build());
  CHECK(chart.kind == ChartKind::STACKED_AREA);
  CHECK(chart.aggregation == "sum");
  REQUIRE(chart.series.size() == 4);
  CHECK(bucket(chart, PC::IPH, "40-50").y == 100.0);
  for (auto c : kAllComponents)
    for (const auto& p : chart.of(c).points)
      if (!(c == PC::IPH && p.category == "40-50")) CHECK(p.y == 0.0);

  Builder two;
  two.add("A", 41);
  two.add("B", 49);
  two.size("A", PC::FIBROUS, 30);
  two.size("B", PC::FIBROUS, 0, 70);
  CHECK(bucket(age_stacked_area(two.build()), PC::FIBROUS, "40-50").y == 100.0);
}

TEST_CASE("age buckets have open ends and sorted x") {
  Builder b;
  b.add("young", 20);
  b.add("old", 95);
  b.add("edge", 90);
  b.add("low", 30);
  for (const auto& p : b.patients) b.size(p.patient_id, PC::CALCIUM, p.age);
  auto chart = age_stacked_area(b.build());
  const auto& pts = chart.of(PC::CALCIUM).points;
  REQUIRE(pts.size() == 8);
  CHECK(pts.front().category == "<30");
  CHECK(pts.back().category == ">=90");
  CHECK(pts.front().y == 20.0);
  CHECK(pts.back().y == 185.0);
  CHECK(bucket(chart, PC::CALCIUM, "30-40").y == 30.0);
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].x > pts[i - 1].x);

  auto mean = age_stacked_area(b.build(), {.aggregation = AgeAggregation::MEAN});
  CHECK(mean.aggregation == "mean");
  CHECK(bucket(mean, PC::CALCIUM, ">=90").y == 92.5);
  CHECK_FALSE(bucket(mean, PC::CALCIUM, "50-60").y);

  auto five = age_stacked_area(b.build(), {.width = 5});
  CHECK(five.of(PC::IPH).points.size() == 14);
  CHECK_THROWS_AS(age_stacked_area(b.build(), {.width = 0}), ValidationError);
}

TEST_CASE("empty cohort yields empty-valued charts") {
  Cohort empty = validate_cohort({}, {}, {"f"}, {});
  auto chart = age_stacked_area(empty);
  for (const auto& s : chart.series)
    for (const auto& p : s.points) CHECK(p.y == 0.0);
  for (const auto& pie : gender_pies(empty))
    for (const auto& s : pie.series) CHECK(s.points[0].y == 0.0);
  auto scatter = biomarker_scatter(empty, Biomarker::BNP);
  for (const auto& s : scatter.series) CHECK(s.points.empty());
}

TEST_CASE("bmi line examples") {
  Builder b;
  b.add("A", 60, 22.4);
  b.size("A", PC::CALCIUM, 60);
  b.add("B", 60, 21.2);
  b.add("C", 60, 21.9);
  b.size("B", PC::IPH, 10);
  b.size("C", PC::IPH, 0, 30);
  auto chart = bmi_line(b.build());
  CHECK(chart.kind == ChartKind::LINE);
  CHECK(bucket(chart, PC::CALCIUM, "22-23").y == 60.0);
  CHECK(bucket(chart, PC::IPH, "21-22").y == 20.0);
  CHECK_FALSE(bucket(chart, PC::IPH, "17-18").y);
  const auto& pts = chart.of(PC::IPH).points;
  CHECK(pts.size() == 13);
  CHECK(pts.front().x == 17.0);
  for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].x > pts[i - 1].x);
}

TEST_CASE("gender pies") {
  Builder b;
  b.add("M1", 60);
  b.size("M1", PC::CALCIUM, 50);
  b.size("M1", PC::FIBROUS, 20, 30);
  auto pies = gender_pies(b.build());
  REQUIRE(pies.size() == 2);
  CHECK(pies[0].group == "MALE");
  CHECK(pies[1].group == "FEMALE");
  CHECK(pies[0].of(PC::CALCIUM).points[0].y == 0.5);
  CHECK(pies[0].of(PC::FIBROUS).points[0].y == 0.5);
  CHECK(pies[0].of(PC::IPH).points[0].y == 0.0);
  for (const auto& s : pies[1].series) CHECK(s.points[0].y == 0.0);

  auto cohort = generate_synthetic_cohort({.seed = 4, .n_patients = 40});
  for (const auto& pie : gender_pies(cohort)) {
    double sum = 0;
    for (const auto& s : pie.series) sum += *s.points[0].y;
    CHECK(std::abs(sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("biomarker scatter") {
  Builder b;
  b.add("A", 60).bnp = 85;
  b.size("A", PC::IPH, 100, 40);
  b.size("A", PC::CALCIUM, 0);
  auto chart = biomarker_scatter(b.build(), Biomarker::BNP);
  REQUIRE(chart.of(PC::IPH).points.size() == 1);
  const auto& p = chart.of(PC::IPH).points[0];
  CHECK(p.x == 85.0);
  CHECK(p.y == 140.0);
  CHECK(p.patient_id == "A");
  CHECK(chart.of(PC::CALCIUM).points.empty());
  CHECK(parse_biomarker("tn") == Biomarker::TN);
  CHECK_FALSE(parse_biomarker("crp"));

  auto cohort = generate_synthetic_cohort({.seed = 7, .n_patients = 22});
  auto tn = biomarker_scatter(cohort, Biomarker::TN);
  std::size_t points = 0, expected = 0;
  for (const auto& s : tn.series) points += s.points.size();
  for (const auto& [id, pt] : cohort.patients())
    for (auto c : kAllComponents) expected += plaque_size(cohort, id, c) > 0;
  CHECK(points == expected);
}

TEST_CASE("planted BNP outliers stand beyond the 99th percentile") {
  auto cohort = generate_synthetic_cohort({.seed = 7, .n_patients = 22});
  std::vector<std::pair<double, std::string>> ranked;
  for (const auto& [id, p] : cohort.patients()) ranked.emplace_back(p.bnp, id);
  std::sort(ranked.rbegin(), ranked.rend());
  const std::string first = ranked[0].second, second = ranked[1].second;

  auto chart = biomarker_scatter(cohort, Biomarker::BNP);
  std::vector<double> planted, rest;
  for (const auto& s : chart.series)
    for (const auto& p : s.points)
      (p.patient_id == first || p.patient_id == second ? planted : rest).push_back(p.x);
  std::sort(rest.begin(), rest.end());
  const double pos = 0.99 * static_cast<double>(rest.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double p99 = rest[lo] + (pos - lo) * (rest[std::min(lo + 1, rest.size() - 1)] - rest[lo]);
  REQUIRE(planted.size() >= 2);
  for (double x : planted) CHECK(x > p99);
}

TEST_CASE("chronic stacks") {
  Builder b;
  auto& h = b.add("H", 60);
  h.htn = true;
  b.size("H", PC::IPH, 10);
  b.size("H", PC::CALCIUM, 0, 30);
  b.add("S1", 60).sm = true;
  b.add("S2", 60).sm = true;
  b.size("S1", PC::FIBROUS, 20);
  b.size("S2", PC::FIBROUS, 40);
  auto chart = chronic_stacks(b.build());
  CHECK(chart.kind == ChartKind::STACKED_BARS);
  CHECK(bucket(chart, PC::IPH, "HTN").y == 10.0);
  CHECK(bucket(chart, PC::IPH, "HTN").count == 1);
  CHECK(bucket(chart, PC::CALCIUM, "HTN").y == 30.0);
  CHECK(bucket(chart, PC::CALCIUM, "HTN").count == 1);
  CHECK(bucket(chart, PC::FIBROUS, "SM").y == 30.0);
  CHECK(bucket(chart, PC::FIBROUS, "SM").count == 2);
  for (auto c : kAllComponents) {
    CHECK(bucket(chart, c, "DM").y == 0.0);
    CHECK(bucket(chart, c, "DM").count == 0);
  }
}

TEST_CASE("fibrous mass dominates the young buckets of the synthetic cohort") {
  auto cohort = generate_synthetic_cohort({.seed = 7, .n_patients = 60});
  auto chart = age_stacked_area(cohort);
  for (std::string cat : {"30-40", "40-50"}) {
    double fib = *bucket(chart, PC::FIBROUS, cat).y;
    CAPTURE(cat);
    CHECK(fib > 0);
    for (auto c : {PC::IPH, PC::IPH_LIPID, PC::CALCIUM}) CHECK(fib > *bucket(chart, c, cat).y);
  }
}

TEST_CASE("stacked totals equal a direct recount") {
  auto cohort = generate_synthetic_cohort({.seed = 21, .n_patients = 80});
  auto chart = age_stacked_area(cohort);
  for (auto c : kAllComponents)
    for (const auto& pt : chart.of(c).points) {
      std::int64_t direct = 0;
      for (const auto& [key, n] : cohort.voxels()) {
        const auto& [id, side, comp] = key;
        if (comp != c) continue;
        int age = cohort.patient(id).age;
        std::string cat = age < 30 ? "<30" : age >= 90 ? ">=90"
                                                       : std::to_string(age / 10 * 10) + "-" +
                                                             std::to_string(age / 10 * 10 + 10);
        if (cat == pt.category) direct += n;
      }
      CHECK(*pt.y == static_cast<double>(direct));
    }
}

TEST_CASE("clinical views ignore patient order") {
  auto cohort = generate_synthetic_cohort({.seed = 13, .n_patients = 35});
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto other = permuted(cohort, seed);
    CHECK(age_stacked_area(other) == age_stacked_area(cohort));
    CHECK(bmi_line(other) == bmi_line(cohort));
    CHECK(gender_pies(other) == gender_pies(cohort));
    CHECK(biomarker_scatter(other, Biomarker::BNP) == biomarker_scatter(cohort, Biomarker::BNP));
    CHECK(biomarker_scatter(other, Biomarker::TN) == biomarker_scatter(cohort, Biomarker::TN));
    CHECK(chronic_stacks(other) == chronic_stacks(cohort));
  }
}

TEST_CASE("every series is tagged and colored") {
  auto cohort = generate_synthetic_cohort({.seed = 2});
  for (const auto& chart : {age_stacked_area(cohort), bmi_line(cohort), chronic_stacks(cohort)}) {
    REQUIRE(chart.series.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(chart.series[i].component == component_at(i));
  }
  CHECK(component_color(PC::IPH) == "#d62728");
  CHECK(component_color(PC::FIBROUS) != component_color(PC::CALCIUM));
}
