#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "plaqueva/cohort.hpp"
#include "plaqueva/errors.hpp"

using namespace plaqueva;
using PC = PlaqueComponent;

namespace {

PatientRecord patient(const std::string& id) {
  PatientRecord p;
  p.patient_id = id;
  p.age = 60;
  p.bmi = 24;
  return p;
}

PlaqueSample sample(const std::string& pid, Side side, PC c, std::vector<double> f) {
  return {make_sample_id(pid, side, c), pid, side, c, std::move(f)};
}

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

struct Parts {
  std::vector<PatientRecord> patients;
  std::vector<PlaqueSample> samples;
  std::vector<std::string> features;
  VoxelCounts voxels;
};

// Reference acceptance rule, written against the raw parts.
bool acceptable(const Parts& p) {
  std::set<std::string> ids;
  for (const auto& r : p.patients)
    if (!ids.insert(r.patient_id).second) return false;
  std::set<std::string> names;
  for (const auto& f : p.features)
    if (f.empty() || !names.insert(f).second) return false;
  std::set<std::string> sids;
  for (const auto& s : p.samples) {
    if (!ids.count(s.patient_id)) return false;
    if (s.sample_id != make_sample_id(s.patient_id, s.side, s.component)) return false;
    if (!sids.insert(s.sample_id).second) return false;
    if (s.features.size() != p.features.size()) return false;
    for (double v : s.features)
      if (!std::isfinite(v)) return false;
  }
  for (const auto& [key, n] : p.voxels)
    if (!ids.count(std::get<0>(key)) || n < 0) return false;
  return true;
}

}  // namespace

TEST_CASE("validate_cohort examples") {
  std::vector<PatientRecord> ps = {patient("P1"), patient("P2")};
  std::vector<std::string> names = {"a", "b", "c", "d", "e"};
  std::vector<PlaqueSample> ss = {sample("P1", Side::LEFT, PC::IPH, {1, 2, 3, 4, 5}),
                                  sample("P1", Side::RIGHT, PC::CALCIUM, {1, 2, 3, 4, 5}),
                                  sample("P2", Side::LEFT, PC::FIBROUS, {1, 2, 3, 4, 5})};
  auto cohort = validate_cohort(ps, ss, names, {});
  CHECK(cohort.patients().size() == 2);
  CHECK(cohort.samples() == ss);
  CHECK(cohort.dimension() == 5);

  auto dangling = ss;
  dangling.push_back(sample("P9", Side::LEFT, PC::IPH, {1, 2, 3, 4, 5}));
  CHECK(error_of([&] { validate_cohort(ps, dangling, names, {}); }).find("unknown patient P9") !=
        std::string::npos);

  auto short_row = ss;
  short_row[1].features.pop_back();
  CHECK(error_of([&] { validate_cohort(ps, short_row, names, {}); }).find("dimension mismatch") !=
        std::string::npos);

  auto dup = ss;
  dup.push_back(ss[0]);
  CHECK(error_of([&] { validate_cohort(ps, dup, names, {}); }).find("duplicate sample_id") !=
        std::string::npos);

  auto nan = ss;
  nan[2].features[3] = std::nan("");
  auto msg = error_of([&] { validate_cohort(ps, nan, names, {}); });
  CHECK(msg.find("non-finite") != std::string::npos);
  CHECK(msg.find("d") != std::string::npos);
}

TEST_CASE("patient lookups") {
  VoxelCounts v = {{{"P1", Side::LEFT, PC::IPH}, 100}, {{"P1", Side::RIGHT, PC::IPH}, 40}};
  auto cohort = validate_cohort({patient("P1")}, {}, {"f"}, v);
  CHECK(cohort.patient("P1").age == 60);
  CHECK(cohort.has_patient("P1"));
  CHECK_FALSE(cohort.has_patient("P2"));
  CHECK_THROWS_AS(cohort.patient("ZZZ"), NotFoundError);
  CHECK(cohort.voxel_count("P1", Side::LEFT, PC::IPH) == 100);
  CHECK(cohort.voxel_count("P1", Side::LEFT, PC::FIBROUS) == 0);
  CHECK(plaque_size(cohort, "P1", PC::IPH) == 140);
  CHECK(plaque_size(cohort, "P1", PC::CALCIUM) == 0);
  CHECK_THROWS_AS(plaque_size(cohort, "ZZZ", PC::IPH), NotFoundError);

  VoxelCounts neg = {{{"P1", Side::LEFT, PC::IPH}, -1}};
  CHECK_THROWS_AS(validate_cohort({patient("P1")}, {}, {"f"}, neg), ValidationError);
  VoxelCounts ghost = {{{"P7", Side::LEFT, PC::IPH}, 3}};
  CHECK_THROWS_AS(validate_cohort({patient("P1")}, {}, {"f"}, ghost), ValidationError);
}

TEST_CASE("patient record checks") {
  auto p = patient("X");
  CHECK_NOTHROW(check_patient(p));
  p.age = 131;
  CHECK_THROWS_AS(check_patient(p), ValidationError);
  p = patient("X");
  p.bmi = 0;
  CHECK_THROWS_AS(check_patient(p), ValidationError);
  p = patient("X");
  p.bnp = -1;
  CHECK_THROWS_AS(check_patient(p), ValidationError);
  p = patient("X");
  p.admission_date = parse_iso_date("2023-02-01");
  p.discharge_date = parse_iso_date("2023-01-01");
  CHECK_THROWS_AS(check_patient(p), ValidationError);
  CHECK_THROWS_AS(validate_cohort({patient("A"), patient("A")}, {}, {"f"}, {}), ValidationError);
  CHECK_THROWS_AS(validate_cohort({patient("A")}, {}, {"f", "f"}, {}), ValidationError);
}

TEST_CASE("sample ids") {
  CHECK(make_sample_id("P01", Side::LEFT, PC::IPH) == "P01_L_IPH");
  CHECK(make_sample_id("P01", Side::RIGHT, PC::IPH_LIPID) == "P01_R_IPHL");
  CHECK(make_sample_id("P01", Side::RIGHT, PC::CALCIUM) == "P01_R_CA");
  CHECK(make_sample_id("P01", Side::LEFT, PC::FIBROUS) == "P01_L_FIB");
  auto key = parse_sample_id("site_3_P01_L_IPH");
  REQUIRE(key);
  CHECK(key->patient_id == "site_3_P01");
  CHECK(key->side == Side::LEFT);
  CHECK(key->component == PC::IPH);
  CHECK_FALSE(parse_sample_id("P01-IPH"));
  CHECK_FALSE(parse_sample_id("P01_X_IPH"));
  CHECK_FALSE(parse_sample_id("P01_L_BONE"));
  CHECK_FALSE(parse_sample_id("_L_IPH"));
  for (auto c : kAllComponents) {
    CHECK(parse_component_token(component_token(c)) == c);
    CHECK(parse_component_name(component_name(c)) == c);
    CHECK(component_at(index_of(c)) == c);
  }
}

TEST_CASE("iso dates") {
  auto d = parse_iso_date("2023-01-03");
  REQUIRE(d);
  CHECK(format_iso_date(*d) == "2023-01-03");
  CHECK_FALSE(parse_iso_date("2023-02-30"));
  CHECK_FALSE(parse_iso_date("2023-1-03"));
  CHECK_FALSE(parse_iso_date("03/01/2023"));
  CHECK_FALSE(parse_iso_date(""));
}

TEST_CASE("fuzzed raw parts are accepted exactly when valid") {
  std::mt19937_64 rng(17);
  auto coin = [&](int percent) { return static_cast<int>(rng() % 100) < percent; };
  int accepted = 0, rejected = 0;
  for (int t = 0; t < 600; ++t) {
    Parts p;
    const int np = 1 + rng() % 4, d = 1 + rng() % 4;
    for (int i = 0; i < np; ++i) p.patients.push_back(patient("P" + std::to_string(coin(8) ? 0 : i)));
    for (int j = 0; j < d; ++j) p.features.push_back(coin(4) ? "" : "f" + std::to_string(coin(5) ? 0 : j));
    const int ns = rng() % 6;
    for (int s = 0; s < ns; ++s) {
      std::string pid = "P" + std::to_string(rng() % (np + (coin(10) ? 2 : 0)));
      auto side = coin(50) ? Side::LEFT : Side::RIGHT;
      auto comp = component_at(rng() % 4);
      std::vector<double> f(d + (coin(6) ? 1 : 0), 1.5);
      if (coin(5)) f[0] = coin(50) ? INFINITY : NAN;
      PlaqueSample smp{make_sample_id(pid, side, comp), pid, side, comp, f};
      if (coin(4)) smp.sample_id += "x";
      p.samples.push_back(smp);
    }
    if (coin(30)) {
      std::string pid = "P" + std::to_string(rng() % (np + 1));
      p.voxels[{pid, Side::LEFT, PC::CALCIUM}] = coin(10) ? -4 : 12;
    }
    const bool expect = acceptable(p);
    bool ok = true;
    try {
      auto c = validate_cohort(p.patients, p.samples, p.features, p.voxels);
      CHECK(c.samples() == p.samples);
      for (const auto& s : c.samples()) {
        CHECK(c.has_patient(s.patient_id));
        CHECK(s.features.size() == c.dimension());
      }
    } catch (const ValidationError&) {
      ok = false;
    }
    CHECK(ok == expect);
    (ok ? accepted : rejected)++;
  }
  CHECK(accepted > 50);
  CHECK(rejected > 50);
}
