#include "plaqueva/cohort.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

namespace plaqueva {

std::string_view component_name(PlaqueComponent c) {
  switch (c) {
    case PlaqueComponent::IPH: return "IPH";
    case PlaqueComponent::IPH_LIPID: return "IPH_LIPID";
    case PlaqueComponent::CALCIUM: return "CALCIUM";
    case PlaqueComponent::FIBROUS: return "FIBROUS";
  }
  return "?";
}

std::string_view component_token(PlaqueComponent c) {
  switch (c) {
    case PlaqueComponent::IPH: return "IPH";
    case PlaqueComponent::IPH_LIPID: return "IPHL";
    case PlaqueComponent::CALCIUM: return "CA";
    case PlaqueComponent::FIBROUS: return "FIB";
  }
  return "?";
}

std::optional<PlaqueComponent> parse_component_name(std::string_view name) {
  for (auto c : kAllComponents)
    if (component_name(c) == name) return c;
  return std::nullopt;
}

std::optional<PlaqueComponent> parse_component_token(std::string_view token) {
  for (auto c : kAllComponents)
    if (component_token(c) == token) return c;
  return std::nullopt;
}

std::string_view side_name(Side s) { return s == Side::LEFT ? "LEFT" : "RIGHT"; }

std::string_view gender_name(Gender g) { return g == Gender::MALE ? "MALE" : "FEMALE"; }

std::string_view disease_name(Disease d) {
  switch (d) {
    case Disease::HTN: return "HTN";
    case Disease::DM: return "DM";
    case Disease::CI: return "CI";
    case Disease::SM: return "SM";
  }
  return "?";
}

std::optional<Date> parse_iso_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto number = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int v = 0;
    auto first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, v);
    if (ec != std::errc{} || ptr != first + len) return std::nullopt;
    return v;
  };
  auto y = number(0, 4), m = number(5, 2), d = number(8, 2);
  if (!y || !m || !d) return std::nullopt;
  Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
            std::chrono::day{static_cast<unsigned>(*d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_iso_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

bool PatientRecord::has(Disease d) const {
  switch (d) {
    case Disease::HTN: return htn;
    case Disease::DM: return dm;
    case Disease::CI: return ci;
    case Disease::SM: return sm;
  }
  return false;
}

void check_patient(const PatientRecord& p) {
  auto fail = [&](const std::string& what) {
    throw ValidationError("patient " + (p.patient_id.empty() ? "<empty>" : p.patient_id) + ": " +
                          what);
  };
  if (p.patient_id.empty()) fail("empty patient_id");
  if (p.age < 0 || p.age > 130) fail("age out of range [0, 130]");
  if (!(p.bmi > 10.0 && p.bmi < 60.0)) fail("bmi out of range (10, 60)");
  if (!std::isfinite(p.tn) || p.tn < 0.0) fail("tn must be finite and >= 0");
  if (!std::isfinite(p.bnp) || p.bnp < 0.0) fail("bnp must be finite and >= 0");
  if (p.admission_date && p.discharge_date &&
      std::chrono::sys_days{*p.admission_date} > std::chrono::sys_days{*p.discharge_date})
    fail("admission_date after discharge_date");
}

std::string make_sample_id(std::string_view patient_id, Side side, PlaqueComponent component) {
  std::string id{patient_id};
  id += '_';
  id += side_letter(side);
  id += '_';
  id += component_token(component);
  return id;
}

std::optional<SampleKey> parse_sample_id(std::string_view sample_id) {
  auto last = sample_id.rfind('_');
  if (last == std::string_view::npos || last == 0) return std::nullopt;
  auto mid = sample_id.rfind('_', last - 1);
  if (mid == std::string_view::npos || mid == 0) return std::nullopt;
  auto side_part = sample_id.substr(mid + 1, last - mid - 1);
  auto token = sample_id.substr(last + 1);
  auto component = parse_component_token(token);
  if (!component) return std::nullopt;
  Side side;
  if (side_part == "L")
    side = Side::LEFT;
  else if (side_part == "R")
    side = Side::RIGHT;
  else
    return std::nullopt;
  return SampleKey{std::string{sample_id.substr(0, mid)}, side, *component};
}

const PatientRecord& Cohort::patient(std::string_view patient_id) const {
  auto it = patients_.find(patient_id);
  if (it == patients_.end()) throw NotFoundError("unknown patient " + std::string{patient_id});
  return it->second;
}

bool Cohort::has_patient(std::string_view patient_id) const {
  return patients_.find(patient_id) != patients_.end();
}

std::int64_t Cohort::voxel_count(const std::string& patient_id, Side side,
                                 PlaqueComponent c) const {
  auto it = voxels_.find(VoxelKey{patient_id, side, c});
  return it == voxels_.end() ? 0 : it->second;
}

Cohort validate_cohort(std::vector<PatientRecord> patients, std::vector<PlaqueSample> samples,
                       std::vector<std::string> feature_names, VoxelCounts voxels) {
  Cohort cohort;
  for (auto& p : patients) {
    check_patient(p);
    auto id = p.patient_id;
    if (!cohort.patients_.emplace(id, std::move(p)).second)
      throw ValidationError("duplicate patient " + id);
  }

  std::set<std::string_view> names;
  for (std::size_t j = 0; j < feature_names.size(); ++j) {
    if (feature_names[j].empty())
      throw ValidationError("empty feature name at column " + std::to_string(j));
    if (!names.insert(feature_names[j]).second)
      throw ValidationError("duplicate feature name " + feature_names[j]);
  }

  const std::size_t dim = feature_names.size();
  std::set<std::string> ids;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!cohort.has_patient(s.patient_id))
      throw ValidationError("unknown patient " + s.patient_id + " in sample " + s.sample_id);
    if (s.sample_id != make_sample_id(s.patient_id, s.side, s.component))
      throw ValidationError("non-canonical sample id " + s.sample_id);
    // The canonical id encodes the (patient, side, component) triple, so id
    // uniqueness is triple uniqueness.
    if (!ids.insert(s.sample_id).second)
      throw ValidationError("duplicate sample_id " + s.sample_id);
    if (s.features.size() != dim)
      throw ValidationError("dimension mismatch in sample " + s.sample_id + ": " +
                            std::to_string(s.features.size()) + " features, expected " +
                            std::to_string(dim));
    for (std::size_t j = 0; j < dim; ++j)
      if (!std::isfinite(s.features[j]))
        throw ValidationError("non-finite feature " + feature_names[j] + " in sample " +
                              s.sample_id);
  }

  for (const auto& [key, count] : voxels) {
    const auto& pid = std::get<0>(key);
    if (!cohort.has_patient(pid)) throw ValidationError("unknown patient " + pid + " in voxels");
    if (count < 0) throw ValidationError("negative voxel count for patient " + pid);
  }

  cohort.samples_ = std::move(samples);
  cohort.feature_names_ = std::move(feature_names);
  cohort.voxels_ = std::move(voxels);
  return cohort;
}

std::int64_t plaque_size(const Cohort& cohort, std::string_view patient_id,
                         PlaqueComponent component) {
  const auto& p = cohort.patient(patient_id);
  std::int64_t total = 0;
  for (auto side : kAllSides) total += cohort.voxel_count(p.patient_id, side, component);
  return total;
}

}  // namespace plaqueva
