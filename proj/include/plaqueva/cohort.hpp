#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "plaqueva/errors.hpp"

namespace plaqueva {

// Codes 1..4 are the label values used by LVOL1 volumes.
enum class PlaqueComponent : std::uint8_t { IPH = 1, IPH_LIPID = 2, CALCIUM = 3, FIBROUS = 4 };

inline constexpr std::size_t kNumComponents = 4;
inline constexpr std::array<PlaqueComponent, kNumComponents> kAllComponents = {
    PlaqueComponent::IPH, PlaqueComponent::IPH_LIPID, PlaqueComponent::CALCIUM,
    PlaqueComponent::FIBROUS};

/// Zero-based position of a component (code - 1).
constexpr std::size_t index_of(PlaqueComponent c) { return static_cast<std::size_t>(c) - 1; }
constexpr PlaqueComponent component_at(std::size_t index) {
  return static_cast<PlaqueComponent>(index + 1);
}

/// "IPH", "IPH_LIPID", "CALCIUM", "FIBROUS".
std::string_view component_name(PlaqueComponent c);
/// Short token used inside sample ids: IPH, IPHL, CA, FIB.
std::string_view component_token(PlaqueComponent c);
std::optional<PlaqueComponent> parse_component_name(std::string_view name);
std::optional<PlaqueComponent> parse_component_token(std::string_view token);

enum class Side : std::uint8_t { LEFT, RIGHT };
inline constexpr std::array<Side, 2> kAllSides = {Side::LEFT, Side::RIGHT};

constexpr char side_letter(Side s) { return s == Side::LEFT ? 'L' : 'R'; }
std::string_view side_name(Side s);

enum class Gender : std::uint8_t { MALE, FEMALE };
std::string_view gender_name(Gender g);

enum class Disease : std::uint8_t { HTN, DM, CI, SM };
inline constexpr std::array<Disease, 4> kAllDiseases = {Disease::HTN, Disease::DM, Disease::CI,
                                                        Disease::SM};
std::string_view disease_name(Disease d);

using Date = std::chrono::year_month_day;

/// Parses a strict YYYY-MM-DD calendar date.
std::optional<Date> parse_iso_date(std::string_view text);
std::string format_iso_date(const Date& d);

struct PatientRecord {
  std::string patient_id;
  int age = 0;
  Gender gender = Gender::MALE;
  double bmi = 0.0;
  bool htn = false;
  bool dm = false;
  bool ci = false;
  bool sm = false;
  double tn = 0.0;   // ng/mL
  double bnp = 0.0;  // pg/mL
  std::optional<Date> admission_date;
  std::optional<Date> discharge_date;
  std::optional<Date> surgery_date;
  std::string plaque_location;
  std::string surgical_method;
  std::vector<std::string> symptoms;

  bool has(Disease d) const;

  friend bool operator==(const PatientRecord&, const PatientRecord&) = default;
};

/// Throws ValidationError when a field invariant of the record is broken.
void check_patient(const PatientRecord& p);

struct PlaqueSample {
  std::string sample_id;
  std::string patient_id;
  Side side = Side::LEFT;
  PlaqueComponent component = PlaqueComponent::IPH;
  std::vector<double> features;

  friend bool operator==(const PlaqueSample&, const PlaqueSample&) = default;
};

/// "<patient>_<L|R>_<TOKEN>".
std::string make_sample_id(std::string_view patient_id, Side side, PlaqueComponent component);

struct SampleKey {
  std::string patient_id;
  Side side;
  PlaqueComponent component;
};

/// Splits a canonical sample id. The patient part may itself contain '_';
/// the side and component are the last two tokens.
std::optional<SampleKey> parse_sample_id(std::string_view sample_id);

using VoxelKey = std::tuple<std::string, Side, PlaqueComponent>;
using VoxelCounts = std::map<VoxelKey, std::int64_t>;

/// Validated, immutable join of clinical records, radiomic samples and voxel
/// counts. Construct through validate_cohort().
class Cohort {
 public:
  Cohort() = default;

  const std::map<std::string, PatientRecord, std::less<>>& patients() const noexcept { return patients_; }
  const std::vector<PlaqueSample>& samples() const noexcept { return samples_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const VoxelCounts& voxels() const noexcept { return voxels_; }

  std::size_t dimension() const noexcept { return feature_names_.size(); }
  const PatientRecord& patient(std::string_view patient_id) const;
  bool has_patient(std::string_view patient_id) const;

  /// Voxel count for one side, 0 when absent.
  std::int64_t voxel_count(const std::string& patient_id, Side side, PlaqueComponent c) const;

  friend Cohort validate_cohort(std::vector<PatientRecord> patients,
                                std::vector<PlaqueSample> samples,
                                std::vector<std::string> feature_names, VoxelCounts voxels);

 private:
  std::map<std::string, PatientRecord, std::less<>> patients_;
  std::vector<PlaqueSample> samples_;
  std::vector<std::string> feature_names_;
  VoxelCounts voxels_;
};

/// Checks every cohort invariant and returns the immutable cohort.
/// Throws ValidationError naming the offending row or column.
Cohort validate_cohort(std::vector<PatientRecord> patients, std::vector<PlaqueSample> samples,
                       std::vector<std::string> feature_names, VoxelCounts voxels);

/// Left + right voxel count of a component. Throws NotFoundError for an
/// unknown patient.
std::int64_t plaque_size(const Cohort& cohort, std::string_view patient_id,
                         PlaqueComponent component);

}  // namespace plaqueva
