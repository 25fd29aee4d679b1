#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plaqueva/cohort.hpp"

namespace plaqueva {

// ---------------------------------------------------------------------------
// Clinical CSV
// ---------------------------------------------------------------------------

/// Exact, ordered header of the clinical CSV.
inline constexpr std::array<std::string_view, 16> kClinicalColumns = {
    "patient_id", "age", "gender", "bmi", "htn", "dm", "ci", "sm", "tn", "bnp",
    "admission_date", "discharge_date", "surgery_date", "plaque_location", "surgical_method",
    "symptoms"};

/// One PatientRecord per data row. Booleans are "0"/"1", gender "M"/"F",
/// decimals use '.', dates are YYYY-MM-DD, symptoms are ';'-separated.
/// Empty optional cells (dates, free text) map to absent values.
std::vector<PatientRecord> parse_clinical_csv(std::string_view text);
std::string serialize_clinical_csv(const Cohort& cohort);

// ---------------------------------------------------------------------------
// Radiomics CSV (features as rows, samples as columns)
// ---------------------------------------------------------------------------

struct RadiomicsTable {
  std::vector<std::string> feature_names;
  std::vector<PlaqueSample> samples;
};

RadiomicsTable parse_radiomics_csv(std::string_view text);
/// Cells are written with 17 significant digits so parsing is cell-exact.
std::string serialize_radiomics_csv(const Cohort& cohort);

// ---------------------------------------------------------------------------
// LVOL1 label volumes
// ---------------------------------------------------------------------------

struct LabelVolume {
  std::array<std::size_t, 3> dims{};  // nx, ny, nz
  std::array<double, 3> spacing{};    // mm
  std::vector<std::uint8_t> labels;   // x-fastest, 0 = background, 1..4 component codes

  std::size_t voxel_total() const { return dims[0] * dims[1] * dims[2]; }
};

LabelVolume parse_label_volume(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_label_volume(const LabelVolume& volume);

/// Per-component voxel counts of one volume, keyed for (patient_id, side).
/// Background voxels are not keyed; components with no voxels are keyed with 0.
VoxelCounts count_voxels(const LabelVolume& volume, const std::string& patient_id, Side side);

/// Builds a volume holding exactly the given per-component counts, with the
/// labelled voxels scattered by a seeded shuffle.
LabelVolume make_label_volume(const std::array<std::int64_t, kNumComponents>& counts,
                              std::uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic cohorts
// ---------------------------------------------------------------------------

struct SyntheticSpec {
  std::uint64_t seed = 7;
  int n_patients = 22;
  int d_features = 20;
  double separation = 3.0;
  /// When > 0, the total radiomic sample count is exactly this value.
  int n_samples = 0;
};

/// Number of leading features whose class means differ (min(3, D)).
std::size_t discriminative_feature_count(const SyntheticSpec& spec);

/// Deterministic cohort for a seed. Planted structure:
///  - class means sit at ±separation on the first min(3, D) features
///    (CALCIUM is + on all of them); remaining features are pure noise
///  - smokers' samples have feature 0 shifted by +separation/2
///  - patients aged 31..50 carry five times the FIBROUS volume
///  - the first two patients have BNP far above every other patient
Cohort generate_synthetic_cohort(const SyntheticSpec& spec);

}  // namespace plaqueva
