#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "plaqueva/cohort.hpp"

namespace plaqueva {

struct LoadedCohort {
  Cohort cohort;
  std::vector<std::string> warnings;
};

/// Reads <dir>/clinical.csv, <dir>/radiomics.csv and <dir>/volumes/*.lvol
/// (named <patient>_<L|R>.lvol). Missing volumes yield zero counts and a
/// warning. Any other problem throws Error prefixed with the offending file.
LoadedCohort load_cohort_dir(const std::filesystem::path& dir);

/// Writes the three inputs of a cohort directory. Volumes are synthesized
/// from the cohort's voxel counts.
void write_cohort_dir(const Cohort& cohort, const std::filesystem::path& dir,
                      std::uint64_t seed = 0);

/// FNV-1a over a canonical serialization of the cohort.
std::uint64_t cohort_fingerprint(const Cohort& cohort);

}  // namespace plaqueva
