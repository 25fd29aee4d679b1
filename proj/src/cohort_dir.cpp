#include "plaqueva/cohort_dir.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>

#include "plaqueva/ingestion.hpp"

namespace plaqueva {
namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

std::string diagnostic(const fs::path& file, const std::exception& e) {
  if (auto* pe = dynamic_cast<const ParseError*>(&e); pe && pe->row() > 0)
    return file.string() + ":" + std::to_string(pe->row()) + ": " + e.what();
  return file.string() + ": " + e.what();
}

}  // namespace

LoadedCohort load_cohort_dir(const fs::path& dir) {
  const auto clinical_path = dir / "clinical.csv";
  const auto radiomics_path = dir / "radiomics.csv";
  const auto volumes_dir = dir / "volumes";
  if (!fs::is_directory(dir)) throw Error("cohort directory " + dir.string() + " not found");
  for (const auto& p : {clinical_path, radiomics_path})
    if (!fs::is_regular_file(p)) throw Error("missing cohort file " + p.string());
  if (!fs::is_directory(volumes_dir))
    throw Error("missing cohort directory " + volumes_dir.string());

  std::vector<PatientRecord> patients;
  try {
    patients = parse_clinical_csv(read_text(clinical_path));
  } catch (const Error& e) {
    throw Error(diagnostic(clinical_path, e));
  }
  RadiomicsTable table;
  try {
    table = parse_radiomics_csv(read_text(radiomics_path));
  } catch (const Error& e) {
    throw Error(diagnostic(radiomics_path, e));
  }

  std::set<std::string> known;
  for (const auto& p : patients) known.insert(p.patient_id);

  VoxelCounts voxels;
  std::set<std::pair<std::string, Side>> loaded;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(volumes_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".lvol") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  for (const auto& file : files) {
    auto stem = file.stem().string();
    if (stem.size() < 3 || stem[stem.size() - 2] != '_' ||
        (stem.back() != 'L' && stem.back() != 'R'))
      throw Error(file.string() + ": volume file name must be <patient>_<L|R>.lvol");
    auto patient_id = stem.substr(0, stem.size() - 2);
    auto side = stem.back() == 'L' ? Side::LEFT : Side::RIGHT;
    if (!known.count(patient_id))
      throw Error(file.string() + ": unknown patient " + patient_id);
    try {
      auto bytes = read_bytes(file);
      auto counts = count_voxels(parse_label_volume(bytes), patient_id, side);
      for (auto& [key, n] : counts)
        if (n > 0) voxels[key] = n;
    } catch (const Error& e) {
      throw Error(diagnostic(file, e));
    }
    loaded.emplace(patient_id, side);
  }

  LoadedCohort out;
  std::vector<std::string> missing;
  for (const auto& id : known)
    for (auto side : kAllSides)
      if (!loaded.count({id, side})) missing.push_back(id + "_" + side_letter(side));
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 8; ++i) list += (i ? ", " : "") + missing[i];
    if (missing.size() > 8) list += ", ...";
    out.warnings.push_back(std::to_string(missing.size()) + " of " +
                           std::to_string(2 * known.size()) +
                           " patient-side volumes missing; voxel counts set to 0 (" + list + ")");
  }

  try {
    out.cohort = validate_cohort(std::move(patients), std::move(table.samples),
                                 std::move(table.feature_names), std::move(voxels));
  } catch (const Error& e) {
    throw Error(dir.string() + ": " + e.what());
  }
  return out;
}

void write_cohort_dir(const Cohort& cohort, const fs::path& dir, std::uint64_t seed) {
  fs::create_directories(dir / "volumes");
  write_file(dir / "clinical.csv", serialize_clinical_csv(cohort));
  write_file(dir / "radiomics.csv", serialize_radiomics_csv(cohort));
  std::uint64_t stream = 0;
  for (const auto& [id, p] : cohort.patients()) {
    for (auto side : kAllSides) {
      std::array<std::int64_t, kNumComponents> counts{};
      for (auto c : kAllComponents) counts[index_of(c)] = cohort.voxel_count(id, side, c);
      auto bytes = serialize_label_volume(make_label_volume(counts, seed + ++stream));
      write_file(dir / "volumes" / (id + "_" + side_letter(side) + ".lvol"),
                 std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    }
  }
}

std::uint64_t cohort_fingerprint(const Cohort& cohort) {
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&](std::string_view s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  };
  feed(serialize_clinical_csv(cohort));
  feed(serialize_radiomics_csv(cohort));
  for (const auto& [key, n] : cohort.voxels()) {
    const auto& [id, side, c] = key;
    feed(id + "_" + side_letter(side) + "_" + std::string{component_token(c)} + "=" +
         std::to_string(n));
  }
  return h;
}

}  // namespace plaqueva
