#include "plaqueva/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "plaqueva/csv.hpp"

namespace plaqueva {
namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
std::optional<T> parse_number(std::string_view cell) {
  cell = csv::trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  T value{};
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

class ClinicalRow {
 public:
  ClinicalRow(const csv::Row& row, const std::map<std::string_view, std::size_t>& index)
      : row_(row), index_(index) {}

  std::string_view cell(std::string_view column) const {
    auto pos = index_.at(column);
    if (pos >= row_.cells.size()) return {};
    return csv::trim(row_.cells[pos]);
  }

  [[noreturn]] void fail(std::string_view column, std::string_view why) const {
    throw ParseError("row " + std::to_string(row_.line) + ", column " + std::string{column} +
                         ": " + std::string{why} + " '" + std::string{cell(column)} + "'",
                     row_.line, std::string{column});
  }

  template <typename T>
  T number(std::string_view column) const {
    auto v = parse_number<T>(cell(column));
    if (!v) fail(column, "cannot parse number");
    return *v;
  }

  bool flag(std::string_view column) const {
    auto c = cell(column);
    if (c == "1") return true;
    if (c == "0") return false;
    fail(column, "expected 0 or 1, got");
  }

  std::optional<Date> date(std::string_view column) const {
    auto c = cell(column);
    if (c.empty()) return std::nullopt;
    auto d = parse_iso_date(c);
    if (!d) fail(column, "cannot parse ISO-8601 date");
    return d;
  }

 private:
  const csv::Row& row_;
  const std::map<std::string_view, std::size_t>& index_;
};

}  // namespace

std::vector<PatientRecord> parse_clinical_csv(std::string_view text) {
  auto rows = csv::read(text);
  if (rows.empty()) throw ParseError("clinical csv: missing header row", 1);

  std::map<std::string_view, std::size_t> index;
  const auto& header = rows.front();
  for (auto column : kClinicalColumns) {
    auto it = std::find_if(header.cells.begin(), header.cells.end(),
                           [&](const std::string& h) { return csv::trim(h) == column; });
    if (it == header.cells.end())
      throw ParseError("missing column " + std::string{column}, header.line, std::string{column});
    index[column] = static_cast<std::size_t>(it - header.cells.begin());
  }

  std::vector<PatientRecord> out;
  std::set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    ClinicalRow row(rows[r], index);
    if (rows[r].cells.size() != header.cells.size())
      throw ParseError("row " + std::to_string(rows[r].line) + ": expected " +
                           std::to_string(header.cells.size()) + " cells, got " +
                           std::to_string(rows[r].cells.size()),
                       rows[r].line);

    PatientRecord p;
    p.patient_id = std::string{row.cell("patient_id")};
    if (p.patient_id.empty()) row.fail("patient_id", "empty patient id");
    if (!seen.insert(p.patient_id).second) row.fail("patient_id", "duplicate patient_id");

    p.age = row.number<int>("age");
    auto g = row.cell("gender");
    if (g == "M" || g == "m" || g == "MALE")
      p.gender = Gender::MALE;
    else if (g == "F" || g == "f" || g == "FEMALE")
      p.gender = Gender::FEMALE;
    else
      row.fail("gender", "unknown gender");
    p.bmi = row.number<double>("bmi");
    p.htn = row.flag("htn");
    p.dm = row.flag("dm");
    p.ci = row.flag("ci");
    p.sm = row.flag("sm");
    p.tn = row.number<double>("tn");
    p.bnp = row.number<double>("bnp");
    p.admission_date = row.date("admission_date");
    p.discharge_date = row.date("discharge_date");
    p.surgery_date = row.date("surgery_date");
    p.plaque_location = std::string{row.cell("plaque_location")};
    p.surgical_method = std::string{row.cell("surgical_method")};

    auto symptoms = row.cell("symptoms");
    std::size_t start = 0;
    while (start <= symptoms.size()) {
      auto end = symptoms.find(';', start);
      if (end == std::string_view::npos) end = symptoms.size();
      auto item = csv::trim(symptoms.substr(start, end - start));
      if (!item.empty()) p.symptoms.emplace_back(item);
      start = end + 1;
    }

    try {
      check_patient(p);
    } catch (const ValidationError& e) {
      throw ParseError("row " + std::to_string(rows[r].line) + ": " + e.what(), rows[r].line);
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string serialize_clinical_csv(const Cohort& cohort) {
  std::string out;
  {
    std::vector<std::string> header(kClinicalColumns.begin(), kClinicalColumns.end());
    out += csv::join(header) + "\n";
  }
  auto date = [](const std::optional<Date>& d) { return d ? format_iso_date(*d) : std::string{}; };
  for (const auto& [id, p] : cohort.patients()) {
    std::string symptoms;
    for (std::size_t i = 0; i < p.symptoms.size(); ++i) {
      if (i) symptoms += ';';
      symptoms += p.symptoms[i];
    }
    out += csv::join({p.patient_id, std::to_string(p.age), p.gender == Gender::MALE ? "M" : "F",
                      format_double(p.bmi), p.htn ? "1" : "0", p.dm ? "1" : "0",
                      p.ci ? "1" : "0", p.sm ? "1" : "0", format_double(p.tn),
                      format_double(p.bnp), date(p.admission_date), date(p.discharge_date),
                      date(p.surgery_date), p.plaque_location, p.surgical_method, symptoms});
    out += "\n";
  }
  return out;
}

RadiomicsTable parse_radiomics_csv(std::string_view text) {
  auto rows = csv::read(text);
  if (rows.empty()) throw ParseError("radiomics csv: missing header row", 1);
  const auto& header = rows.front();
  if (header.cells.empty() || csv::trim(header.cells[0]) != "feature")
    throw ParseError("radiomics csv: first header cell must be 'feature'", header.line, "feature");

  RadiomicsTable table;
  std::set<std::string> ids;
  for (std::size_t j = 1; j < header.cells.size(); ++j) {
    std::string id{csv::trim(header.cells[j])};
    auto key = parse_sample_id(id);
    if (!key) throw ParseError("malformed sample id " + id, header.line, id);
    if (!ids.insert(id).second) throw ParseError("duplicate sample id " + id, header.line, id);
    PlaqueSample s;
    s.sample_id = std::move(id);
    s.patient_id = key->patient_id;
    s.side = key->side;
    s.component = key->component;
    table.samples.push_back(std::move(s));
  }

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.cells.size() != header.cells.size())
      throw ParseError("row " + std::to_string(row.line) + ": ragged row with " +
                           std::to_string(row.cells.size()) + " cells, expected " +
                           std::to_string(header.cells.size()),
                       row.line);
    std::string name{csv::trim(row.cells[0])};
    for (std::size_t j = 1; j < row.cells.size(); ++j) {
      auto v = parse_number<double>(row.cells[j]);
      if (!v)
        throw ParseError("row " + std::to_string(row.line) + ", column " +
                             table.samples[j - 1].sample_id + ": non-numeric cell '" +
                             row.cells[j] + "'",
                         row.line, table.samples[j - 1].sample_id);
      table.samples[j - 1].features.push_back(*v);
    }
    table.feature_names.push_back(std::move(name));
  }
  return table;
}

std::string serialize_radiomics_csv(const Cohort& cohort) {
  std::vector<std::string> cells{"feature"};
  for (const auto& s : cohort.samples()) cells.push_back(s.sample_id);
  std::string out = csv::join(cells) + "\n";
  for (std::size_t j = 0; j < cohort.dimension(); ++j) {
    cells.assign(1, cohort.feature_names()[j]);
    for (const auto& s : cohort.samples()) cells.push_back(format_double(s.features[j]));
    out += csv::join(cells) + "\n";
  }
  return out;
}

LabelVolume parse_label_volume(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto next_line = [&]() -> std::string {
    auto begin = pos;
    while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    if (pos >= bytes.size()) throw ParseError("LVOL1: truncated header");
    std::string line(reinterpret_cast<const char*>(bytes.data()) + begin, pos - begin);
    ++pos;
    return line;
  };

  if (next_line() != "LVOL1") throw ParseError("LVOL1: bad magic", 1);

  LabelVolume vol;
  {
    std::istringstream in(next_line());
    std::string tag;
    long long nx = 0, ny = 0, nz = 0;
    if (!(in >> tag >> nx >> ny >> nz) || tag != "dims" || nx <= 0 || ny <= 0 || nz <= 0)
      throw ParseError("LVOL1: malformed dims line", 2);
    vol.dims = {static_cast<std::size_t>(nx), static_cast<std::size_t>(ny),
                static_cast<std::size_t>(nz)};
  }
  {
    auto line = next_line();
    std::istringstream in(line);
    in.imbue(std::locale::classic());
    std::string tag;
    if (!(in >> tag >> vol.spacing[0] >> vol.spacing[1] >> vol.spacing[2]) || tag != "spacing" ||
        !(vol.spacing[0] > 0 && vol.spacing[1] > 0 && vol.spacing[2] > 0))
      throw ParseError("LVOL1: malformed spacing line", 3);
  }
  if (next_line() != "data raw-u8") throw ParseError("LVOL1: expected 'data raw-u8'", 4);

  auto payload = bytes.subspan(pos);
  if (payload.size() != vol.voxel_total())
    throw ParseError("LVOL1: payload length " + std::to_string(payload.size()) +
                     " does not match dims product " + std::to_string(vol.voxel_total()));
  for (std::size_t i = 0; i < payload.size(); ++i)
    if (payload[i] > kNumComponents)
      throw ParseError("LVOL1: invalid label " + std::to_string(payload[i]) + " at voxel " +
                       std::to_string(i));
  vol.labels.assign(payload.begin(), payload.end());
  return vol;
}

std::vector<std::uint8_t> serialize_label_volume(const LabelVolume& volume) {
  std::ostringstream head;
  head.imbue(std::locale::classic());
  head.precision(17);
  head << "LVOL1\n"
       << "dims " << volume.dims[0] << ' ' << volume.dims[1] << ' ' << volume.dims[2] << '\n'
       << "spacing " << volume.spacing[0] << ' ' << volume.spacing[1] << ' ' << volume.spacing[2]
       << '\n'
       << "data raw-u8\n";
  auto text = head.str();
  std::vector<std::uint8_t> out(text.begin(), text.end());
  out.insert(out.end(), volume.labels.begin(), volume.labels.end());
  return out;
}

VoxelCounts count_voxels(const LabelVolume& volume, const std::string& patient_id, Side side) {
  std::array<std::int64_t, kNumComponents + 1> tally{};
  for (auto label : volume.labels) ++tally[label];
  VoxelCounts out;
  for (auto c : kAllComponents) out[{patient_id, side, c}] = tally[static_cast<std::size_t>(c)];
  return out;
}

LabelVolume make_label_volume(const std::array<std::int64_t, kNumComponents>& counts,
                              std::uint64_t seed) {
  const std::int64_t labelled = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  LabelVolume vol;
  constexpr std::size_t plane = 16 * 16;
  // Leave at least half the volume as background.
  std::size_t nz = std::max<std::size_t>(1, (2 * static_cast<std::size_t>(labelled) + plane - 1) / plane);
  vol.dims = {16, 16, nz};
  vol.spacing = {0.5, 0.5, 0.625};
  vol.labels.assign(vol.voxel_total(), 0);
  std::size_t pos = 0;
  for (auto c : kAllComponents)
    for (std::int64_t i = 0; i < counts[index_of(c)]; ++i)
      vol.labels[pos++] = static_cast<std::uint8_t>(c);
  std::mt19937_64 rng(seed);
  std::shuffle(vol.labels.begin(), vol.labels.end(), rng);
  return vol;
}

}  // namespace plaqueva
