#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "plaqueva/ingestion.hpp"

namespace plaqueva {
namespace {

constexpr std::array<std::string_view, 24> kFeatureStems = {
    "orig_glrlm_RLNU",       "orig_firstorder_Mean",   "orig_glcm_Contrast",
    "orig_shape_Sphericity", "orig_glszm_ZoneEntropy", "orig_firstorder_Energy",
    "orig_glcm_Correlation", "orig_gldm_DNU",          "orig_firstorder_Kurtosis",
    "orig_glrlm_GLNU",       "orig_shape_Elongation",  "orig_ngtdm_Coarseness",
    "orig_firstorder_Skewness", "orig_glcm_JointEnergy", "orig_glszm_SAE",
    "orig_gldm_LDE",         "orig_firstorder_Range",  "orig_glcm_Idm",
    "orig_glrlm_RP",         "orig_shape_MeshVolume",  "orig_ngtdm_Busyness",
    "orig_glszm_LAHGLE",     "orig_firstorder_Entropy", "orig_gldm_SDE"};

// Sign of each component's class mean on the discriminative features.
// CALCIUM sits high on all of them.
constexpr std::array<std::array<int, 3>, kNumComponents> kMeanSigns = {{
    {-1, +1, -1},  // IPH
    {+1, -1, -1},  // IPH_LIPID
    {+1, +1, +1},  // CALCIUM
    {-1, -1, +1},  // FIBROUS
}};

constexpr std::array<double, kNumComponents> kPresenceProbability = {0.5, 0.4, 0.6, 0.7};

constexpr std::array<std::string_view, 5> kLocations = {
    "left ICA", "right ICA", "bilateral ICA", "left carotid bifurcation",
    "right carotid bifurcation"};
constexpr std::array<std::string_view, 5> kSymptoms = {
    "dizziness", "headache", "amaurosis fugax", "limb weakness", "blurred vision"};

std::string feature_name(std::size_t j) {
  auto name = std::string{kFeatureStems[j % kFeatureStems.size()]};
  if (j >= kFeatureStems.size()) name += "_" + std::to_string(j / kFeatureStems.size());
  return name;
}

void check_spec(const SyntheticSpec& spec) {
  if (spec.n_patients < 4) throw ValidationError("synthetic spec: n_patients must be >= 4");
  if (spec.d_features < 2) throw ValidationError("synthetic spec: d_features must be >= 2");
  if (!(spec.separation >= 0.0) || !std::isfinite(spec.separation))
    throw ValidationError("synthetic spec: separation must be finite and >= 0");
  if (spec.n_samples < 0) throw ValidationError("synthetic spec: n_samples must be >= 0");
}

}  // namespace

std::size_t discriminative_feature_count(const SyntheticSpec& spec) {
  return static_cast<std::size_t>(std::min(3, spec.d_features));
}

Cohort generate_synthetic_cohort(const SyntheticSpec& spec) {
  check_spec(spec);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto bernoulli = [&](double p) { return unit(rng) < p; };
  auto uniform_int = [&](int lo, int hi) {
    return lo + static_cast<int>(std::floor(unit(rng) * (hi - lo + 1)));
  };

  const auto dim = static_cast<std::size_t>(spec.d_features);
  const auto informative = discriminative_feature_count(spec);

  // Per-feature affine scale so raw columns look like heterogeneous radiomics.
  std::vector<double> offset(dim), scale(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    scale[j] = std::pow(10.0, -1.0 + 4.0 * unit(rng));
    offset[j] = scale[j] * (5.0 + 10.0 * unit(rng));
  }

  std::vector<std::string> names;
  for (std::size_t j = 0; j < dim; ++j) names.push_back(feature_name(j));

  std::vector<PatientRecord> patients;
  std::vector<PlaqueSample> samples;
  VoxelCounts voxels;

  const Date base_day{std::chrono::year{2023}, std::chrono::January, std::chrono::day{1}};

  for (int i = 0; i < spec.n_patients ||
                  (spec.n_samples > 0 && static_cast<int>(samples.size()) < spec.n_samples);
       ++i) {
    PatientRecord p;
    char id[16];
    std::snprintf(id, sizeof id, "P%03d", i + 1);
    p.patient_id = id;
    p.age = uniform_int(31, 85);
    p.gender = bernoulli(0.6) ? Gender::MALE : Gender::FEMALE;
    p.bmi = std::clamp(24.0 + 3.0 * gauss(rng), 17.2, 31.8);
    p.htn = bernoulli(0.6);
    p.dm = bernoulli(0.3);
    p.ci = bernoulli(0.25);
    p.sm = bernoulli(0.45);
    p.tn = std::clamp(0.012 * std::exp(0.6 * gauss(rng)), 0.001, 0.2);
    p.bnp = std::clamp(80.0 * std::exp(0.5 * gauss(rng)), 10.0, 600.0);
    if (i < 2) p.bnp = 2400.0 + 900.0 * i;  // planted outliers

    auto admission = std::chrono::sys_days{base_day} + std::chrono::days{uniform_int(0, 300)};
    int stay = uniform_int(3, 14);
    p.admission_date = Date{admission};
    p.discharge_date = Date{admission + std::chrono::days{stay}};
    if (bernoulli(0.8)) p.surgery_date = Date{admission + std::chrono::days{uniform_int(1, stay - 1)}};
    p.plaque_location = kLocations[static_cast<std::size_t>(uniform_int(0, kLocations.size() - 1))];
    p.surgical_method = bernoulli(0.7) ? "CEA" : "CAS";
    for (auto s : kSymptoms)
      if (bernoulli(0.3)) p.symptoms.emplace_back(s);

    const bool young = p.age >= 31 && p.age <= 50;
    for (auto side : kAllSides) {
      std::array<bool, kNumComponents> present{};
      do {
        for (std::size_t c = 0; c < kNumComponents; ++c)
          present[c] = bernoulli(kPresenceProbability[c]);
      } while (std::none_of(present.begin(), present.end(), [](bool b) { return b; }));

      for (std::size_t c = 0; c < kNumComponents; ++c) {
        if (!present[c]) continue;
        auto component = component_at(c);
        std::int64_t size = uniform_int(40, 260);
        if (component == PlaqueComponent::FIBROUS && young) size *= 5;
        voxels[{p.patient_id, side, component}] = size;

        PlaqueSample s;
        s.patient_id = p.patient_id;
        s.side = side;
        s.component = component;
        s.sample_id = make_sample_id(p.patient_id, side, component);
        s.features.resize(dim);
        for (std::size_t j = 0; j < dim; ++j) {
          double z = gauss(rng);
          if (j < informative) z += kMeanSigns[c][j] * spec.separation;
          if (j == 0 && p.sm) z += 0.5 * spec.separation;
          s.features[j] = offset[j] + scale[j] * z;
        }
        samples.push_back(std::move(s));
      }
    }
    patients.push_back(std::move(p));
  }

  if (spec.n_samples > 0) samples.resize(static_cast<std::size_t>(spec.n_samples));
  return validate_cohort(std::move(patients), std::move(samples), std::move(names),
                         std::move(voxels));
}

}  // namespace plaqueva
