#include "plaqueva/json_io.hpp"

#include <cmath>

namespace plaqueva::json {
namespace {

Json numbers(std::span<const double> values) {
  Json arr = Json::array();
  for (double v : values) arr.push_back(number(v));
  return arr;
}

Json optional_date(const std::optional<Date>& d) {
  return d ? Json(format_iso_date(*d)) : Json(nullptr);
}

Json axis(const Axis& a) { return {{"label", a.label}, {"unit", a.unit}}; }

}  // namespace

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json patient_summary(const PatientRecord& p) {
  return {{"patient_id", p.patient_id}, {"age", p.age}, {"gender", gender_name(p.gender)}};
}

Json patient_detail(const Cohort& cohort, const PatientRecord& p) {
  Json sizes = Json::object();
  for (auto c : kAllComponents) {
    auto left = cohort.voxel_count(p.patient_id, Side::LEFT, c);
    auto right = cohort.voxel_count(p.patient_id, Side::RIGHT, c);
    sizes[std::string{component_name(c)}] = {{"left", left}, {"right", right}, {"total", left + right}};
  }
  Json samples = Json::array();
  for (const auto& s : cohort.samples())
    if (s.patient_id == p.patient_id) samples.push_back(s.sample_id);
  return {{"patient_id", p.patient_id},
          {"age", p.age},
          {"gender", gender_name(p.gender)},
          {"bmi", p.bmi},
          {"htn", p.htn},
          {"dm", p.dm},
          {"ci", p.ci},
          {"sm", p.sm},
          {"tn", p.tn},
          {"bnp", p.bnp},
          {"admission_date", optional_date(p.admission_date)},
          {"discharge_date", optional_date(p.discharge_date)},
          {"surgery_date", optional_date(p.surgery_date)},
          {"plaque_location", p.plaque_location},
          {"surgical_method", p.surgical_method},
          {"symptoms", p.symptoms},
          {"plaque_voxels", sizes},
          {"samples", samples}};
}

Json chart(const ChartSeries& c) {
  Json series = Json::array();
  for (const auto& s : c.series) {
    Json points = Json::array();
    for (const auto& p : s.points) {
      Json pt = {{"x", number(p.x)}, {"y", p.y ? number(*p.y) : Json(nullptr)}};
      if (!p.category.empty()) pt["category"] = p.category;
      if (!p.patient_id.empty()) pt["patient_id"] = p.patient_id;
      if (p.count) pt["count"] = *p.count;
      points.push_back(std::move(pt));
    }
    series.push_back({{"component", component_name(s.component)},
                      {"color", component_color(s.component)},
                      {"points", std::move(points)}});
  }
  return {{"kind", chart_kind_name(c.kind)}, {"title", c.title},
          {"group", c.group},                {"aggregation", c.aggregation},
          {"x_axis", axis(c.x_axis)},        {"y_axis", axis(c.y_axis)},
          {"series", std::move(series)}};
}

Json parallel_coords(const ParallelCoords& pc) {
  Json axes = Json::array();
  for (const auto& a : pc.axes)
    axes.push_back({{"feature_index", a.feature_index},
                    {"name", a.name},
                    {"min", number(a.min)},
                    {"max", number(a.max)}});
  Json lines = Json::array();
  for (const auto& l : pc.polylines)
    lines.push_back({{"sample_id", l.sample_id},
                     {"component", component_name(l.component)},
                     {"color", component_color(l.component)},
                     {"values", numbers(l.values)}});
  return {{"kind", chart_kind_name(ChartKind::PARALLEL)}, {"axes", axes}, {"polylines", lines}};
}

Json radar(const RadarData& r) {
  Json series = Json::array();
  for (auto c : kAllComponents) {
    const auto& v = r.values[index_of(c)];
    series.push_back({{"component", component_name(c)},
                      {"color", component_color(c)},
                      {"values", v ? numbers(*v) : Json(nullptr)}});
  }
  return {{"axes", r.axes},
          {"feature_indices", r.feature_indices},
          {"normalization", "min-max over all samples; constant feature = 0.5"},
          {"series", series}};
}

Json boxplot(const std::vector<BoxplotEntry>& entries) {
  Json boxes = Json::array();
  for (const auto& e : entries) {
    const auto& b = e.stats;
    boxes.push_back({{"feature_index", e.feature_index},
                     {"feature_name", e.feature_name},
                     {"component", component_name(e.component)},
                     {"n", b.n},
                     {"min", number(b.min)},
                     {"q1", number(b.q1)},
                     {"median", number(b.median)},
                     {"q3", number(b.q3)},
                     {"max", number(b.max)},
                     {"whisker_lo", number(b.whisker_lo)},
                     {"whisker_hi", number(b.whisker_hi)},
                     {"outliers", numbers(b.outliers)},
                     {"degenerate", b.degenerate}});
  }
  return {{"quartile_method", "linear interpolation at p*(n-1)"},
          {"fence", 1.5},
          {"boxes", boxes}};
}

Json params(const SvmParams& p) {
  return {{"C", p.C},           {"tol", p.tol},   {"max_passes", p.max_passes},
          {"seed", p.seed},     {"k", p.k_folds}, {"top_k", p.top_k}};
}

SvmParams params_from(const Json& body, SvmParams p) {
  if (body.is_null()) return p;
  if (!body.is_object()) throw ValidationError("training parameters must be a JSON object");
  for (const auto& [key, value] : body.items()) {
    auto need_number = [&] {
      if (!value.is_number()) throw ValidationError("parameter " + key + " must be a number");
    };
    auto need_integer = [&] {
      if (!value.is_number_integer())
        throw ValidationError("parameter " + key + " must be an integer");
    };
    if (key == "C") {
      need_number();
      p.C = value.get<double>();
    } else if (key == "tol") {
      need_number();
      p.tol = value.get<double>();
    } else if (key == "k") {
      need_integer();
      p.k_folds = value.get<int>();
    } else if (key == "seed") {
      need_integer();
      if (value.is_number_unsigned())
        p.seed = value.get<std::uint64_t>();
      else if (value.get<std::int64_t>() < 0)
        throw ValidationError("parameter seed must be >= 0");
      else
        p.seed = static_cast<std::uint64_t>(value.get<std::int64_t>());
    } else if (key == "max_passes") {
      need_integer();
      p.max_passes = value.get<int>();
    } else if (key == "top_k") {
      need_integer();
      p.top_k = value.get<int>();
    } else {
      throw ValidationError("unknown training parameter " + key);
    }
  }
  check_params(p);
  return p;
}

Json cv_result(const CvResult& cv) {
  Json labels = Json::array(), predictions = Json::array(), scores = Json::array();
  for (std::size_t i = 0; i < cv.labels.size(); ++i) {
    labels.push_back(component_name(cv.labels[i]));
    predictions.push_back(component_name(cv.oof_predictions[i]));
    scores.push_back(numbers(cv.oof_scores[i]));
  }
  Json fold_saliency = Json::array();
  for (const auto& s : cv.fold_saliency) fold_saliency.push_back(numbers(s));

  Json models = Json::array();
  for (std::size_t f = 0; f < cv.fold_models.size(); ++f) {
    const auto& m = cv.fold_models[f];
    Json classes = Json::array();
    for (auto c : kAllComponents) {
      const auto& svm = m.classes[index_of(c)];
      if (!svm) continue;
      classes.push_back({{"component", component_name(c)},
                         {"bias", number(svm->bias)},
                         {"weights", numbers(svm->weights)},
                         {"support_vectors", svm->support.size()},
                         {"converged", svm->converged},
                         {"passes", svm->passes}});
    }
    models.push_back({{"fold", f},
                      {"mean", numbers(m.standardizer.mean)},
                      {"stddev", numbers(m.standardizer.stddev)},
                      {"classes", classes}});
  }

  Json out = top_features(cv);
  out["params"] = params(cv.params);
  out["accuracy"] = number(cv.accuracy());
  out["folds"] = cv.folds;
  out["labels"] = labels;
  out["oof_predictions"] = predictions;
  out["oof_scores"] = scores;
  out["fold_saliency"] = fold_saliency;
  out["saliency"] = numbers(cv.saliency);
  out["fold_models"] = models;
  out["warnings"] = cv.warnings;
  return out;
}

Json top_features(const CvResult& cv) {
  Json top = Json::array();
  for (std::size_t r = 0; r < cv.top_features.size(); ++r) {
    auto j = cv.top_features[r];
    top.push_back({{"rank", r + 1},
                   {"index", j},
                   {"name", cv.top_feature_names[r]},
                   {"saliency", number(cv.saliency[j])}});
  }
  return {{"saliency_method", cv.saliency_method}, {"top_features", top}};
}

Json metrics(const MetricsTable& m) {
  Json names = Json::array(), matrix = Json::array(), per_class = Json::array();
  for (auto c : kAllComponents) {
    auto i = index_of(c);
    names.push_back(component_name(c));
    matrix.push_back(m.confusion[i]);
    const auto& s = m.per_class[i];
    per_class.push_back({{"component", component_name(c)},
                         {"precision", s.precision},
                         {"recall", s.recall},
                         {"f1", s.f1},
                         {"support", s.support},
                         {"precision_undefined", s.precision_undefined},
                         {"recall_undefined", s.recall_undefined}});
  }
  return {{"components", names},
          {"confusion", matrix},
          {"per_class", per_class},
          {"accuracy", m.accuracy},
          {"total", m.total}};
}

Json roc_curves(const OvrCurves& curves) {
  Json out = Json::array();
  for (const auto& roc : curves.roc) {
    Json pts = Json::array();
    for (const auto& p : roc.points)
      pts.push_back({{"fpr", p.fpr}, {"tpr", p.tpr}, {"threshold", number(p.threshold)}});
    out.push_back({{"component", component_name(*roc.component)},
                   {"auc", roc.auc},
                   {"points", pts}});
  }
  return {{"curves", out}, {"warnings", curves.warnings}};
}

Json pr_curves(const OvrCurves& curves) {
  Json out = Json::array();
  for (const auto& pr : curves.pr) {
    Json pts = Json::array();
    for (const auto& p : pr.points)
      pts.push_back(
          {{"recall", p.recall}, {"precision", p.precision}, {"threshold", number(p.threshold)}});
    out.push_back({{"component", component_name(*pr.component)},
                   {"average_precision", pr.average_precision},
                   {"points", pts}});
  }
  return {{"curves", out},
          {"average_precision_method", kAveragePrecisionMethod},
          {"warnings", curves.warnings}};
}

Json anova(const AnovaResult& r) {
  return {{"f_value", number(r.f_value)},
          {"f_infinite", std::isinf(r.f_value)},
          {"p_value", r.p_value},
          {"df_between", r.df_between},
          {"df_within", r.df_within},
          {"ss_between", r.ss_between},
          {"ss_within", r.ss_within},
          {"eta_squared", r.eta_squared},
          {"effect_size_label", "effect size (η²)"},
          {"group_sizes", r.group_sizes}};
}

Json disease_anova(const std::array<DiseaseAnova, 4>& row) {
  Json out = Json::object();
  for (const auto& d : row) {
    Json cell = {{"available", d.result.has_value()},
                 {"result", d.result ? anova(*d.result) : Json(nullptr)}};
    if (!d.result) cell["null_reason"] = d.null_reason;
    out[std::string{disease_name(d.disease)}] = std::move(cell);
  }
  return out;
}

Json anova_grid(const AnovaGrid& grid) {
  Json out = Json::object();
  for (auto c : kAllComponents)
    out[std::string{component_name(c)}] = disease_anova(grid[index_of(c)]);
  return out;
}

}  // namespace plaqueva::json
