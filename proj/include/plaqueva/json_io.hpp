#pragma once

#include <json.hpp>

#include "plaqueva/clinical_views.hpp"
#include "plaqueva/cohort.hpp"
#include "plaqueva/eval_metrics.hpp"
#include "plaqueva/feature_views.hpp"
#include "plaqueva/ml_pipeline.hpp"
#include "plaqueva/stat_tests.hpp"

namespace plaqueva::json {

using Json = nlohmann::json;

/// Finite doubles as numbers, NaN and infinities as null.
Json number(double v);

Json patient_summary(const PatientRecord& p);
Json patient_detail(const Cohort& cohort, const PatientRecord& p);

Json chart(const ChartSeries& chart);
Json parallel_coords(const ParallelCoords& pc);
Json radar(const RadarData& radar);
Json boxplot(const std::vector<BoxplotEntry>& entries);

Json params(const SvmParams& p);
/// Reads {C?, k?, seed?, tol?, max_passes?, top_k?} over `defaults`.
/// Throws ValidationError on wrong types or out-of-range values.
SvmParams params_from(const Json& body, SvmParams defaults);

Json cv_result(const CvResult& cv);
Json top_features(const CvResult& cv);

Json metrics(const MetricsTable& m);
Json roc_curves(const OvrCurves& curves);
Json pr_curves(const OvrCurves& curves);

Json anova(const AnovaResult& r);
Json disease_anova(const std::array<DiseaseAnova, 4>& row);
Json anova_grid(const AnovaGrid& grid);

}  // namespace plaqueva::json
