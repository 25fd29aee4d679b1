#include "plaqueva/eval_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

namespace plaqueva {

MetricsTable metrics_from_predictions(std::span<const PlaqueComponent> truth,
                                      std::span<const PlaqueComponent> predicted) {
  if (truth.size() != predicted.size()) throw ValidationError("prediction count mismatch");
  MetricsTable m;
  m.total = static_cast<std::int64_t>(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i)
    ++m.confusion[index_of(truth[i])][index_of(predicted[i])];

  std::int64_t trace = 0;
  for (std::size_t c = 0; c < kNumComponents; ++c) {
    std::int64_t tp = m.confusion[c][c], predicted_c = 0, actual_c = 0;
    for (std::size_t k = 0; k < kNumComponents; ++k) {
      predicted_c += m.confusion[k][c];
      actual_c += m.confusion[c][k];
    }
    trace += tp;
    auto& s = m.per_class[c];
    s.support = actual_c;
    s.precision_undefined = predicted_c == 0;
    s.recall_undefined = actual_c == 0;
    s.precision = predicted_c ? static_cast<double>(tp) / static_cast<double>(predicted_c) : 0.0;
    s.recall = actual_c ? static_cast<double>(tp) / static_cast<double>(actual_c) : 0.0;
    s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  }
  m.accuracy = m.total ? static_cast<double>(trace) / static_cast<double>(m.total) : 0.0;
  return m;
}

MetricsTable confusion_and_scores(const CvResult& cv) {
  return metrics_from_predictions(cv.labels, cv.oof_predictions);
}

namespace {

struct Ranked {
  std::vector<std::size_t> order;  // by descending score
  std::size_t positives = 0;
};

Ranked rank(std::span<const double> scores, std::span<const bool> labels) {
  if (scores.size() != labels.size()) throw ValidationError("score/label count mismatch");
  for (double s : scores)
    if (std::isnan(s)) throw ValidationError("NaN score");
  Ranked r;
  r.order.resize(scores.size());
  std::iota(r.order.begin(), r.order.end(), 0);
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  r.positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  return r;
}

}  // namespace

RocCurve roc_curve(std::span<const double> scores, std::span<const bool> labels) {
  auto r = rank(scores, labels);
  const std::size_t negatives = labels.size() - r.positives;
  if (r.positives == 0 || negatives == 0)
    throw ValidationError("roc_curve: need at least one positive and one negative label");

  RocCurve roc;
  roc.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0, fp = 0;
  double area = 0.0;
  for (std::size_t k = 0; k < r.order.size();) {
    const double threshold = scores[r.order[k]];
    const std::size_t tp0 = tp, fp0 = fp;
    while (k < r.order.size() && scores[r.order[k]] == threshold) {
      if (labels[r.order[k]])
        ++tp;
      else
        ++fp;
      ++k;
    }
    // Trapezoid in counts, normalized once at the end.
    area += static_cast<double>(fp - fp0) * static_cast<double>(tp + tp0) * 0.5;
    roc.points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                          static_cast<double>(tp) / static_cast<double>(r.positives), threshold});
  }
  roc.auc = area / (static_cast<double>(r.positives) * static_cast<double>(negatives));
  return roc;
}

PrCurve pr_curve(std::span<const double> scores, std::span<const bool> labels) {
  auto r = rank(scores, labels);
  if (r.positives == 0) throw ValidationError("pr_curve: no positive labels");

  PrCurve pr;
  std::size_t tp = 0, seen = 0;
  double prev_recall = 0.0, ap = 0.0;
  for (std::size_t k = 0; k < r.order.size();) {
    const double threshold = scores[r.order[k]];
    while (k < r.order.size() && scores[r.order[k]] == threshold) {
      tp += labels[r.order[k]] ? 1 : 0;
      ++seen;
      ++k;
    }
    double recall = static_cast<double>(tp) / static_cast<double>(r.positives);
    double precision = static_cast<double>(tp) / static_cast<double>(seen);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    pr.points.push_back({recall, precision, threshold});
  }
  pr.average_precision = ap;
  return pr;
}

OvrCurves ovr_curves(const CvResult& cv) {
  OvrCurves out;
  const std::size_t n = cv.labels.size();
  for (auto c : kAllComponents) {
    std::vector<double> scores(n);
    std::unique_ptr<bool[]> labels(new bool[n]);
    std::size_t positives = 0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = cv.oof_scores[i][index_of(c)];
      labels[i] = cv.labels[i] == c;
      positives += labels[i];
      finite = finite && std::isfinite(scores[i]);
    }
    const std::string name{component_name(c)};
    if (positives == 0) {
      out.warnings.push_back("no positive samples for " + name + "; curves omitted");
      continue;
    }
    if (positives == n) {
      out.warnings.push_back("no negative samples for " + name + "; curves omitted");
      continue;
    }
    if (!finite) {
      out.warnings.push_back(name + " was not scored in every fold; curves omitted");
      continue;
    }
    std::span<const bool> l(labels.get(), n);
    auto roc = roc_curve(scores, l);
    roc.component = c;
    auto pr = pr_curve(scores, l);
    pr.component = c;
    out.roc.push_back(std::move(roc));
    out.pr.push_back(std::move(pr));
  }
  return out;
}

}  // namespace plaqueva
