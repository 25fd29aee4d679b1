#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "plaqueva/ml_pipeline.hpp"

namespace plaqueva {

void check_params(const SvmParams& p) {
  if (!(p.C > 0.0) || !std::isfinite(p.C)) throw ValidationError("C must be finite and > 0");
  if (!(p.tol > 0.0) || !std::isfinite(p.tol)) throw ValidationError("tol must be finite and > 0");
  if (p.max_passes < 1) throw ValidationError("max_passes must be >= 1");
  if (p.k_folds < 2) throw ValidationError("k must be >= 2");
  if (p.top_k < 1) throw ValidationError("top_k must be >= 1");
}

Standardizer standardize_fit(const Matrix& x) {
  if (x.rows() == 0) throw ValidationError("standardize_fit: empty matrix");
  const auto n = static_cast<double>(x.rows());
  Standardizer s;
  s.mean.assign(x.cols(), 0.0);
  s.stddev.assign(x.cols(), 0.0);
  s.constant.assign(x.cols(), false);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (!std::isfinite(x(i, j))) throw ValidationError("standardize_fit: non-finite input");
      sum += x(i, j);
    }
    double mean = sum / n;
    double correction = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      double d = x(i, j) - mean;
      correction += d;
      ss += d * d;
    }
    // Corrected two-pass variance.
    mean += correction / n;
    ss -= correction * correction / n;
    double sd = std::sqrt(std::max(0.0, ss / n));
    bool constant = true;
    for (std::size_t i = 1; i < x.rows() && constant; ++i) constant = x(i, j) == x(0, j);
    s.mean[j] = constant ? x(0, j) : mean;
    s.stddev[j] = constant ? 0.0 : sd;
    s.constant[j] = constant || sd == 0.0;
  }
  return s;
}

std::vector<double> standardize_apply(const Standardizer& s, std::span<const double> x) {
  if (x.size() != s.mean.size())
    throw ValidationError("dimension mismatch: got " + std::to_string(x.size()) +
                          " features, expected " + std::to_string(s.mean.size()));
  std::vector<double> z(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!std::isfinite(x[j])) throw ValidationError("standardize_apply: non-finite input");
    z[j] = s.constant[j] ? 0.0 : (x[j] - s.mean[j]) / s.stddev[j];
  }
  return z;
}

Matrix standardize_apply(const Standardizer& s, const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto z = standardize_apply(s, x.row(i));
    std::copy(z.begin(), z.end(), out.row(i).begin());
  }
  return out;
}

namespace {

// Platt's sequential minimal optimization for the linear-kernel dual, with
// a full error cache. Decision function f(x) = w.x + b, error E_i = f(x_i) - y_i.
// Minimum relative alpha change that counts as progress (Platt's eps).
constexpr double kEps = 1e-3;
// Cap on non-bound sweeps between two full sweeps.
constexpr int kMaxInnerSweeps = 1000;

class SmoSolver {
 public:
  SmoSolver(const Matrix& x, std::span<const int> y, const SvmParams& params,
            const Deadline& deadline)
      : x_(x), y_(y), c_(params.C), tol_(params.tol), max_passes_(params.max_passes),
        deadline_(deadline), rng_(params.seed), alpha_(x.rows(), 0.0), error_(x.rows()),
        w_(x.cols(), 0.0) {
    for (std::size_t i = 0; i < n(); ++i) error_[i] = -y_[i];
  }

  BinarySvm solve() {
    BinarySvm out;
    bool examine_all = true;
    std::size_t changed = 0;
    int passes = 0;  // full sweeps over every sample
    int inner = 0;   // consecutive non-bound sweeps
    while (changed > 0 || examine_all) {
      if (examine_all && passes >= max_passes_) break;
      if (deadline_ && std::chrono::steady_clock::now() > *deadline_)
        throw TimeoutError("svm training exceeded its deadline");
      changed = 0;
      if (examine_all) {
        refresh_errors();
        for (std::size_t i = 0; i < n(); ++i) changed += examine(i);
        ++passes;
        inner = 0;
      } else {
        for (std::size_t i = 0; i < n(); ++i)
          if (non_bound(i)) changed += examine(i);
        ++inner;
      }
      if (examine_all)
        examine_all = false;
      else if (changed == 0 || inner >= kMaxInnerSweeps)
        examine_all = true;
    }
    out.converged = !examine_all && changed == 0;
    out.passes = passes;
    finish(out);
    return out;
  }

 private:
  std::size_t n() const { return x_.rows(); }
  bool non_bound(std::size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < c_; }
  double kernel(std::size_t i, std::size_t j) const { return dot(x_.row(i), x_.row(j)); }

  // The cache is updated incrementally; a full sweep starts from exact errors.
  void refresh_errors() {
    for (std::size_t i = 0; i < n(); ++i) error_[i] = dot(w_, x_.row(i)) + bias_ - y_[i];
  }

  std::size_t random_start() { return static_cast<std::size_t>(rng_() % n()); }

  int examine(std::size_t i2) {
    const double y2 = y_[i2];
    const double a2 = alpha_[i2];
    const double e2 = error_[i2];
    const double r2 = e2 * y2;
    if (!((r2 < -tol_ && a2 < c_) || (r2 > tol_ && a2 > 0.0))) return 0;

    std::size_t best = n();
    double best_gap = -1.0;
    std::size_t nb_count = 0;
    for (std::size_t i = 0; i < n(); ++i) {
      if (!non_bound(i)) continue;
      ++nb_count;
      double gap = std::abs(error_[i] - e2);
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (nb_count > 1 && best < n() && step(best, i2)) return 1;

    auto start = random_start();
    for (std::size_t k = 0; k < n(); ++k) {
      auto i1 = (start + k) % n();
      if (non_bound(i1) && step(i1, i2)) return 1;
    }
    start = random_start();
    for (std::size_t k = 0; k < n(); ++k) {
      auto i1 = (start + k) % n();
      if (step(i1, i2)) return 1;
    }
    return 0;
  }

  bool step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double y1 = y_[i1], y2 = y_[i2];
    const double a1 = alpha_[i1], a2 = alpha_[i2];
    const double e1 = error_[i1], e2 = error_[i2];
    const double s = y1 * y2;

    double lo, hi;
    if (s < 0) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(c_, c_ + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - c_);
      hi = std::min(c_, a1 + a2);
    }
    if (hi - lo <= 1e-15 * c_) return false;

    const double k11 = kernel(i1, i1), k12 = kernel(i1, i2), k22 = kernel(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;
    double a2_new;
    if (eta > 1e-12) {
      a2_new = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      // Objective is linear along the constraint line: move to the better end.
      double slope = y2 * (e2 - e1);
      if (slope < -1e-12)
        a2_new = hi;
      else if (slope > 1e-12)
        a2_new = lo;
      else
        return false;
    }
    if (a2_new < 1e-12 * c_) a2_new = 0.0;
    if (a2_new > c_ * (1.0 - 1e-12)) a2_new = c_;
    if (std::abs(a2_new - a2) < kEps * (a2_new + a2 + kEps)) return false;

    double a1_new = a1 + s * (a2 - a2_new);
    if (a1_new < 1e-12 * c_) a1_new = 0.0;
    if (a1_new > c_ * (1.0 - 1e-12)) a1_new = c_;

    const double d1 = y1 * (a1_new - a1);
    const double d2 = y2 * (a2_new - a2);
    const double b1 = bias_ - e1 - d1 * k11 - d2 * k12;
    const double b2 = bias_ - e2 - d1 * k12 - d2 * k22;
    double b_new;
    if (a1_new > 0.0 && a1_new < c_)
      b_new = b1;
    else if (a2_new > 0.0 && a2_new < c_)
      b_new = b2;
    else
      b_new = 0.5 * (b1 + b2);
    const double db = b_new - bias_;

    auto x1 = x_.row(i1), x2 = x_.row(i2);
    for (std::size_t j = 0; j < w_.size(); ++j) w_[j] += d1 * x1[j] + d2 * x2[j];
    for (std::size_t k = 0; k < n(); ++k) {
      auto xk = x_.row(k);
      error_[k] += d1 * dot(x1, xk) + d2 * dot(x2, xk) + db;
    }
    alpha_[i1] = a1_new;
    alpha_[i2] = a2_new;
    bias_ = b_new;
    return true;
  }

  void finish(BinarySvm& out) const {
    out.alpha = alpha_;
    out.weights.assign(x_.cols(), 0.0);
    for (std::size_t i = 0; i < n(); ++i) {
      if (alpha_[i] <= 0.0) continue;
      out.support.push_back(i);
      auto xi = x_.row(i);
      for (std::size_t j = 0; j < xi.size(); ++j) out.weights[j] += alpha_[i] * y_[i] * xi[j];
    }

    double sum = 0.0;
    std::size_t count = 0;
    for (auto i : out.support)
      if (alpha_[i] < c_) {
        sum += y_[i] - dot(out.weights, x_.row(i));
        ++count;
      }
    if (count == 0)
      for (auto i : out.support) {
        sum += y_[i] - dot(out.weights, x_.row(i));
        ++count;
      }
    out.bias = count > 0 ? sum / static_cast<double>(count) : bias_;
  }

  const Matrix& x_;
  std::span<const int> y_;
  double c_;
  double tol_;
  int max_passes_;
  Deadline deadline_;
  std::mt19937_64 rng_;
  std::vector<double> alpha_;
  std::vector<double> error_;
  std::vector<double> w_;
  double bias_ = 0.0;
};

}  // namespace

BinarySvm train_binary_svm(const Matrix& x, std::span<const int> y, const SvmParams& params,
                           const Deadline& deadline) {
  check_params(params);
  if (x.rows() != y.size()) throw ValidationError("train_binary_svm: label count mismatch");
  if (x.rows() < 2) throw ValidationError("train_binary_svm: need at least 2 samples");
  bool pos = false, neg = false;
  for (int label : y) {
    if (label == 1)
      pos = true;
    else if (label == -1)
      neg = true;
    else
      throw ValidationError("train_binary_svm: labels must be +1 or -1");
  }
  if (!pos || !neg) throw ValidationError("train_binary_svm: single-class input");
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (double v : x.row(i))
      if (!std::isfinite(v)) throw ValidationError("train_binary_svm: non-finite input");
  return SmoSolver(x, y, params, deadline).solve();
}

std::size_t SvmModel::trained_classes() const {
  return static_cast<std::size_t>(
      std::count_if(classes.begin(), classes.end(), [](const auto& c) { return c.has_value(); }));
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

SvmModel train_ovr(const Matrix& x, std::span<const PlaqueComponent> labels,
                   const SvmParams& params, const Deadline& deadline) {
  check_params(params);
  if (x.rows() != labels.size()) throw ValidationError("train_ovr: label count mismatch");

  std::array<std::size_t, kNumComponents> counts{};
  for (auto c : labels) ++counts[index_of(c)];
  auto present = std::count_if(counts.begin(), counts.end(), [](auto n) { return n > 0; });
  if (present < 2) throw ValidationError("train_ovr: fewer than 2 classes present");

  SvmModel model;
  model.params = params;
  model.standardizer = standardize_fit(x);
  const Matrix z = standardize_apply(model.standardizer, x);

  for (auto c : kAllComponents) {
    if (counts[index_of(c)] == 0) {
      model.warnings.push_back("no samples of " + std::string{component_name(c)} +
                               "; class skipped");
      continue;
    }
    std::vector<int> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == c ? 1 : -1;
    SvmParams p = params;
    p.seed = mix_seed(params.seed, index_of(c));
    auto svm = train_binary_svm(z, y, p, deadline);
    if (!svm.converged)
      model.warnings.push_back("SMO for " + std::string{component_name(c)} +
                               " did not converge within max_passes");
    model.classes[index_of(c)] = std::move(svm);
  }
  return model;
}

Matrix feature_matrix(const Cohort& cohort) {
  Matrix x(cohort.samples().size(), cohort.dimension());
  for (std::size_t i = 0; i < cohort.samples().size(); ++i) {
    const auto& f = cohort.samples()[i].features;
    std::copy(f.begin(), f.end(), x.row(i).begin());
  }
  return x;
}

std::vector<PlaqueComponent> sample_labels(const Cohort& cohort) {
  std::vector<PlaqueComponent> labels;
  labels.reserve(cohort.samples().size());
  for (const auto& s : cohort.samples()) labels.push_back(s.component);
  return labels;
}

SvmModel train_ovr(const Cohort& cohort, const SvmParams& params) {
  auto labels = sample_labels(cohort);
  return train_ovr(feature_matrix(cohort), labels, params);
}

Prediction predict(const SvmModel& model, std::span<const double> x) {
  auto z = standardize_apply(model.standardizer, x);
  Prediction pred;
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (auto c : kAllComponents) {
    const auto& svm = model.classes[index_of(c)];
    double score = svm ? svm->decision(z) : -std::numeric_limits<double>::infinity();
    pred.scores[index_of(c)] = score;
    if (svm && (!any || score > best)) {
      best = score;
      pred.label = c;
      any = true;
    }
  }
  return pred;
}

}  // namespace plaqueva
