#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "crossdecode/classifier.hpp"
#include "crossdecode/eigen_util.hpp"
#include "crossdecode/errors.hpp"
#include "crossdecode/kernels.hpp"
#include "crossdecode/parallel.hpp"

namespace crossdecode {
namespace {

// Training rows with a trailing constant 1 for the bias, stored contiguously.
class AugmentedRows {
 public:
  explicit AugmentedRows(const FeatureMatrix& x)
      : n_(static_cast<std::size_t>(x.rows())), width_(static_cast<std::size_t>(x.cols()) + 1), data_(n_ * width_) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j + 1 < width_; ++j) data_[i * width_ + j] = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      data_[i * width_ + width_ - 1] = 1.0;
    }
  }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * width_, width_}; }
  std::size_t size() const noexcept { return n_; }
  std::size_t width() const noexcept { return width_; }

 private:
  std::size_t n_;
  std::size_t width_;
  std::vector<double> data_;
};

struct Objectives {
  double primal;
  double dual;
};

// Rebuilds w from alpha so both objectives see the same, drift-free w.
Objectives evaluate(const AugmentedRows& rows, std::span<const int> y, std::span<const double> alpha, double c,
                    std::vector<double>& w) {
  std::fill(w.begin(), w.end(), 0.0);
  double alpha_sum = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (alpha[i] != 0.0) kernels::axpy(alpha[i] * y[i], rows.row(i), w);
    alpha_sum += alpha[i];
  }
  const double half_norm = 0.5 * kernels::sum_squares(w);
  double hinge = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    hinge += std::max(0.0, 1.0 - y[i] * kernels::dot(w, rows.row(i)));
  return {half_norm + c * hinge, alpha_sum - half_norm};
}

// Sweeps between full primal evaluations; the dual is tracked every sweep.
constexpr int kGapCheckInterval = 8;

}  // namespace

bool BinarySvm::operator==(const BinarySvm& other) const {
  return exactly_equal(weights, other.weights) && bias == other.bias && primal == other.primal &&
         dual == other.dual && duality_gap == other.duality_gap && sweeps == other.sweeps;
}

BinarySvm train_binary_svm(const FeatureMatrix& x, std::span<const int> y, const SvmOptions& options, Rng& rng) {
  if (static_cast<std::size_t>(x.rows()) != y.size())
    throw InputError(fmt::format("{} feature rows but {} labels", x.rows(), y.size()));
  if (x.rows() == 0) throw InputError("no training examples");
  if (!x.allFinite()) throw InputError("non-finite feature values");
  for (int v : y)
    if (v != 1 && v != -1) throw InputError(fmt::format("binary label must be +1 or -1, got {}", v));
  if (!(options.c > 0.0) || !(options.tol > 0.0))
    throw ConfigError(fmt::format("svm C and tolerance must be positive (C={}, tol={})", options.c, options.tol));

  const AugmentedRows rows(x);
  const std::size_t n = rows.size();
  const double c = options.c;
  std::vector<double> alpha(n, 0.0);
  std::vector<double> w(rows.width(), 0.0);
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = kernels::sum_squares(rows.row(i));
  std::vector<std::size_t> active(n);
  std::iota(active.begin(), active.end(), std::size_t{0});
  // Projected-gradient extremes from the previous sweep; examples at a bound whose
  // gradient lies beyond them are dropped until the next full check.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double pg_max_prev = kInf;
  double pg_min_prev = -kInf;

  BinarySvm out;
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    rng.shuffle(std::span<std::size_t>(active));
    double pg_max = -kInf;
    double pg_min = kInf;
    for (std::size_t s = 0; s < active.size();) {
      const std::size_t i = active[s];
      const auto xi = rows.row(i);
      const double grad = y[i] * kernels::dot(w, xi) - 1.0;
      double projected = grad;
      if (alpha[i] == 0.0) {
        if (grad > pg_max_prev) {
          active[s] = active.back();
          active.pop_back();
          continue;
        }
        projected = std::min(grad, 0.0);
      } else if (alpha[i] == c) {
        if (grad < pg_min_prev) {
          active[s] = active.back();
          active.pop_back();
          continue;
        }
        projected = std::max(grad, 0.0);
      }
      ++s;
      pg_max = std::max(pg_max, projected);
      pg_min = std::min(pg_min, projected);
      if (projected == 0.0) continue;
      const double updated = std::clamp(alpha[i] - grad / diag[i], 0.0, c);
      const double delta = updated - alpha[i];
      if (delta != 0.0) {
        kernels::axpy(delta * y[i], xi, w);
        alpha[i] = updated;
      }
    }
    pg_max_prev = pg_max > 0.0 ? pg_max : kInf;
    pg_min_prev = pg_min < 0.0 ? pg_min : -kInf;

    const bool check = sweep % kGapCheckInterval == 0 || sweep == options.max_sweeps;
    if (!check) {
      if (options.record_trace)
        out.dual_trace.push_back(std::accumulate(alpha.begin(), alpha.end(), 0.0) - 0.5 * kernels::sum_squares(w));
      continue;
    }
    const Objectives obj = evaluate(rows, y, alpha, c, w);
    if (options.record_trace) out.dual_trace.push_back(obj.dual);
    out.primal = obj.primal;
    out.dual = obj.dual;
    out.duality_gap = obj.primal - obj.dual;
    out.sweeps = sweep;
    if (out.duality_gap <= options.tol * (1.0 + std::abs(obj.primal))) {
      const auto d = static_cast<Eigen::Index>(rows.width() - 1);
      out.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), d);
      out.bias = w.back();
      return out;
    }
    active.resize(n);
    std::iota(active.begin(), active.end(), std::size_t{0});
    pg_max_prev = kInf;
    pg_min_prev = -kInf;
  }
  throw NumericalError(fmt::format("svm did not reach duality gap {} within {} sweeps (gap {})", options.tol,
                                   options.max_sweeps, out.duality_gap));
}

LinearClassifier::LinearClassifier(std::vector<BinarySvm> machines, double c, double tol)
    : machines_(std::move(machines)), c_(c), tol_(tol) {
  if (machines_.empty()) throw InputError("classifier needs at least one machine");
  for (const auto& m : machines_)
    if (m.weights.size() != machines_.front().weights.size()) throw InputError("machine dimensions differ");
}

Eigen::VectorXd LinearClassifier::scores(const Eigen::VectorXd& x) const {
  if (x.size() != dimension())
    throw InputError(fmt::format("feature vector has {} entries, classifier expects {}", x.size(), dimension()));
  Eigen::VectorXd s(classes());
  for (int k = 0; k < classes(); ++k) s(k) = machines_[k].decision(x);
  return s;
}

bool LinearClassifier::operator==(const LinearClassifier& other) const {
  return machines_ == other.machines_ && c_ == other.c_ && tol_ == other.tol_;
}

LinearClassifier train_ovr_svm(const FeatureMatrix& features, std::span<const int> labels, int classes,
                               const SvmOptions& options, const RngStream& stream) {
  if (classes < 2) throw ConfigError(fmt::format("need at least 2 classes, got {}", classes));
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    throw InputError(fmt::format("{} feature rows but {} labels", features.rows(), labels.size()));
  std::vector<int> present(classes, 0);
  for (int l : labels) {
    if (l < 0 || l >= classes) throw InputError(fmt::format("label {} outside [0, {})", l, classes));
    present[l] = 1;
  }
  for (int k = 0; k < classes; ++k)
    if (!present[k]) throw InputError(fmt::format("class {} absent from training labels", k));
  if (!features.allFinite()) throw InputError("non-finite feature values");

  std::vector<BinarySvm> machines(classes);
  parallel_for(static_cast<std::size_t>(classes), [&](std::size_t k) {
    std::vector<int> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == static_cast<int>(k) ? 1 : -1;
    Rng rng = stream.child(fmt::format("svm-class-{}", k)).rng();
    machines[k] = train_binary_svm(features, y, options, rng);
  });
  return LinearClassifier(std::move(machines), options.c, options.tol);
}

int argmax_lowest(const Eigen::VectorXd& scores) {
  int best = 0;
  for (Eigen::Index k = 1; k < scores.size(); ++k)
    if (scores(k) > scores(best)) best = static_cast<int>(k);
  return best;
}

int predict(const LinearClassifier& classifier, const FeatureScaler& scaler, const Eigen::VectorXd& x) {
  if (x.size() != scaler.dimension() || scaler.dimension() != classifier.dimension())
    throw InputError(fmt::format("feature vector has {} entries, model expects {}", x.size(), classifier.dimension()));
  return argmax_lowest(classifier.scores(scaler.apply(x)));
}

}  // namespace crossdecode
