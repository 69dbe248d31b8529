#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

#include "crossdecode/rng.hpp"

namespace crossdecode {

/// Rows are samples, columns are feature dimensions.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class FeatureScaler {
 public:
  static constexpr double kStdFloor = 1e-12;

  FeatureScaler(Eigen::VectorXd mean, Eigen::VectorXd std);

  /// Per-column mean and sample standard deviation (n - 1), floored at kStdFloor.
  /// Needs at least two rows.
  static FeatureScaler fit(const FeatureMatrix& features);

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  FeatureMatrix apply(const FeatureMatrix& rows) const;

  int dimension() const noexcept { return static_cast<int>(mean_.size()); }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::VectorXd& std() const noexcept { return std_; }

  bool operator==(const FeatureScaler& other) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd std_;
};

struct SvmOptions {
  double c = 1.0;
  double tol = 1e-6;
  int max_sweeps = 200000;
  /// Keep the dual objective after every sweep in BinarySvm::dual_trace.
  bool record_trace = false;
};

/// One soft-margin linear SVM: min 1/2 (|w|^2 + b^2) + C sum_i max(0, 1 - y_i (w.x_i + b)).
/// The bias is handled as a weight on a constant unit feature.
struct BinarySvm {
  Eigen::VectorXd weights;
  double bias = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  double duality_gap = 0.0;
  int sweeps = 0;
  std::vector<double> dual_trace;

  double decision(const Eigen::VectorXd& x) const { return weights.dot(x) + bias; }
  bool operator==(const BinarySvm& other) const;
};

/// Dual coordinate descent over examples, visited in an rng-permuted order each
/// sweep, until primal - dual <= tol * (1 + |primal|). The gap is checked every 8 sweeps
/// and at max_sweeps; between checks, examples pinned at a bound are shrunk out.
/// Throws InputError on non-finite features or a label vector that is not +-1,
/// NumericalError if the gap is not reached within max_sweeps.
BinarySvm train_binary_svm(const FeatureMatrix& x, std::span<const int> y, const SvmOptions& options, Rng& rng);

class LinearClassifier {
 public:
  LinearClassifier(std::vector<BinarySvm> machines, double c, double tol);

  int classes() const noexcept { return static_cast<int>(machines_.size()); }
  int dimension() const noexcept { return static_cast<int>(machines_.front().weights.size()); }
  const std::vector<BinarySvm>& machines() const noexcept { return machines_; }
  double c() const noexcept { return c_; }
  double tol() const noexcept { return tol_; }

  /// w_c . x + b_c for every class; x is already standardized.
  Eigen::VectorXd scores(const Eigen::VectorXd& x) const;

  bool operator==(const LinearClassifier& other) const;

 private:
  std::vector<BinarySvm> machines_;
  double c_;
  double tol_;
};

/// One machine per class (label == c vs rest); machine c draws from stream.child("svm-class-c").
LinearClassifier train_ovr_svm(const FeatureMatrix& features, std::span<const int> labels, int classes,
                               const SvmOptions& options, const RngStream& stream);

/// Argmax of scores, exact ties to the lowest class index.
int argmax_lowest(const Eigen::VectorXd& scores);

/// Standardizes x with the scaler and returns the winning class. Throws InputError on dimension mismatch.
int predict(const LinearClassifier& classifier, const FeatureScaler& scaler, const Eigen::VectorXd& x);

}  // namespace crossdecode
