#include <fmt/format.h>

#include <cmath>

#include "crossdecode/classifier.hpp"
#include "crossdecode/eigen_util.hpp"
#include "crossdecode/errors.hpp"

namespace crossdecode {

FeatureScaler::FeatureScaler(Eigen::VectorXd mean, Eigen::VectorXd std) : mean_(std::move(mean)), std_(std::move(std)) {
  if (mean_.size() != std_.size()) throw InputError("scaler mean and std lengths differ");
  for (Eigen::Index i = 0; i < std_.size(); ++i) std_(i) = std::max(std_(i), kStdFloor);
}

FeatureScaler FeatureScaler::fit(const FeatureMatrix& features) {
  if (features.rows() < 2)
    throw InputError(fmt::format("scaler needs at least 2 rows, got {}", features.rows()));
  if (!features.allFinite()) throw InputError("non-finite feature values");
  const auto n = static_cast<double>(features.rows());
  Eigen::VectorXd mean = features.colwise().mean().transpose();
  Eigen::VectorXd std(features.cols());
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    const double ss = (features.col(j).array() - mean(j)).square().sum();
    std(j) = std::sqrt(ss / (n - 1.0));
  }
  return FeatureScaler(std::move(mean), std::move(std));
}

Eigen::VectorXd FeatureScaler::apply(const Eigen::VectorXd& x) const {
  if (x.size() != mean_.size())
    throw InputError(fmt::format("feature vector has {} entries, scaler expects {}", x.size(), mean_.size()));
  return ((x - mean_).array() / std_.array()).matrix();
}

FeatureMatrix FeatureScaler::apply(const FeatureMatrix& rows) const {
  if (rows.cols() != mean_.size())
    throw InputError(fmt::format("feature matrix has {} columns, scaler expects {}", rows.cols(), mean_.size()));
  FeatureMatrix out = rows.rowwise() - mean_.transpose();
  out.array().rowwise() /= std_.transpose().array();
  return out;
}

bool FeatureScaler::operator==(const FeatureScaler& other) const {
  return exactly_equal(mean_, other.mean_) && exactly_equal(std_, other.std_);
}

}  // namespace crossdecode
