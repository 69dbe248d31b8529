#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

#include "crossdecode/preprocess.hpp"
#include "crossdecode/types.hpp"

namespace crossdecode {

/// Filters for one two-class problem. Rows of `filters` are spatial filters:
/// the first m maximize variance of class A relative to A+B, the last m minimize it.
struct BinaryCsp {
  Eigen::MatrixXd filters;      // 2m x C
  Eigen::VectorXd eigenvalues;  // 2m, descending: m largest then m smallest

  bool operator==(const BinaryCsp& other) const;
};

/// Relative eigenvalue floor below which composite-covariance directions are discarded.
inline constexpr double kRankFloor = 1e-10;

/// Common spatial patterns by whitening the composite covariance A + B and
/// diagonalizing the whitened A. Filters are sign-normalized so the entry of
/// largest magnitude in each row is positive (lowest index wins a tie).
/// Throws RankError when 2m exceeds the effective rank of A + B.
BinaryCsp fit_binary_csp(const Covariance& cov_a, const Covariance& cov_b, int m);

/// One-vs-rest filters: sub-bank c separates class c from all other classes pooled.
class SpatialFilterBank {
 public:
  SpatialFilterBank(std::vector<BinaryCsp> sub_banks, int channels, int m);

  int classes() const noexcept { return static_cast<int>(sub_banks_.size()); }
  int channels() const noexcept { return channels_; }
  int m() const noexcept { return m_; }
  int feature_count() const noexcept { return classes() * 2 * m_; }
  const std::vector<BinaryCsp>& sub_banks() const noexcept { return sub_banks_; }

  bool operator==(const SpatialFilterBank&) const = default;

 private:
  std::vector<BinaryCsp> sub_banks_;
  int channels_;
  int m_;
};

/// Errors from a sub-problem are rethrown with the class index in the message.
SpatialFilterBank fit_ovr_bank(const LabeledDataset& dataset, int m, double gamma);
SpatialFilterBank fit_ovr_bank(std::span<const Covariance> trial_covs, std::span<const int> labels,
                               int classes, int m, double gamma);

/// Normalized log-variance: per sub-bank, ln(v_j / sum_k v_k) over its 2m projections,
/// sub-banks concatenated in class order. Throws DegenerateInputError on zero total variance.
Eigen::VectorXd extract_features(const SpatialFilterBank& bank, const Epoch& epoch);

}  // namespace crossdecode
