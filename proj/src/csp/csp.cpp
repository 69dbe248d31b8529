#include "crossdecode/csp.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "crossdecode/eigen_util.hpp"
#include "crossdecode/errors.hpp"
#include "crossdecode/kernels.hpp"
#include "crossdecode/parallel.hpp"

namespace crossdecode {
namespace {

// Indices of `values` ordered by descending value, ties by lowest index.
std::vector<Eigen::Index> descending_order(const Eigen::VectorXd& values) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });
  return order;
}

void apply_sign_convention(Eigen::MatrixXd& filters) {
  for (Eigen::Index r = 0; r < filters.rows(); ++r) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index c = 0; c < filters.cols(); ++c) {
      const double a = std::abs(filters(r, c));
      if (a > best) {
        best = a;
        arg = c;
      }
    }
    if (filters(r, arg) < 0.0) filters.row(r) *= -1.0;
  }
}

}  // namespace

bool BinaryCsp::operator==(const BinaryCsp& other) const {
  return exactly_equal(filters, other.filters) && exactly_equal(eigenvalues, other.eigenvalues);
}

BinaryCsp fit_binary_csp(const Covariance& cov_a, const Covariance& cov_b, int m) {
  const Eigen::MatrixXd& a = cov_a.matrix;
  const Eigen::MatrixXd& b = cov_b.matrix;
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw InputError(fmt::format("covariance shapes {}x{} and {}x{} differ", a.rows(), a.cols(), b.rows(), b.cols()));
  if (m < 1) throw ConfigError(fmt::format("filter pairs must be >= 1, got {}", m));

  const Eigen::MatrixXd composite = a + b;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> composite_eig(composite);
  if (composite_eig.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of the composite covariance failed");

  const Eigen::VectorXd& lambda = composite_eig.eigenvalues();
  const double lambda_max = lambda.maxCoeff();
  if (!(lambda_max > 0.0)) throw DegenerateInputError("composite covariance is zero");

  std::vector<Eigen::Index> kept;
  for (Eigen::Index i : descending_order(lambda))
    if (lambda(i) >= kRankFloor * lambda_max) kept.push_back(i);
  const auto rank = static_cast<int>(kept.size());
  if (2 * m > rank)
    throw RankError(fmt::format("{} filters requested but composite covariance has effective rank {}; "
                                "at most {} pairs achievable",
                                2 * m, rank, rank / 2),
                    rank / 2);

  // Whitening P = Lambda^(-1/2) U^T restricted to kept directions.
  Eigen::MatrixXd whitening(rank, a.cols());
  for (int r = 0; r < rank; ++r)
    whitening.row(r) = composite_eig.eigenvectors().col(kept[r]).transpose() / std::sqrt(lambda(kept[r]));

  Eigen::MatrixXd whitened_a = whitening * a * whitening.transpose();
  whitened_a = 0.5 * (whitened_a + whitened_a.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> s_eig(whitened_a);
  if (s_eig.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of the whitened class covariance failed");

  const auto order = descending_order(s_eig.eigenvalues());
  BinaryCsp out;
  out.filters.resize(2 * m, a.cols());
  out.eigenvalues.resize(2 * m);
  for (int j = 0; j < 2 * m; ++j) {
    const Eigen::Index src = j < m ? order[j] : order[rank - 2 * m + j];
    out.filters.row(j) = s_eig.eigenvectors().col(src).transpose() * whitening;
    out.eigenvalues(j) = s_eig.eigenvalues()(src);
  }
  apply_sign_convention(out.filters);
  return out;
}

SpatialFilterBank::SpatialFilterBank(std::vector<BinaryCsp> sub_banks, int channels, int m)
    : sub_banks_(std::move(sub_banks)), channels_(channels), m_(m) {
  for (const auto& sb : sub_banks_)
    if (sb.filters.rows() != 2 * m || sb.filters.cols() != channels || sb.eigenvalues.size() != 2 * m)
      throw InputError("sub-bank shape does not match the bank");
}

SpatialFilterBank fit_ovr_bank(std::span<const Covariance> trial_covs, std::span<const int> labels,
                               int classes, int m, double gamma) {
  if (trial_covs.empty()) throw DegenerateInputError("no trials to fit filters on");
  const int channels = static_cast<int>(trial_covs.front().matrix.rows());
  std::vector<BinaryCsp> sub_banks(classes);
  parallel_for(static_cast<std::size_t>(classes), [&](std::size_t c) {
    const int cls = static_cast<int>(c);
    try {
      const Covariance own = class_covariance(trial_covs, labels, cls, false, gamma);
      const Covariance rest = class_covariance(trial_covs, labels, cls, true, gamma);
      sub_banks[c] = fit_binary_csp(own, rest, m);
    } catch (const RankError& e) {
      throw RankError(fmt::format("class {}: {}", cls, e.what()), e.max_pairs());
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("class {}: {}", cls, e.what()));
    }
  });
  return SpatialFilterBank(std::move(sub_banks), channels, m);
}

SpatialFilterBank fit_ovr_bank(const LabeledDataset& dataset, int m, double gamma) {
  std::vector<Covariance> covs(dataset.size());
  parallel_for(covs.size(), [&](std::size_t i) { covs[i] = trial_covariance(dataset.epochs()[i]); });
  return fit_ovr_bank(covs, dataset.labels(), dataset.class_count(), m, gamma);
}

Eigen::VectorXd extract_features(const SpatialFilterBank& bank, const Epoch& epoch) {
  if (epoch.channels() != bank.channels())
    throw InputError(fmt::format("epoch has {} channels, filter bank expects {}", epoch.channels(), bank.channels()));
  const int per_bank = 2 * bank.m();
  const auto n = static_cast<std::size_t>(epoch.samples());
  Eigen::VectorXd features(bank.feature_count());
  std::vector<double> projection(n);
  std::vector<double> variances(per_bank);

  for (int c = 0; c < bank.classes(); ++c) {
    const Eigen::MatrixXd& w = bank.sub_banks()[c].filters;
    double total = 0.0;
    for (int j = 0; j < per_bank; ++j) {
      std::fill(projection.begin(), projection.end(), 0.0);
      for (int ch = 0; ch < epoch.channels(); ++ch) kernels::axpy(w(j, ch), epoch.channel(ch), projection);
      const double mean = kernels::sum(projection) / static_cast<double>(n);
      variances[j] = kernels::centered_sum_squares(projection, mean) / static_cast<double>(n);
      total += variances[j];
    }
    if (!(total > 0.0))
      throw DegenerateInputError(fmt::format("zero projected variance in sub-bank {}", c));
    for (int j = 0; j < per_bank; ++j)
      if (!(variances[j] > 0.0))
        throw DegenerateInputError(fmt::format("filter {} of sub-bank {} has zero projected variance", j, c));
    for (int j = 0; j < per_bank; ++j) features(c * per_bank + j) = std::log(variances[j] / total);
  }
  return features;
}

}  // namespace crossdecode
