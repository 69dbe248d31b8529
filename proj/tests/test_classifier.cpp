#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "crossdecode/classifier.hpp"
#include "crossdecode/errors.hpp"
#include "crossdecode/rng.hpp"

namespace cd = crossdecode;

namespace {

struct Blobs {
  cd::FeatureMatrix x;
  std::vector<int> labels;
};

// Well separated Gaussian blobs, one per class, centred on scaled axes.
Blobs blobs(std::uint64_t seed, int classes, int per_class, int dim, double spread) {
  cd::Rng rng = cd::derive_rng(seed, "blobs");
  Blobs b;
  b.x.resize(classes * per_class, dim);
  for (int i = 0; i < classes * per_class; ++i) {
    const int k = i % classes;
    for (int j = 0; j < dim; ++j) b.x(i, j) = spread * rng.normal() + (j == k % dim ? 10.0 : 0.0) * (k < dim ? 1 : -1);
    b.labels.push_back(k);
  }
  return b;
}

std::vector<int> binary_labels(const std::vector<int>& labels, int positive) {
  std::vector<int> y;
  for (int l : labels) y.push_back(l == positive ? 1 : -1);
  return y;
}

}  // namespace

TEST(Scaler, ZScoresTrainingColumns) {
  cd::FeatureMatrix x(4, 2);
  x << 1, 10, 2, 10, 3, 10, 4, 10;
  const auto s = cd::FeatureScaler::fit(x);
  EXPECT_DOUBLE_EQ(s.mean()(0), 2.5);
  EXPECT_DOUBLE_EQ(s.std()(0), std::sqrt(5.0 / 3.0));
  EXPECT_EQ(s.std()(1), cd::FeatureScaler::kStdFloor);
  const auto z = s.apply(x);
  EXPECT_NEAR(z.col(0).mean(), 0.0, 1e-15);
  EXPECT_NEAR((z.col(0).array() - z.col(0).mean()).square().sum() / 3.0, 1.0, 1e-12);
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_EQ(z(i, 1), 0.0);
  EXPECT_THROW(cd::FeatureScaler::fit(cd::FeatureMatrix(1, 2)), cd::InputError);
  EXPECT_THROW(s.apply(Eigen::VectorXd(3)), cd::InputError);
}

TEST(BinarySvm, SymmetricPairHasAnalyticSolution) {
  // min 0.5 (w^2 + b^2) + C sum hinge: with x = +1 / -1 the optimum is w = 1, b = 0.
  cd::FeatureMatrix x(2, 2);
  x << 1, 0, -1, 0;
  const std::vector<int> y{1, -1};
  cd::Rng rng = cd::derive_rng(71, "svm");
  cd::SvmOptions opt;
  opt.tol = 1e-12;
  const auto m = cd::train_binary_svm(x, y, opt, rng);
  EXPECT_NEAR(m.weights(0), 1.0, 1e-5);
  EXPECT_NEAR(m.weights(1), 0.0, 1e-12);
  EXPECT_NEAR(m.bias, 0.0, 1e-12);
  EXPECT_NEAR(m.primal, 0.5, 1e-6);
  EXPECT_NEAR(m.dual, 0.5, 1e-6);
}

TEST(BinarySvm, SmallCLeavesPointsInsideMargin) {
  // With C = 0.25 both duals saturate at C, so w = 2C = 0.5.
  cd::FeatureMatrix x(2, 1);
  x << 1, -1;
  const std::vector<int> y{1, -1};
  cd::Rng rng = cd::derive_rng(72, "svm");
  cd::SvmOptions opt;
  opt.c = 0.25;
  opt.tol = 1e-12;
  const auto m = cd::train_binary_svm(x, y, opt, rng);
  EXPECT_NEAR(m.weights(0), 0.5, 1e-9);
  EXPECT_NEAR(m.primal, 0.5 * 0.25 + 0.25 * 2 * 0.5, 1e-9);
}

TEST(BinarySvm, DuplicatingPointsMatchesDoublingC) {
  const auto b = blobs(73, 2, 20, 3, 4.0);
  const auto y = binary_labels(b.labels, 0);
  cd::FeatureMatrix doubled(2 * b.x.rows(), b.x.cols());
  doubled << b.x, b.x;
  std::vector<int> y2 = y;
  y2.insert(y2.end(), y.begin(), y.end());
  cd::SvmOptions opt;
  opt.tol = 1e-12;
  cd::Rng r1 = cd::derive_rng(73, "dup");
  const auto dup = cd::train_binary_svm(doubled, y2, opt, r1);
  opt.c = 2.0;
  cd::Rng r2 = cd::derive_rng(73, "dup");
  const auto twice_c = cd::train_binary_svm(b.x, y, opt, r2);
  EXPECT_NEAR(dup.primal, twice_c.primal, 1e-9 * (1.0 + twice_c.primal));
  EXPECT_LE((dup.weights - twice_c.weights).cwiseAbs().maxCoeff(), 1e-4);
  EXPECT_NEAR(dup.bias, twice_c.bias, 1e-4);
}

TEST(BinarySvm, DualNonDecreasingAndGapWithinTolerance) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto b = blobs(74 + seed, 3, 30, 4, 6.0);  // overlapping, so C binds
    const auto y = binary_labels(b.labels, static_cast<int>(seed % 3));
    cd::SvmOptions opt;
    opt.record_trace = true;
    cd::Rng rng = cd::derive_rng(seed, "trace");
    const auto m = cd::train_binary_svm(b.x, y, opt, rng);
    ASSERT_EQ(m.dual_trace.size(), static_cast<std::size_t>(m.sweeps));
    EXPECT_GT(m.sweeps, 1);
    for (std::size_t i = 1; i < m.dual_trace.size(); ++i)
      EXPECT_GE(m.dual_trace[i], m.dual_trace[i - 1] - 1e-12 * std::abs(m.dual_trace[i - 1]))
          << "seed " << seed << " sweep " << i;
    EXPECT_LE(m.duality_gap, opt.tol * (1.0 + std::abs(m.primal)));
    EXPECT_GE(m.duality_gap, -1e-9 * (1.0 + std::abs(m.primal)));
  }
}

TEST(BinarySvm, DeterministicForFixedStream) {
  const auto b = blobs(75, 2, 25, 3, 5.0);
  const auto y = binary_labels(b.labels, 1);
  cd::Rng r1 = cd::derive_rng(1, "det");
  cd::Rng r2 = cd::derive_rng(1, "det");
  EXPECT_EQ(cd::train_binary_svm(b.x, y, {}, r1), cd::train_binary_svm(b.x, y, {}, r2));
}

TEST(BinarySvm, RejectsBadInput) {
  cd::FeatureMatrix x(2, 1);
  x << 1, -1;
  cd::Rng rng = cd::derive_rng(76, "bad");
  EXPECT_THROW(cd::train_binary_svm(x, std::vector<int>{1, 0}, {}, rng), cd::InputError);
  EXPECT_THROW(cd::train_binary_svm(x, std::vector<int>{1}, {}, rng), cd::InputError);
  cd::SvmOptions opt;
  opt.c = 0.0;
  EXPECT_THROW(cd::train_binary_svm(x, std::vector<int>{1, -1}, opt, rng), cd::ConfigError);
}

TEST(BinarySvm, SweepLimitIsNumericalError) {
  const auto b = blobs(77, 2, 40, 3, 6.0);
  const auto y = binary_labels(b.labels, 0);
  cd::SvmOptions opt;
  opt.max_sweeps = 1;
  opt.tol = 1e-15;
  cd::Rng rng = cd::derive_rng(77, "limit");
  EXPECT_THROW(cd::train_binary_svm(b.x, y, opt, rng), cd::NumericalError);
}

TEST(OvrSvm, SeparableSetsReachFullTrainingAccuracy) {
  for (int classes : {2, 3, 5}) {
    const auto b = blobs(78 + static_cast<std::uint64_t>(classes), classes, 20, 5, 0.5);
    const auto scaler = cd::FeatureScaler::fit(b.x);
    const auto clf = cd::train_ovr_svm(scaler.apply(b.x), b.labels, classes, {}, {78, "ovr"});
    for (const auto& m : clf.machines()) EXPECT_LE(m.duality_gap, 1e-6 * (1.0 + std::abs(m.primal)));
    int correct = 0;
    for (Eigen::Index i = 0; i < b.x.rows(); ++i)
      correct += cd::predict(clf, scaler, b.x.row(i).transpose()) == b.labels[static_cast<std::size_t>(i)];
    EXPECT_EQ(correct, b.x.rows()) << classes << " classes";
  }
}

TEST(OvrSvm, ConstantShiftOfFeaturesLeavesPredictionsUnchanged) {
  const auto train = blobs(80, 4, 15, 6, 6.0);
  const auto test = blobs(81, 4, 10, 6, 6.0);
  Eigen::VectorXd shift(6);
  shift << 100, -3, 0.5, 42, -7, 1e3;
  cd::FeatureMatrix shifted = train.x.rowwise() + shift.transpose();

  const auto s1 = cd::FeatureScaler::fit(train.x);
  const auto s2 = cd::FeatureScaler::fit(shifted);
  const auto c1 = cd::train_ovr_svm(s1.apply(train.x), train.labels, 4, {}, {81, "shift"});
  const auto c2 = cd::train_ovr_svm(s2.apply(shifted), train.labels, 4, {}, {81, "shift"});
  for (Eigen::Index i = 0; i < test.x.rows(); ++i) {
    const Eigen::VectorXd x = test.x.row(i).transpose();
    EXPECT_EQ(cd::predict(c1, s1, x), cd::predict(c2, s2, x + shift)) << "row " << i;
  }
}

TEST(OvrSvm, ParallelismDoesNotChangeResult) {
  const auto b = blobs(82, 5, 20, 8, 5.0);
  const auto reference = cd::train_ovr_svm(b.x, b.labels, 5, {}, {82, "par"});
  for (int rep = 0; rep < 3; ++rep) EXPECT_EQ(cd::train_ovr_svm(b.x, b.labels, 5, {}, {82, "par"}), reference);
}

TEST(OvrSvm, RejectsMissingClass) {
  const auto b = blobs(83, 3, 5, 3, 1.0);
  EXPECT_THROW(cd::train_ovr_svm(b.x, b.labels, 4, {}, {83, "missing"}), cd::InputError);
  EXPECT_THROW(cd::train_ovr_svm(b.x, b.labels, 1, {}, {83, "missing"}), cd::ConfigError);
}

TEST(OvrSvm, ArgmaxTiesGoToLowestIndex) {
  EXPECT_EQ(cd::argmax_lowest(Eigen::Vector3d(1.0, 1.0, 0.5)), 0);
  EXPECT_EQ(cd::argmax_lowest(Eigen::Vector3d(0.0, 2.0, 2.0)), 1);
  EXPECT_EQ(cd::argmax_lowest(Eigen::Vector3d(-1.0, -2.0, -0.5)), 2);
}
