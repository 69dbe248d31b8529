#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <vector>

#include "crossdecode/errors.hpp"
#include "crossdecode/preprocess.hpp"
#include "support.hpp"

namespace cd = crossdecode;

namespace {

constexpr double kPi = std::numbers::pi;

// Order-N Butterworth band-pass magnitude after the prewarped bilinear map.
double butterworth_bandpass_gain(double f, cd::Band band, double fs, int order) {
  auto warp = [fs](double hz) { return 2.0 * fs * std::tan(kPi * hz / fs); };
  const double wl = warp(band.low), wh = warp(band.high), w = warp(f);
  const double omega = std::abs((w * w - wl * wh) / (w * (wh - wl)));
  return 1.0 / std::sqrt(1.0 + std::pow(omega, 2 * order));
}

std::vector<double> sine(double f, double fs, int n, double phase = 0.0) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = std::sin(2.0 * kPi * f * i / fs + phase);
  return x;
}

}  // namespace

TEST(Bandpass, DesignRejectsBadBands) {
  EXPECT_THROW(cd::BandpassFilter::design({0.0, 40.0}, 250.0), cd::ConfigError);
  EXPECT_THROW(cd::BandpassFilter::design({30.0, 8.0}, 250.0), cd::ConfigError);
  EXPECT_THROW(cd::BandpassFilter::design({8.0, 125.0}, 250.0), cd::ConfigError);
  EXPECT_THROW(cd::BandpassFilter::design({8.0, 30.0}, 250.0, 0), cd::ConfigError);
}

TEST(Bandpass, DefaultOrderLayout) {
  const auto f = cd::BandpassFilter::design({0.5, 40.0}, 250.0);
  EXPECT_EQ(f.sections().size(), 4u);
  EXPECT_EQ(f.transfer_order(), 8);
  EXPECT_EQ(f.pad_length(), 24);
}

TEST(Bandpass, MagnitudeMatchesAnalyticButterworth) {
  for (int order : {1, 2, 3, 4, 5}) {
    for (const cd::Band band : {cd::Band{0.5, 40.0}, cd::Band{8.0, 30.0}, cd::Band{20.0, 21.0}}) {
      const auto f = cd::BandpassFilter::design(band, 250.0, order);
      for (double hz = 0.25; hz < 125.0; hz += 0.75)
        EXPECT_NEAR(f.magnitude(hz), butterworth_bandpass_gain(hz, band, 250.0, order), 1e-9)
            << "order " << order << " band " << band.low << ":" << band.high << " f " << hz;
    }
  }
}

TEST(Bandpass, EdgesAreHalfPowerAndCentreIsUnity) {
  const cd::Band band{8.0, 30.0};
  const auto f = cd::BandpassFilter::design(band, 250.0);
  EXPECT_NEAR(f.magnitude(8.0), 1.0 / std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(f.magnitude(30.0), 1.0 / std::sqrt(2.0), 1e-9);
  const double centre = 250.0 / kPi * std::atan(std::sqrt(std::tan(kPi * 8.0 / 250.0) * std::tan(kPi * 30.0 / 250.0)));
  EXPECT_NEAR(f.magnitude(centre), 1.0, 1e-12);
}

TEST(Bandpass, ZeroPhaseSteadyStateGainAndPhase) {
  const cd::Band band{8.0, 30.0};
  const double fs = 250.0;
  const auto f = cd::BandpassFilter::design(band, fs);
  const int n = 4000;
  for (double hz : {6.0, 8.0, 15.0, 30.0, 36.0}) {
    const auto x = sine(hz, fs, n, 0.3);
    std::vector<double> y(x.size());
    f.filter_zero_phase(x, y);
    const double gain = std::pow(butterworth_bandpass_gain(hz, band, fs, 4), 2.0);
    // Far from the ends the output is the input scaled, with no phase shift.
    for (int i = 1500; i < 2500; ++i)
      ASSERT_NEAR(y[static_cast<std::size_t>(i)], gain * x[static_cast<std::size_t>(i)], 1e-6) << hz << " Hz";
  }
}

TEST(Bandpass, LinearityInSignal) {
  cd::Rng rng = cd::derive_rng(31, "bandpass-linear");
  const auto f = cd::BandpassFilter::design({0.5, 40.0}, 250.0);
  const std::size_t n = 500;
  std::vector<double> x(n), y(n), mix(n);
  const double a = 2.5, b = -0.7;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = 20.0 * rng.normal();
    y[i] = 5.0 * rng.normal() + 3.0;
    mix[i] = a * x[i] + b * y[i];
  }
  std::vector<double> fx(n), fy(n), fmix(n);
  f.filter_zero_phase(x, fx);
  f.filter_zero_phase(y, fy);
  f.filter_zero_phase(mix, fmix);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(fmix[i]));
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(fmix[i], a * fx[i] + b * fy[i], 1e-9 * scale);
}

TEST(Bandpass, AllZeroInputGivesAllZeroOutput) {
  const auto f = cd::BandpassFilter::design({0.5, 40.0}, 250.0);
  std::vector<double> x(64, 0.0), y(64, 1.0);
  f.filter_zero_phase(x, y);
  for (double v : y) EXPECT_EQ(v, 0.0);
}

TEST(Bandpass, InPlaceMatchesOutOfPlace) {
  cd::Rng rng = cd::derive_rng(32, "bandpass-alias");
  const auto f = cd::BandpassFilter::design({8.0, 30.0}, 250.0);
  std::vector<double> x(200);
  for (double& v : x) v = rng.normal();
  std::vector<double> out(x.size());
  f.filter_zero_phase(x, out);
  f.filter_zero_phase(x, x);
  EXPECT_EQ(x, out);
}

TEST(Bandpass, ShortSignalsStillFilter) {
  // Fewer samples than the padding: reflection is capped at n - 1.
  const auto f = cd::BandpassFilter::design({8.0, 30.0}, 250.0);
  std::vector<double> x{1.0, -2.0, 0.5, 3.0, -1.0, 0.0, 2.0, 1.0};
  std::vector<double> y(x.size());
  f.filter_zero_phase(x, y);
  for (double v : y) EXPECT_TRUE(std::isfinite(v));
}

TEST(Bandpass, EpochFiltersEveryChannel) {
  const double fs = 250.0;
  cd::SignalMatrix data(2, 1000);
  const auto low = sine(2.0, fs, 1000);
  const auto mid = sine(20.0, fs, 1000);
  for (int s = 0; s < 1000; ++s) {
    data(0, s) = low[static_cast<std::size_t>(s)];
    data(1, s) = mid[static_cast<std::size_t>(s)];
  }
  const cd::Epoch out = cd::bandpass(cd::Epoch(data, fs), cd::Band{8.0, 30.0});
  double low_peak = 0.0, mid_peak = 0.0;
  for (int s = 300; s < 700; ++s) {
    low_peak = std::max(low_peak, std::abs(out.data()(0, s)));
    mid_peak = std::max(mid_peak, std::abs(out.data()(1, s)));
  }
  EXPECT_LT(low_peak, 1e-3);
  EXPECT_GT(mid_peak, 0.95);
  EXPECT_THROW(cd::bandpass(cd::Epoch(data, fs), cd::Band{8.0, 200.0}), cd::ConfigError);
}

TEST(CommonAverage, ColumnsSumToZero) {
  cd::Rng rng = cd::derive_rng(33, "car");
  cd::SignalMatrix x(5, 16);
  for (int c = 0; c < 5; ++c)
    for (int s = 0; s < 16; ++s) x(c, s) = rng.normal() + c;
  const auto out = cd::common_average_reference(cd::Epoch(x, 100.0));
  for (int s = 0; s < 16; ++s) EXPECT_NEAR(out.data().col(s).sum(), 0.0, 1e-12);
}

TEST(Covariance, TraceNormalizedSymmetricPsd) {
  cd::Rng rng = cd::derive_rng(34, "cov");
  cd::SignalMatrix x(6, 200);
  for (int c = 0; c < 6; ++c)
    for (int s = 0; s < 200; ++s) x(c, s) = (c + 1) * rng.normal() + 10.0 * c;
  const auto cov = cd::trial_covariance(cd::Epoch(x, 250.0));
  EXPECT_TRUE(cov.trace_normalized);
  EXPECT_NEAR(cov.matrix.trace(), 1.0, 1e-12);
  EXPECT_LE((cov.matrix - cov.matrix.transpose()).cwiseAbs().maxCoeff(), 1e-12 * cov.matrix.cwiseAbs().maxCoeff());

  // Independent reference: centered outer product through Eigen.
  Eigen::MatrixXd centered = x;
  centered.colwise() -= centered.rowwise().mean();
  Eigen::MatrixXd ref = centered * centered.transpose();
  ref /= ref.trace();
  EXPECT_LE((cov.matrix - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Covariance, ChannelOffsetsDoNotMatter) {
  cd::Rng rng = cd::derive_rng(35, "cov-offset");
  cd::SignalMatrix x(3, 64);
  for (int c = 0; c < 3; ++c)
    for (int s = 0; s < 64; ++s) x(c, s) = rng.normal();
  cd::SignalMatrix shifted = x;
  shifted.row(1).array() += 1000.0;
  const auto a = cd::trial_covariance(cd::Epoch(x, 250.0));
  const auto b = cd::trial_covariance(cd::Epoch(shifted, 250.0));
  EXPECT_LE((a.matrix - b.matrix).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Covariance, ConstantEpochIsDegenerate) {
  cd::SignalMatrix x = cd::SignalMatrix::Constant(3, 16, 4.0);
  EXPECT_THROW(cd::trial_covariance(cd::Epoch(x, 250.0)), cd::DegenerateInputError);
}

TEST(Covariance, ShrinkagePreservesTrace) {
  cd::Rng rng = cd::derive_rng(36, "shrink");
  for (double gamma : {0.0, 1e-6, 0.1, 0.5, 1.0}) {
    const cd::Covariance cov{cd::testing::random_spd(rng, 7), false};
    const auto s = cd::shrink(cov, gamma);
    EXPECT_NEAR(s.matrix.trace(), cov.matrix.trace(), 1e-12 * cov.matrix.trace());
  }
  const cd::Covariance cov{cd::testing::random_spd(rng, 4), false};
  const auto full = cd::shrink(cov, 1.0);
  EXPECT_LE((full.matrix - cov.matrix.trace() / 4.0 * Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(cd::shrink(cov, -0.1), cd::ConfigError);
  EXPECT_THROW(cd::shrink(cov, 1.1), cd::ConfigError);
}

TEST(Covariance, ClassCovariancePassesEigenvalueInvariant) {
  const auto d = cd::testing::random_dataset(37, 3, 6, 5, 40);
  for (double gamma : {0.0, 1e-6, 0.3, 1.0}) {
    for (int cls = 0; cls < 3; ++cls) {
      for (bool complement : {false, true}) {
        const auto cov = cd::class_covariance(d, cls, complement, gamma);
        const double scale = cov.matrix.cwiseAbs().maxCoeff();
        EXPECT_LE((cov.matrix - cov.matrix.transpose()).cwiseAbs().maxCoeff(), 1e-12 * scale);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov.matrix);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * es.eigenvalues().maxCoeff());
        EXPECT_NEAR(cov.matrix.trace(), 1.0, 1e-12);
      }
    }
  }
}

TEST(Covariance, ClassCovarianceIsMeanOfMembers) {
  const auto d = cd::testing::random_dataset(38, 2, 3, 3, 20);
  Eigen::MatrixXd members = Eigen::MatrixXd::Zero(3, 3);
  Eigen::MatrixXd others = Eigen::MatrixXd::Zero(3, 3);
  for (int t = 0; t < d.size(); ++t) {
    const auto c = cd::trial_covariance(d.epochs()[static_cast<std::size_t>(t)]).matrix;
    (d.labels()[static_cast<std::size_t>(t)] == 1 ? members : others) += c;
  }
  EXPECT_LE((cd::class_covariance(d, 1, false, 0.0).matrix - members / 3.0).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((cd::class_covariance(d, 1, true, 0.0).matrix - others / 3.0).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Bandpass, RmsRatioAtCentreAndAboveBand) {
  const double fs = 250.0;
  const int n = 2000;
  auto rms_ratio = [&](double hz) {
    cd::SignalMatrix x(2, n);
    const auto s = sine(hz, fs, n);
    for (int i = 0; i < n; ++i) x(0, i) = x(1, i) = s[static_cast<std::size_t>(i)];
    const auto y = cd::bandpass(cd::Epoch(x, fs), cd::Band{8.0, 30.0});
    return std::sqrt(y.data().row(0).squaredNorm() / x.row(0).squaredNorm());
  };
  EXPECT_GE(rms_ratio(std::sqrt(8.0 * 30.0)), 0.99);
  EXPECT_LE(rms_ratio(60.0), 0.05);
}

TEST(Covariance, IdenticalChannelsGiveRankOneHalfDiagonal) {
  cd::Rng rng = cd::derive_rng(39, "cov-identical");
  cd::SignalMatrix x(2, 50);
  for (int s = 0; s < 50; ++s) x(0, s) = x(1, s) = rng.normal();
  const auto cov = cd::trial_covariance(cd::Epoch(x, 250.0));
  EXPECT_NEAR(cov.matrix(0, 0), 0.5, 1e-12);
  EXPECT_NEAR(cov.matrix(1, 1), 0.5, 1e-12);
  EXPECT_NEAR(cov.matrix.determinant(), 0.0, 1e-12);
}

TEST(Covariance, UncorrelatedChannelsHaveSmallOffDiagonals) {
  cd::Rng rng = cd::derive_rng(40, "cov-white");
  cd::SignalMatrix x(4, 10000);
  for (int c = 0; c < 4; ++c)
    for (int s = 0; s < 10000; ++s) x(c, s) = rng.normal();
  const auto cov = cd::trial_covariance(cd::Epoch(x, 250.0));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) {
        EXPECT_LT(std::abs(cov.matrix(i, j)), 0.05);
      }
}

TEST(Covariance, ClassCovarianceSpecialCases) {
  const auto d = cd::testing::random_dataset(41, 2, 2, 3, 20);
  // Class 0 has trials 0 and 2, class 1 trials 1 and 3.
  const auto a = cd::trial_covariance(d.epochs()[0]).matrix;
  const auto b = cd::trial_covariance(d.epochs()[2]).matrix;
  EXPECT_LE((cd::class_covariance(d, 0, false, 0.0).matrix - (a + b) / 2.0).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((cd::class_covariance(d, 0, false, 1.0).matrix - Eigen::MatrixXd::Identity(3, 3) / 3.0)
                .cwiseAbs()
                .maxCoeff(),
            1e-15);
  const auto single = d.subset(std::vector<int>{0, 1});
  EXPECT_EQ(cd::class_covariance(single, 0, false, 0.0).matrix, a);
  EXPECT_THROW(cd::class_covariance(d, 2, false, 0.0), cd::ConfigError);
}
