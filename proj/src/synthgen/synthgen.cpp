#include "crossdecode/synthgen.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>

#include "crossdecode/epo1.hpp"
#include "crossdecode/errors.hpp"
#include "crossdecode/kernels.hpp"
#include "crossdecode/parallel.hpp"
#include "crossdecode/preprocess.hpp"
#include "crossdecode/rng.hpp"

namespace crossdecode {
namespace {

Eigen::MatrixXd unit_columns(Rng rng, int rows, int cols) {
  Eigen::MatrixXd out(rows, cols);
  for (int k = 0; k < cols; ++k) {
    for (int c = 0; c < rows; ++c) out(c, k) = rng.normal();
    out.col(k).normalize();
  }
  return out;
}

}  // namespace

void SynthConfig::validate() const {
  if (classes < 2) throw ConfigError(fmt::format("classes must be >= 2, got {}", classes));
  if (channels < 4) throw ConfigError(fmt::format("channels must be >= 4, got {}", channels));
  if (!(fs > 0.0) || !std::isfinite(fs)) throw ConfigError(fmt::format("fs must be positive, got {}", fs));
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw ConfigError(fmt::format("duration must be positive, got {}", duration));
  if (samples() < Epoch::kMinSamples)
    throw ConfigError(fmt::format("duration {} s at {} Hz gives fewer than {} samples", duration, fs, Epoch::kMinSamples));
  if (trials_per_class < 1) throw ConfigError(fmt::format("trials per class must be >= 1, got {}", trials_per_class));
  if (!(relatedness >= 0.0 && relatedness <= 1.0))
    throw ConfigError(fmt::format("relatedness must be in [0, 1], got {}", relatedness));
  if (!(snr > 0.0) || !std::isfinite(snr)) throw ConfigError(fmt::format("snr must be positive, got {}", snr));
  if (!(noise_std > 0.0)) throw ConfigError(fmt::format("noise std must be positive, got {}", noise_std));
  if (!(source_band.low > 0.0 && source_band.low < source_band.high && source_band.high < fs / 2.0))
    throw ConfigError(fmt::format("source band {}:{} Hz outside (0, fs/2)", source_band.low, source_band.high));
}

int SynthConfig::samples() const { return static_cast<int>(std::lround(fs * duration)); }

std::string relatedness_label(double relatedness) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), relatedness);
  return std::string(buf, res.ptr);
}

Eigen::MatrixXd base_patterns(const SynthConfig& config) {
  return unit_columns(derive_rng(config.seed, "base-patterns"), config.channels, config.classes);
}

Eigen::MatrixXd paradigm_patterns(const SynthConfig& config) {
  return unit_columns(derive_rng(config.seed, "paradigm-" + relatedness_label(config.relatedness)), config.channels,
                      config.classes);
}

Eigen::MatrixXd class_patterns(const SynthConfig& config) {
  const double rho = config.relatedness;
  if (rho == 1.0) return base_patterns(config);
  Eigen::MatrixXd mixed = rho * base_patterns(config) + (1.0 - rho) * paradigm_patterns(config);
  for (int k = 0; k < mixed.cols(); ++k) {
    const double norm = mixed.col(k).norm();
    if (!(norm > 0.0)) throw DegenerateInputError(fmt::format("class {} pattern cancels to zero", k));
    mixed.col(k) /= norm;
  }
  return mixed;
}

LabeledDataset generate_dataset(const SynthConfig& config) {
  config.validate();
  const Eigen::MatrixXd patterns = class_patterns(config);
  const int n = config.samples();
  const int total = config.classes * config.trials_per_class;
  const auto source_filter = BandpassFilter::design(config.source_band, config.fs);
  const double source_std = std::sqrt(config.snr) * config.noise_std;
  const std::string paradigm_prefix = "paradigm-" + relatedness_label(config.relatedness);

  std::vector<Epoch> epochs(static_cast<std::size_t>(total), Epoch(SignalMatrix::Zero(2, Epoch::kMinSamples), config.fs));
  std::vector<int> labels(static_cast<std::size_t>(total));
  parallel_for(static_cast<std::size_t>(total), [&](std::size_t t) {
    const int k = static_cast<int>(t) % config.classes;
    const int i = static_cast<int>(t) / config.classes;
    Rng rng = derive_rng(config.seed, fmt::format("{}/trial-{}-{}", paradigm_prefix, k, i));

    std::vector<double> source(static_cast<std::size_t>(n));
    for (double& v : source) v = rng.normal();
    source_filter.filter_zero_phase(source, source);
    const double mean = kernels::sum(source) / n;
    const double sd = std::sqrt(kernels::centered_sum_squares(source, mean) / n);
    for (double& v : source) v = (v - mean) / sd * source_std;

    SignalMatrix x(config.channels, n);
    for (int c = 0; c < config.channels; ++c)
      for (int s = 0; s < n; ++s) x(c, s) = config.noise_std * rng.normal();
    for (int c = 0; c < config.channels; ++c) {
      std::span<double> row(x.data() + static_cast<std::ptrdiff_t>(c) * n, static_cast<std::size_t>(n));
      kernels::axpy(patterns(c, k), source, row);
    }
    epochs[t] = round_to_f32(Epoch(std::move(x), config.fs));
    labels[t] = k;
  });

  std::vector<std::string> names;
  for (int k = 0; k < config.classes; ++k) names.push_back(fmt::format("class-{}", k));
  return LabeledDataset(std::move(epochs), std::move(labels), std::move(names), "synthetic", config.relatedness);
}

}  // namespace crossdecode
