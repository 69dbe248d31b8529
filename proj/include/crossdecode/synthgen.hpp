#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>

#include "crossdecode/types.hpp"

namespace crossdecode {

struct SynthConfig {
  int classes = 5;
  int channels = 16;
  double fs = 250.0;
  double duration = 2.0;
  int trials_per_class = 50;
  double relatedness = 1.0;
  /// Variance of the class source over the per-channel noise variance.
  double snr = 5.0;
  Band source_band{8.0, 30.0};
  std::uint64_t seed = 0;
  /// Per-channel noise standard deviation in microvolts.
  double noise_std = 10.0;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
  int samples() const;
};

/// Unit-norm shared patterns a_k (stream "base-patterns"), one column per class.
Eigen::MatrixXd base_patterns(const SynthConfig& config);
/// Unit-norm paradigm-specific patterns b_k (stream "paradigm-{rho}").
Eigen::MatrixXd paradigm_patterns(const SynthConfig& config);
/// p_k = normalize(rho a_k + (1 - rho) b_k), one column per class.
Eigen::MatrixXd class_patterns(const SynthConfig& config);

/// Stream label text for a relatedness value: shortest round-trip decimal.
std::string relatedness_label(double relatedness);

/// Rank-one-per-class forward model: a trial of class k is p_k s(t) + n(t), with
/// s(t) white noise band-passed to the source band and scaled to variance
/// snr * noise_std^2, and n(t) spatially white Gaussian noise. Trials are
/// interleaved by class; trial i of class k draws from "paradigm-{rho}/trial-{k}-{i}".
/// Samples are rounded to f32 so the dataset survives an EPO1 round trip unchanged.
LabeledDataset generate_dataset(const SynthConfig& config);

}  // namespace crossdecode
