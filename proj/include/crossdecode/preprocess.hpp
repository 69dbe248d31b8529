#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

#include "crossdecode/types.hpp"

namespace crossdecode {

/// One second-order section, transfer function (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2).
struct Biquad {
  double b0, b1, b2, a1, a2;
};

/// Digital Butterworth band-pass built from an analog prototype of the given
/// order by the low-pass to band-pass transform and a prewarped bilinear map.
/// The realized filter has 2*order poles, stored as `order` biquads, each
/// normalized to unit gain at the band centre.
class BandpassFilter {
 public:
  static constexpr int kDefaultOrder = 4;

  /// Throws ConfigError unless 0 < low < high < fs/2 and order >= 1.
  static BandpassFilter design(Band band, double fs, int order = kDefaultOrder);

  const std::vector<Biquad>& sections() const noexcept { return sections_; }
  Band band() const noexcept { return band_; }
  double fs() const noexcept { return fs_; }
  /// Order of the realized band-pass transfer function (twice the prototype order).
  int transfer_order() const noexcept { return 2 * static_cast<int>(sections_.size()); }
  /// Samples of even reflection added at each end before the two passes.
  int pad_length() const noexcept { return 3 * transfer_order(); }

  /// |H(e^{j 2 pi f / fs})| of a single forward pass, evaluated from the sections.
  double magnitude(double freq_hz) const;

  /// Single causal pass with zero initial state. `out` may alias `in`.
  void filter(std::span<const double> in, std::span<double> out) const;
  /// Forward pass then time-reversed pass over an evenly reflected, padded copy.
  void filter_zero_phase(std::span<const double> in, std::span<double> out) const;

 private:
  BandpassFilter(std::vector<Biquad> sections, Band band, double fs)
      : sections_(std::move(sections)), band_(band), fs_(fs) {}

  std::vector<Biquad> sections_;
  Band band_;
  double fs_;
};

/// Zero-phase band-pass of every channel.
Epoch bandpass(const Epoch& epoch, Band band);
Epoch bandpass(const Epoch& epoch, const BandpassFilter& filter);

/// Subtracts the across-channel mean from each sample.
Epoch common_average_reference(const Epoch& epoch);

struct Covariance {
  Eigen::MatrixXd matrix;
  bool trace_normalized = false;
};

/// X X^T / trace(X X^T) after per-channel mean removal.
/// Throws DegenerateInputError when the centered epoch is identically zero.
Covariance trial_covariance(const Epoch& epoch);

/// (1 - gamma) S + gamma * (trace(S) / C) I
Covariance shrink(const Covariance& cov, double gamma);

/// Mean of trial covariances over trials labelled `cls`, or over every other
/// class when `complement` is set, followed by shrinkage.
Covariance class_covariance(const LabeledDataset& dataset, int cls, bool complement, double gamma);

/// Same as above from precomputed per-trial covariances aligned with `labels`.
Covariance class_covariance(std::span<const Covariance> trial_covs, std::span<const int> labels, int cls,
                            bool complement, double gamma);

}  // namespace crossdecode
