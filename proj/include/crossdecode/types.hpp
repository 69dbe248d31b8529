#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace crossdecode {

/// Channels are rows; each row is contiguous so per-channel kernels see a flat span.
using SignalMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Band {
  double low = 0.5;
  double high = 40.0;

  bool operator==(const Band&) const = default;
};

/// One trial: channel_count x sample_count microvolts at sampling rate fs.
/// Immutable; copies share the underlying buffer.
class Epoch {
 public:
  static constexpr int kMinChannels = 2;
  static constexpr int kMinSamples = 8;

  /// Throws InputError unless every value is finite, channels >= 2, samples >= 8, fs > 0.
  Epoch(SignalMatrix data, double fs);

  const SignalMatrix& data() const noexcept { return *data_; }
  double fs() const noexcept { return fs_; }
  int channels() const noexcept { return static_cast<int>(data_->rows()); }
  int samples() const noexcept { return static_cast<int>(data_->cols()); }
  std::span<const double> channel(int c) const noexcept {
    return {data_->data() + static_cast<std::ptrdiff_t>(c) * data_->cols(),
            static_cast<std::size_t>(data_->cols())};
  }

  bool operator==(const Epoch& other) const;

 private:
  std::shared_ptr<const SignalMatrix> data_;
  double fs_;
};

/// A paradigm-tagged collection of equally shaped trials with class labels.
class LabeledDataset {
 public:
  /// Validates every invariant: matching lengths, shared shape and fs,
  /// K >= 2, every label in [0, K) and every class present.
  LabeledDataset(std::vector<Epoch> epochs, std::vector<int> labels,
                 std::vector<std::string> class_names, std::string paradigm,
                 std::optional<double> relatedness = std::nullopt);

  const std::vector<Epoch>& epochs() const noexcept { return epochs_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }
  const std::string& paradigm() const noexcept { return paradigm_; }
  const std::optional<double>& relatedness() const noexcept { return relatedness_; }

  int size() const noexcept { return static_cast<int>(epochs_.size()); }
  int class_count() const noexcept { return static_cast<int>(class_names_.size()); }
  int channels() const noexcept { return epochs_.front().channels(); }
  int samples() const noexcept { return epochs_.front().samples(); }
  double fs() const noexcept { return epochs_.front().fs(); }

  std::vector<int> class_counts() const;
  /// Indices of trials with the given label, in dataset order.
  std::vector<int> indices_of(int cls) const;

  /// New dataset holding the listed trials in the given order. Fails if a class vanishes.
  LabeledDataset subset(std::span<const int> indices) const;
  /// Same trials and metadata with every epoch replaced. Shapes must match.
  LabeledDataset with_epochs(std::vector<Epoch> epochs) const;
  /// Same trials with labels replaced.
  LabeledDataset with_labels(std::vector<int> labels) const;

  bool operator==(const LabeledDataset& other) const;

 private:
  std::vector<Epoch> epochs_;
  std::vector<int> labels_;
  std::vector<std::string> class_names_;
  std::string paradigm_;
  std::optional<double> relatedness_;
};

/// Hyperparameters of one decoding run.
struct RunConfig {
  std::uint64_t seed = 0;
  Band band{0.5, 40.0};
  int m_pairs = 3;
  double shrinkage = 1e-6;
  double svm_c = 1.0;
  double svm_tol = 1e-6;
  int folds = 10;
  int few_trials_per_class = 10;
  int bootstrap_b = 10000;
  bool common_average_reference = false;

  /// Throws ConfigError on out-of-range values; fs is the sampling rate the band will be used at.
  void validate(double fs) const;
  /// Stable text form used for hashing and report headers.
  std::string canonical() const;
  std::uint64_t hash() const;

  bool operator==(const RunConfig&) const = default;
};

}  // namespace crossdecode
