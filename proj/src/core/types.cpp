#include "crossdecode/types.hpp"

#include <fmt/format.h>

#include <cmath>

#include "crossdecode/errors.hpp"
#include "crossdecode/rng.hpp"

namespace crossdecode {

Epoch::Epoch(SignalMatrix data, double fs) : fs_(fs) {
  if (data.rows() < kMinChannels)
    throw InputError(fmt::format("epoch needs at least {} channels, got {}", kMinChannels, data.rows()));
  if (data.cols() < kMinSamples)
    throw InputError(fmt::format("epoch needs at least {} samples, got {}", kMinSamples, data.cols()));
  if (!(fs > 0.0) || !std::isfinite(fs))
    throw InputError(fmt::format("sampling rate must be positive, got {}", fs));
  if (!data.allFinite()) throw InputError("epoch contains non-finite samples");
  data_ = std::make_shared<const SignalMatrix>(std::move(data));
}

bool Epoch::operator==(const Epoch& other) const {
  if (data_ == other.data_) return fs_ == other.fs_;
  return fs_ == other.fs_ && data_->rows() == other.data_->rows() &&
         data_->cols() == other.data_->cols() && *data_ == *other.data_;
}

LabeledDataset::LabeledDataset(std::vector<Epoch> epochs, std::vector<int> labels,
                               std::vector<std::string> class_names, std::string paradigm,
                               std::optional<double> relatedness)
    : epochs_(std::move(epochs)),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)),
      paradigm_(std::move(paradigm)),
      relatedness_(relatedness) {
  if (epochs_.empty()) throw InputError("dataset has no trials");
  if (epochs_.size() != labels_.size())
    throw InputError(fmt::format("{} epochs but {} labels", epochs_.size(), labels_.size()));
  if (class_names_.size() < 2)
    throw InputError(fmt::format("dataset needs at least 2 classes, got {}", class_names_.size()));
  const Epoch& first = epochs_.front();
  for (std::size_t i = 1; i < epochs_.size(); ++i) {
    const Epoch& e = epochs_[i];
    if (e.channels() != first.channels() || e.samples() != first.samples() || e.fs() != first.fs())
      throw InputError(fmt::format("trial {} has shape {}x{} @ {} Hz, expected {}x{} @ {} Hz", i,
                                   e.channels(), e.samples(), e.fs(), first.channels(),
                                   first.samples(), first.fs()));
  }
  const int k = class_count();
  std::vector<int> counts(k, 0);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0 || labels_[i] >= k)
      throw InputError(fmt::format("label {} of trial {} outside [0, {})", labels_[i], i, k));
    ++counts[labels_[i]];
  }
  for (int c = 0; c < k; ++c)
    if (counts[c] == 0) throw InputError(fmt::format("class {} has no trials", c));
  if (relatedness_ && !(*relatedness_ >= 0.0 && *relatedness_ <= 1.0))
    throw InputError(fmt::format("relatedness {} outside [0, 1]", *relatedness_));
}

std::vector<int> LabeledDataset::class_counts() const {
  std::vector<int> counts(class_count(), 0);
  for (int label : labels_) ++counts[label];
  return counts;
}

std::vector<int> LabeledDataset::indices_of(int cls) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (labels_[i] == cls) out.push_back(i);
  return out;
}

LabeledDataset LabeledDataset::subset(std::span<const int> indices) const {
  std::vector<Epoch> epochs;
  std::vector<int> labels;
  epochs.reserve(indices.size());
  labels.reserve(indices.size());
  for (int i : indices) {
    if (i < 0 || i >= size()) throw InputError(fmt::format("trial index {} out of range", i));
    epochs.push_back(epochs_[i]);
    labels.push_back(labels_[i]);
  }
  return LabeledDataset(std::move(epochs), std::move(labels), class_names_, paradigm_, relatedness_);
}

LabeledDataset LabeledDataset::with_epochs(std::vector<Epoch> epochs) const {
  return LabeledDataset(std::move(epochs), labels_, class_names_, paradigm_, relatedness_);
}

LabeledDataset LabeledDataset::with_labels(std::vector<int> labels) const {
  return LabeledDataset(epochs_, std::move(labels), class_names_, paradigm_, relatedness_);
}

bool LabeledDataset::operator==(const LabeledDataset& other) const {
  const bool same_relatedness =
      relatedness_.has_value() == other.relatedness_.has_value() &&
      (!relatedness_ || *relatedness_ == *other.relatedness_);
  return same_relatedness && labels_ == other.labels_ && class_names_ == other.class_names_ &&
         paradigm_ == other.paradigm_ && epochs_ == other.epochs_;
}

void RunConfig::validate(double fs) const {
  if (!(band.low > 0.0) || !(band.low < band.high) || !(band.high < fs / 2.0))
    throw ConfigError(fmt::format("band {}:{} Hz must satisfy 0 < low < high < fs/2 = {}", band.low,
                                  band.high, fs / 2.0));
  if (m_pairs < 1) throw ConfigError(fmt::format("m_pairs must be >= 1, got {}", m_pairs));
  if (!(shrinkage >= 0.0 && shrinkage <= 1.0))
    throw ConfigError(fmt::format("shrinkage must be in [0, 1], got {}", shrinkage));
  if (!(svm_c > 0.0) || !std::isfinite(svm_c))
    throw ConfigError(fmt::format("svm C must be positive, got {}", svm_c));
  if (!(svm_tol > 0.0) || !std::isfinite(svm_tol))
    throw ConfigError(fmt::format("svm tolerance must be positive, got {}", svm_tol));
  if (folds < 2) throw ConfigError(fmt::format("folds must be >= 2, got {}", folds));
  if (few_trials_per_class < 1)
    throw ConfigError(fmt::format("few-trial count must be >= 1, got {}", few_trials_per_class));
  if (bootstrap_b < 100)
    throw ConfigError(fmt::format("bootstrap resample count must be >= 100, got {}", bootstrap_b));
}

std::string RunConfig::canonical() const {
  return fmt::format(
      "seed={};band={}:{};m_pairs={};gamma={};svm_c={};svm_tol={};folds={};few={};bootstrap_b={};"
      "car={}",
      seed, band.low, band.high, m_pairs, shrinkage, svm_c, svm_tol, folds, few_trials_per_class,
      bootstrap_b, common_average_reference ? 1 : 0);
}

std::uint64_t RunConfig::hash() const { return fnv1a64(canonical()); }

}  // namespace crossdecode
