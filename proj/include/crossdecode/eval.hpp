#pragma once

#include <Eigen/Core>

#include <string>
#include <string_view>
#include <vector>

#include "crossdecode/classifier.hpp"
#include "crossdecode/csp.hpp"
#include "crossdecode/rng.hpp"
#include "crossdecode/types.hpp"

namespace crossdecode {

enum class EvalMode { cv, transfer_full, transfer_few };

std::string_view mode_name(EvalMode mode) noexcept;
/// Throws ConfigError for unknown names.
EvalMode parse_mode(std::string_view name);

/// Frozen pipeline: band-pass settings, spatial filters, scaler and classifier.
struct DecodingModel {
  RunConfig config;
  SpatialFilterBank bank;
  FeatureScaler scaler;
  LinearClassifier classifier;
  std::string source_paradigm;
  std::vector<std::string> class_names;
  std::vector<int> trials_per_class;
  double fs = 0.0;
  bool few_trial = false;

  int classes() const noexcept { return bank.classes(); }
  int channels() const noexcept { return bank.channels(); }

  bool operator==(const DecodingModel&) const = default;
};

struct EvalReport {
  EvalMode mode = EvalMode::cv;
  /// Percent correct, one entry per fold (cv) or a single entry (transfer).
  std::vector<double> accuracies;
  double mean = 0.0;
  /// Sample standard deviation (n - 1); 0 for a single run.
  double std = 0.0;
  /// Rows are true classes, columns predicted classes.
  Eigen::MatrixXi confusion;
  std::uint64_t seed = 0;
  std::string source_paradigm;
  std::string target_paradigm;

  int evaluated_trials() const { return confusion.sum(); }
  /// 100 * trace(confusion) / total.
  double pooled_accuracy() const;
};

/// Optional common-average reference followed by zero-phase band-pass of every trial.
LabeledDataset preprocess_dataset(const LabeledDataset& dataset, const RunConfig& config);

/// Fits filters, scaler and classifier on an already preprocessed dataset.
/// The classifier draws from stream.child("svm-class-{c}").
DecodingModel fit_model(const LabeledDataset& preprocessed, const RunConfig& config, const RngStream& stream);

/// Fit on every trial (stream "full").
DecodingModel fit_full(const LabeledDataset& dataset, const RunConfig& config);

/// Draws config.few_trials_per_class trials per class (stream "few-trials") and fits on them (stream "few").
DecodingModel fit_few(const LabeledDataset& dataset, const RunConfig& config);

/// Exactly n_per_class trials of each class, drawn without replacement; the
/// selected trials keep their original relative order.
LabeledDataset subsample_few(const LabeledDataset& dataset, int n_per_class, Rng& rng);

/// Stratified assignment of trials to folds.
struct FoldPlan {
  int folds = 0;
  std::vector<int> fold_of;  // per trial

  std::vector<int> test_indices(int fold) const;
  std::vector<int> train_indices(int fold) const;
};

/// Shuffles each class (rng) and deals its trials round-robin over the folds,
/// continuing where the previous class stopped so fold sizes differ by at most one.
FoldPlan stratified_folds(const LabeledDataset& dataset, int folds, Rng& rng);

/// Model of one CV fold, fit on a preprocessed dataset (stream "fold-{i}").
DecodingModel fit_fold(const LabeledDataset& preprocessed, const FoldPlan& plan, int fold, const RunConfig& config);

/// Stratified k-fold cross validation; the split uses stream "cv-split".
EvalReport kfold_cv(const LabeledDataset& dataset, const RunConfig& config);

/// Applies the frozen model to every target trial. Nothing is refit.
EvalReport evaluate_transfer(const DecodingModel& model, const LabeledDataset& target);

/// Features of every trial of a preprocessed dataset, one row per trial.
FeatureMatrix featurize(const SpatialFilterBank& bank, const LabeledDataset& preprocessed);

}  // namespace crossdecode
