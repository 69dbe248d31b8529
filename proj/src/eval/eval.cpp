#include "crossdecode/eval.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "crossdecode/errors.hpp"
#include "crossdecode/parallel.hpp"
#include "crossdecode/preprocess.hpp"

namespace crossdecode {
namespace {

void summarize_into(EvalReport& report) {
  const auto n = static_cast<double>(report.accuracies.size());
  double total = 0.0;
  for (double a : report.accuracies) total += a;
  report.mean = total / n;
  double ss = 0.0;
  for (double a : report.accuracies) ss += (a - report.mean) * (a - report.mean);
  report.std = report.accuracies.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

std::vector<int> count_per_class(const LabeledDataset& d) { return d.class_counts(); }

}  // namespace

std::string_view mode_name(EvalMode mode) noexcept {
  switch (mode) {
    case EvalMode::cv:
      return "cv";
    case EvalMode::transfer_full:
      return "transfer_full";
    case EvalMode::transfer_few:
      return "transfer_few";
  }
  return "unknown";
}

EvalMode parse_mode(std::string_view name) {
  for (EvalMode m : {EvalMode::cv, EvalMode::transfer_full, EvalMode::transfer_few})
    if (mode_name(m) == name) return m;
  throw ConfigError(fmt::format("unknown evaluation mode '{}'", name));
}

double EvalReport::pooled_accuracy() const {
  const int total = evaluated_trials();
  return total == 0 ? 0.0 : 100.0 * confusion.trace() / total;
}

LabeledDataset preprocess_dataset(const LabeledDataset& dataset, const RunConfig& config) {
  config.validate(dataset.fs());
  const auto filter = BandpassFilter::design(config.band, dataset.fs());
  std::vector<Epoch> out(dataset.epochs());
  parallel_for(out.size(), [&](std::size_t i) {
    const Epoch& raw = dataset.epochs()[i];
    out[i] = config.common_average_reference ? bandpass(common_average_reference(raw), filter) : bandpass(raw, filter);
  });
  return dataset.with_epochs(std::move(out));
}

FeatureMatrix featurize(const SpatialFilterBank& bank, const LabeledDataset& preprocessed) {
  FeatureMatrix features(preprocessed.size(), bank.feature_count());
  parallel_for(static_cast<std::size_t>(preprocessed.size()), [&](std::size_t i) {
    features.row(static_cast<Eigen::Index>(i)) = extract_features(bank, preprocessed.epochs()[i]).transpose();
  });
  return features;
}

DecodingModel fit_model(const LabeledDataset& preprocessed, const RunConfig& config, const RngStream& stream) {
  config.validate(preprocessed.fs());
  std::vector<Covariance> covs(preprocessed.size());
  parallel_for(covs.size(), [&](std::size_t i) { covs[i] = trial_covariance(preprocessed.epochs()[i]); });
  SpatialFilterBank bank =
      fit_ovr_bank(covs, preprocessed.labels(), preprocessed.class_count(), config.m_pairs, config.shrinkage);
  const FeatureMatrix features = featurize(bank, preprocessed);
  FeatureScaler scaler = FeatureScaler::fit(features);
  SvmOptions options;
  options.c = config.svm_c;
  options.tol = config.svm_tol;
  LinearClassifier classifier =
      train_ovr_svm(scaler.apply(features), preprocessed.labels(), preprocessed.class_count(), options, stream);
  return DecodingModel{config,
                       std::move(bank),
                       std::move(scaler),
                       std::move(classifier),
                       preprocessed.paradigm(),
                       preprocessed.class_names(),
                       count_per_class(preprocessed),
                       preprocessed.fs(),
                       false};
}

DecodingModel fit_full(const LabeledDataset& dataset, const RunConfig& config) {
  return fit_model(preprocess_dataset(dataset, config), config, RngStream{config.seed, "full"});
}

DecodingModel fit_few(const LabeledDataset& dataset, const RunConfig& config) {
  Rng rng = derive_rng(config.seed, "few-trials");
  const LabeledDataset few = subsample_few(dataset, config.few_trials_per_class, rng);
  DecodingModel model = fit_model(preprocess_dataset(few, config), config, RngStream{config.seed, "few"});
  model.few_trial = true;
  return model;
}

LabeledDataset subsample_few(const LabeledDataset& dataset, int n_per_class, Rng& rng) {
  if (n_per_class < 1) throw ConfigError(fmt::format("trials per class must be >= 1, got {}", n_per_class));
  const auto counts = dataset.class_counts();
  for (int c = 0; c < dataset.class_count(); ++c)
    if (counts[c] < n_per_class)
      throw ConfigError(fmt::format("class {} has {} trials, fewer than the {} requested", c, counts[c], n_per_class));

  std::vector<int> selected;
  selected.reserve(static_cast<std::size_t>(n_per_class) * dataset.class_count());
  for (int c = 0; c < dataset.class_count(); ++c) {
    std::vector<int> idx = dataset.indices_of(c);
    rng.shuffle(std::span<int>(idx));
    selected.insert(selected.end(), idx.begin(), idx.begin() + n_per_class);
  }
  std::sort(selected.begin(), selected.end());
  return dataset.subset(selected);
}

std::vector<int> FoldPlan::test_indices(int fold) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(fold_of.size()); ++i)
    if (fold_of[i] == fold) out.push_back(i);
  return out;
}

std::vector<int> FoldPlan::train_indices(int fold) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(fold_of.size()); ++i)
    if (fold_of[i] != fold) out.push_back(i);
  return out;
}

FoldPlan stratified_folds(const LabeledDataset& dataset, int folds, Rng& rng) {
  if (folds < 2) throw ConfigError(fmt::format("folds must be >= 2, got {}", folds));
  const auto counts = dataset.class_counts();
  for (int c = 0; c < dataset.class_count(); ++c)
    if (counts[c] < folds)
      throw ConfigError(fmt::format("class {} has {} trials, fewer than {} folds", c, counts[c], folds));

  FoldPlan plan{folds, std::vector<int>(dataset.size(), -1)};
  int next = 0;
  for (int c = 0; c < dataset.class_count(); ++c) {
    std::vector<int> idx = dataset.indices_of(c);
    rng.shuffle(std::span<int>(idx));
    for (int i : idx) {
      plan.fold_of[i] = next;
      next = (next + 1) % folds;
    }
  }
  return plan;
}

DecodingModel fit_fold(const LabeledDataset& preprocessed, const FoldPlan& plan, int fold, const RunConfig& config) {
  const auto train = plan.train_indices(fold);
  return fit_model(preprocessed.subset(train), config, RngStream{config.seed, fmt::format("fold-{}", fold)});
}

EvalReport kfold_cv(const LabeledDataset& dataset, const RunConfig& config) {
  config.validate(dataset.fs());
  Rng split_rng = derive_rng(config.seed, "cv-split");
  const FoldPlan plan = stratified_folds(dataset, config.folds, split_rng);
  const LabeledDataset filtered = preprocess_dataset(dataset, config);
  const int k = dataset.class_count();

  std::vector<Eigen::MatrixXi> fold_confusion(config.folds, Eigen::MatrixXi::Zero(k, k));
  parallel_for(static_cast<std::size_t>(config.folds), [&](std::size_t f) {
    const int fold = static_cast<int>(f);
    const DecodingModel model = fit_fold(filtered, plan, fold, config);
    for (int i : plan.test_indices(fold)) {
      const Eigen::VectorXd x = extract_features(model.bank, filtered.epochs()[i]);
      ++fold_confusion[f](filtered.labels()[i], predict(model.classifier, model.scaler, x));
    }
  });

  EvalReport report;
  report.mode = EvalMode::cv;
  report.seed = config.seed;
  report.source_paradigm = dataset.paradigm();
  report.target_paradigm = dataset.paradigm();
  report.confusion = Eigen::MatrixXi::Zero(k, k);
  for (const auto& cm : fold_confusion) {
    report.accuracies.push_back(100.0 * cm.trace() / cm.sum());
    report.confusion += cm;
  }
  summarize_into(report);
  return report;
}

EvalReport evaluate_transfer(const DecodingModel& model, const LabeledDataset& target) {
  if (target.channels() != model.channels() || target.class_count() != model.classes())
    throw ConfigError(fmt::format("target has {} channels and {} classes, model expects {} channels and {} classes",
                                  target.channels(), target.class_count(), model.channels(), model.classes()));
  if (target.fs() != model.fs)
    throw ConfigError(fmt::format("target sampled at {} Hz, model fit at {} Hz", target.fs(), model.fs));

  const LabeledDataset filtered = preprocess_dataset(target, model.config);
  const FeatureMatrix features = featurize(model.bank, filtered);
  const int k = model.classes();
  EvalReport report;
  report.mode = model.few_trial ? EvalMode::transfer_few : EvalMode::transfer_full;
  report.seed = model.config.seed;
  report.source_paradigm = model.source_paradigm;
  report.target_paradigm = target.paradigm();
  report.confusion = Eigen::MatrixXi::Zero(k, k);
  for (int i = 0; i < filtered.size(); ++i) {
    const Eigen::VectorXd x = features.row(i).transpose();
    ++report.confusion(filtered.labels()[i], predict(model.classifier, model.scaler, x));
  }
  report.accuracies.push_back(report.pooled_accuracy());
  summarize_into(report);
  return report;
}

}  // namespace crossdecode
