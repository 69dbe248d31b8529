#include <fmt/format.h>

#include <vector>

#include "crossdecode/errors.hpp"
#include "crossdecode/kernels.hpp"
#include "crossdecode/preprocess.hpp"

namespace crossdecode {

Covariance trial_covariance(const Epoch& epoch) {
  const int channels = epoch.channels();
  const int samples = epoch.samples();

  SignalMatrix centered(channels, samples);
  for (int c = 0; c < channels; ++c) {
    const auto row = epoch.channel(c);
    const double mean = kernels::sum(row) / samples;
    centered.row(c) = epoch.data().row(c).array() - mean;
  }
  auto row = [&](int c) {
    return std::span<const double>(centered.data() + static_cast<std::ptrdiff_t>(c) * samples,
                                   static_cast<std::size_t>(samples));
  };

  Eigen::MatrixXd gram(channels, channels);
  for (int i = 0; i < channels; ++i) {
    for (int j = i; j < channels; ++j) {
      const double v = kernels::dot(row(i), row(j));
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }
  const double trace = gram.trace();
  if (!(trace > 0.0)) throw DegenerateInputError("trial has zero variance on every channel");
  return Covariance{gram / trace, true};
}

Covariance shrink(const Covariance& cov, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw ConfigError(fmt::format("shrinkage must be in [0, 1], got {}", gamma));
  const auto n = cov.matrix.rows();
  const double target = cov.matrix.trace() / static_cast<double>(n);
  Eigen::MatrixXd out = (1.0 - gamma) * cov.matrix;
  out.diagonal().array() += gamma * target;
  return Covariance{std::move(out), cov.trace_normalized};
}

Covariance class_covariance(std::span<const Covariance> trial_covs, std::span<const int> labels, int cls,
                            bool complement, double gamma) {
  if (trial_covs.size() != labels.size())
    throw InputError(fmt::format("{} covariances but {} labels", trial_covs.size(), labels.size()));
  if (trial_covs.empty()) throw DegenerateInputError("no trials to pool");
  const auto n = trial_covs.front().matrix.rows();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  int count = 0;
  bool normalized = true;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if ((labels[i] == cls) == complement) continue;
    acc += trial_covs[i].matrix;
    normalized = normalized && trial_covs[i].trace_normalized;
    ++count;
  }
  if (count == 0)
    throw DegenerateInputError(fmt::format("no trials selected for class {}{}", cls, complement ? " complement" : ""));
  return shrink(Covariance{acc / static_cast<double>(count), normalized}, gamma);
}

Covariance class_covariance(const LabeledDataset& dataset, int cls, bool complement, double gamma) {
  if (cls < 0 || cls >= dataset.class_count())
    throw ConfigError(fmt::format("class {} not in dataset with {} classes", cls, dataset.class_count()));
  std::vector<Covariance> covs;
  covs.reserve(dataset.size());
  for (const auto& e : dataset.epochs()) covs.push_back(trial_covariance(e));
  return class_covariance(covs, dataset.labels(), cls, complement, gamma);
}

}  // namespace crossdecode
