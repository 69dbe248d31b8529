#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "crossdecode/rng.hpp"
#include "crossdecode/types.hpp"

namespace crossdecode::testing {

inline std::filesystem::path data_dir() { return CROSSDECODE_TEST_DATA_DIR; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("crossdecode-" + tag + "-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Eigen::MatrixXd random_spd(Rng& rng, int n, double ridge = 0.1) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  return a * a.transpose() + ridge * Eigen::MatrixXd::Identity(n, n);
}

inline Eigen::VectorXd random_unit(Rng& rng, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  return v.normalized();
}

// White-noise epochs whose covariance is shaped per class by a random mixing.
inline LabeledDataset random_dataset(std::uint64_t seed, int classes, int per_class, int channels, int samples,
                                     double fs = 250.0) {
  Rng rng = derive_rng(seed, "test-dataset");
  std::vector<Eigen::MatrixXd> mix;
  for (int k = 0; k < classes; ++k) mix.push_back(random_spd(rng, channels, 0.5).llt().matrixL());
  std::vector<Epoch> epochs;
  std::vector<int> labels;
  for (int i = 0; i < per_class; ++i) {
    for (int k = 0; k < classes; ++k) {
      Eigen::MatrixXd noise(channels, samples);
      for (int c = 0; c < channels; ++c)
        for (int s = 0; s < samples; ++s) noise(c, s) = rng.normal();
      epochs.emplace_back(SignalMatrix(mix[static_cast<std::size_t>(k)] * noise), fs);
      labels.push_back(k);
    }
  }
  std::vector<std::string> names;
  for (int k = 0; k < classes; ++k) names.push_back("c" + std::to_string(k));
  return LabeledDataset(std::move(epochs), std::move(labels), std::move(names), "test");
}

}  // namespace crossdecode::testing
