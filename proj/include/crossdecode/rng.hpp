#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>

namespace crossdecode {

/// Deterministic generator used for every random draw in the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. Distributions are implemented here rather than taken from
/// <random> because the standard library distributions differ between
/// implementations.
///
///   uniform()  : (u64 >> 11) * 2^-53, in [0, 1)
///   below(n)   : rejection sampling on the top bits, unbiased
///   normal()   : Box-Muller on two uniforms, second value cached
class Rng {
 public:
  explicit Rng(std::uint64_t state_seed) : engine_(state_seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  double normal();

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Generator determined solely by (seed, stream_label).
/// Engine seed = splitmix64(splitmix64(seed) ^ fnv1a64(label)).
Rng derive_rng(std::uint64_t seed, std::string_view stream_label);

/// A seed plus a label prefix; sub-streams are derived as "<prefix>/<name>".
struct RngStream {
  std::uint64_t seed = 0;
  std::string prefix;

  Rng rng() const { return derive_rng(seed, prefix); }
  RngStream child(std::string_view name) const;
};

}  // namespace crossdecode
