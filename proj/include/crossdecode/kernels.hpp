#pragma once

// Data-parallel inner loops behind covariance, projection and SVM code.
//
// Each kernel has a scalar reference implementation and, where the target
// allows, an AVX2+FMA (x86-64) or NEON (aarch64) variant. The variant is
// chosen once at startup from the running CPU; select_isa() overrides it for
// tests and benchmarks. Variants agree with the scalar reference to rounding
// (different summation order), so a given machine always reproduces its own
// results bit for bit, but two ISAs may differ in the last few ulps.
//
// This header must stay free of Eigen: the AVX2 translation unit is built with
// -mavx2 and must not instantiate inline code shared with the rest of the library.

#include <cassert>
#include <cstddef>
#include <span>
#include <string_view>

namespace crossdecode::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  double (*sum_squares)(const double* a, std::size_t n);
  /// sum of (a[i] - mean)^2
  double (*centered_sum_squares)(const double* a, double mean, std::size_t n);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table() noexcept;
#if defined(CROSSDECODE_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif
#if defined(CROSSDECODE_HAVE_NEON)
const KernelTable& neon_table() noexcept;
#endif

/// True when the variant is compiled in and the CPU can run it.
bool isa_supported(Isa isa) noexcept;
Isa best_isa() noexcept;
/// Table for a specific ISA; throws ConfigError if unsupported.
const KernelTable& table(Isa isa);

const KernelTable& active() noexcept;
/// Throws ConfigError if the ISA is unsupported on this machine.
void select_isa(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

inline double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }

inline double sum_squares(std::span<const double> a) {
  return active().sum_squares(a.data(), a.size());
}

inline double centered_sum_squares(std::span<const double> a, double mean) {
  return active().centered_sum_squares(a.data(), mean, a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace crossdecode::kernels
