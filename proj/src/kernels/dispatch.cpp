#include <atomic>

#include "crossdecode/errors.hpp"
#include "crossdecode/kernels.hpp"

namespace crossdecode::kernels {
namespace {

const KernelTable* initial_table() noexcept {
#if defined(CROSSDECODE_HAVE_AVX2)
  if (isa_supported(Isa::avx2)) return &avx2_table();
#endif
#if defined(CROSSDECODE_HAVE_NEON)
  return &neon_table();
#endif
  return &scalar_table();
}

std::atomic<const KernelTable*>& active_slot() noexcept {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(CROSSDECODE_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(CROSSDECODE_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa best_isa() noexcept { return initial_table()->isa; }

const KernelTable& table(Isa isa) {
  if (!isa_supported(isa))
    throw ConfigError(std::string("kernel variant not supported on this machine: ") +
                      std::string(isa_name(isa)));
  switch (isa) {
#if defined(CROSSDECODE_HAVE_AVX2)
    case Isa::avx2:
      return avx2_table();
#endif
#if defined(CROSSDECODE_HAVE_NEON)
    case Isa::neon:
      return neon_table();
#endif
    default:
      return scalar_table();
  }
}

const KernelTable& active() noexcept { return *active_slot().load(std::memory_order_relaxed); }

void select_isa(Isa isa) { active_slot().store(&table(isa)); }

}  // namespace crossdecode::kernels
