#include <atomic>
#include <cstdlib>
#include <string_view>

#include "rnnlab/kernels.hpp"

namespace rnnlab::kernels {
namespace {

bool cpu_has_avx2_fma() noexcept {
#if defined(RNNLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* choose() noexcept {
  const char* forced = std::getenv("RNNLAB_KERNELS");
  const std::string_view want = forced ? forced : "";
  if (want == "scalar") {
    return &scalar_table();
  }
#if defined(RNNLAB_HAVE_AVX2)
  if (cpu_has_avx2_fma()) {
    return &avx2_table();
  }
#endif
  return &scalar_table();
}

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> table{choose()};
  return table;
}

}  // namespace

std::vector<const KernelTable*> available_tables() {
  std::vector<const KernelTable*> out{&scalar_table()};
#if defined(RNNLAB_HAVE_AVX2)
  if (cpu_has_avx2_fma()) {
    out.push_back(&avx2_table());
  }
#endif
  return out;
}

const KernelTable& active() noexcept { return *slot().load(std::memory_order_relaxed); }

void set_active(const KernelTable& table) noexcept {
  slot().store(&table, std::memory_order_relaxed);
}

}  // namespace rnnlab::kernels
