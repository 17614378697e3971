#pragma once

// Inner-loop kernels with one scalar reference implementation and optional
// SIMD variants. The active table is chosen once at startup from CPUID and
// can be forced with RNNLAB_KERNELS=scalar|avx2.

#include <cstddef>
#include <string_view>
#include <vector>

namespace rnnlab::kernels {

// C[i*ldc + j] += Σ_k A[i*a_rs + k*a_cs] · B[k*ldb + j]
// for i < M, j < N, k < K. k is accumulated in increasing order per element.
using GemmFn = void (*)(std::size_t M, std::size_t N, std::size_t K,
                        const double* a, std::size_t a_rs, std::size_t a_cs,
                        const double* b, std::size_t ldb,
                        double* c, std::size_t ldc);

// Σ_i x[i]·y[i]
using DotFn = double (*)(const double* x, const double* y, std::size_t n);

struct KernelTable {
  std::string_view name;
  GemmFn gemm;
  DotFn dot;
};

const KernelTable& scalar_table() noexcept;
#if defined(RNNLAB_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif

// Tables this binary was built with and the CPU can execute.
std::vector<const KernelTable*> available_tables();

const KernelTable& active() noexcept;
// Overrides the runtime choice; for tests and benchmarks.
void set_active(const KernelTable& table) noexcept;

}  // namespace rnnlab::kernels
