// Compiled with -mavx2 -mfma; only reached after the CPUID check in dispatch.

#include <immintrin.h>

#include "rnnlab/kernels.hpp"

namespace rnnlab::kernels {
namespace {

// Register block: kRows rows of C by 8 columns (two ymm lanes of 4 doubles).
template <std::size_t kRows>
inline void block_8(std::size_t K, const double* a, std::size_t a_rs, std::size_t a_cs,
                    const double* b, std::size_t ldb, double* c, std::size_t ldc) {
  __m256d acc0[kRows];
  __m256d acc1[kRows];
  for (std::size_t r = 0; r < kRows; ++r) {
    acc0[r] = _mm256_loadu_pd(c + r * ldc);
    acc1[r] = _mm256_loadu_pd(c + r * ldc + 4);
  }
  for (std::size_t k = 0; k < K; ++k) {
    const __m256d b0 = _mm256_loadu_pd(b + k * ldb);
    const __m256d b1 = _mm256_loadu_pd(b + k * ldb + 4);
    for (std::size_t r = 0; r < kRows; ++r) {
      const __m256d av = _mm256_broadcast_sd(a + r * a_rs + k * a_cs);
      acc0[r] = _mm256_fmadd_pd(av, b0, acc0[r]);
      acc1[r] = _mm256_fmadd_pd(av, b1, acc1[r]);
    }
  }
  for (std::size_t r = 0; r < kRows; ++r) {
    _mm256_storeu_pd(c + r * ldc, acc0[r]);
    _mm256_storeu_pd(c + r * ldc + 4, acc1[r]);
  }
}

template <std::size_t kRows>
inline void block_4(std::size_t K, const double* a, std::size_t a_rs, std::size_t a_cs,
                    const double* b, std::size_t ldb, double* c, std::size_t ldc) {
  __m256d acc[kRows];
  for (std::size_t r = 0; r < kRows; ++r) {
    acc[r] = _mm256_loadu_pd(c + r * ldc);
  }
  for (std::size_t k = 0; k < K; ++k) {
    const __m256d bv = _mm256_loadu_pd(b + k * ldb);
    for (std::size_t r = 0; r < kRows; ++r) {
      acc[r] = _mm256_fmadd_pd(_mm256_broadcast_sd(a + r * a_rs + k * a_cs), bv, acc[r]);
    }
  }
  for (std::size_t r = 0; r < kRows; ++r) {
    _mm256_storeu_pd(c + r * ldc, acc[r]);
  }
}

template <std::size_t kRows>
inline void row_panel(std::size_t N, std::size_t K, const double* a, std::size_t a_rs,
                      std::size_t a_cs, const double* b, std::size_t ldb, double* c,
                      std::size_t ldc) {
  std::size_t j = 0;
  for (; j + 8 <= N; j += 8) {
    block_8<kRows>(K, a, a_rs, a_cs, b + j, ldb, c + j, ldc);
  }
  for (; j + 4 <= N; j += 4) {
    block_4<kRows>(K, a, a_rs, a_cs, b + j, ldb, c + j, ldc);
  }
  for (; j < N; ++j) {
    for (std::size_t r = 0; r < kRows; ++r) {
      double s = c[r * ldc + j];
      for (std::size_t k = 0; k < K; ++k) {
        s = __builtin_fma(a[r * a_rs + k * a_cs], b[k * ldb + j], s);
      }
      c[r * ldc + j] = s;
    }
  }
}

void gemm_avx2(std::size_t M, std::size_t N, std::size_t K,
               const double* a, std::size_t a_rs, std::size_t a_cs,
               const double* b, std::size_t ldb,
               double* c, std::size_t ldc) {
  std::size_t i = 0;
  for (; i + 4 <= M; i += 4) {
    row_panel<4>(N, K, a + i * a_rs, a_rs, a_cs, b, ldb, c + i * ldc, ldc);
  }
  for (; i < M; ++i) {
    row_panel<1>(N, K, a + i * a_rs, a_rs, a_cs, b, ldb, c + i * ldc, ldc);
  }
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) {
    s = __builtin_fma(x[i], y[i], s);
  }
  return s;
}

constexpr KernelTable kAvx2{"avx2", &gemm_avx2, &dot_avx2};

}  // namespace

const KernelTable& avx2_table() noexcept { return kAvx2; }

}  // namespace rnnlab::kernels
