#include "rnnlab/kernels.hpp"

namespace rnnlab::kernels {
namespace {

void gemm_scalar(std::size_t M, std::size_t N, std::size_t K,
                 const double* a, std::size_t a_rs, std::size_t a_cs,
                 const double* b, std::size_t ldb,
                 double* c, std::size_t ldc) {
  for (std::size_t i = 0; i < M; ++i) {
    double* crow = c + i * ldc;
    for (std::size_t k = 0; k < K; ++k) {
      const double aik = a[i * a_rs + k * a_cs];
      const double* brow = b + k * ldb;
      for (std::size_t j = 0; j < N; ++j) {
        crow[j] += aik * brow[j];
      }
    }
  }
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += x[i] * y[i];
  }
  return s;
}

constexpr KernelTable kScalar{"scalar", &gemm_scalar, &dot_scalar};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace rnnlab::kernels
