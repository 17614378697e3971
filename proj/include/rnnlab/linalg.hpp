#pragma once

// Dense row-major linear algebra in double precision.
//
// Everything the recurrent cells need is here: a Matrix/Vector pair, the
// vector-level operations used by the single-sample API, batched GEMM
// wrappers routed through the runtime-selected kernel table, and the
// gate/activation nonlinearities.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace rnnlab {

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t len, double fill = 0.0) : data_(len, fill) {}
  explicit Vector(std::vector<double> data) : data_(std::move(data)) {}
  Vector(std::initializer_list<double> values) : data_(values) {}

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  bool all_finite() const noexcept;
  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> data_;
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);
  // A 1×len matrix holding v; the batch-of-one view of a vector.
  static Matrix row_vector(const Vector& v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> flat() noexcept { return data_; }
  std::span<const double> flat() const noexcept { return data_; }
  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  void fill(double value);
  bool same_shape(const Matrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const noexcept;
  std::string shape_str() const;
  Vector row_copy(std::size_t r) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// ---- single-sample operations ---------------------------------------------

Vector matvec(const Matrix& m, const Vector& v);
Vector hadamard(const Vector& a, const Vector& b);
Vector sigmoid(const Vector& v);
Vector hard_sigmoid(const Vector& v);
Vector tanh_vec(const Vector& v);

// Glorot-uniform draw in ±sqrt(6/(rows+cols)), consumed row-major from rng.
Matrix glorot_init(std::size_t rows, std::size_t cols, std::mt19937_64& rng);

// ---- scalar nonlinearities --------------------------------------------------

// Branches on sign so exp never overflows.
inline double sigmoid_scalar(double x) noexcept {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}
inline double hard_sigmoid_scalar(double x) noexcept {
  const double y = 0.2 * x + 0.5;
  return y < 0.0 ? 0.0 : (y > 1.0 ? 1.0 : y);
}
// Breakpoints of the hard sigmoid; the derivative is 0.2 on the closed
// interval between them and 0 outside.
inline constexpr double kHardSigmoidKnee = 2.5;

// ---- batched products (rows of A/C are independent samples) ---------------

// C += A·Bᵀ with A[M×K], B[N×K], C[M×N].
void gemm_nt_acc(const Matrix& a, const Matrix& b, Matrix& c);
// C += A·B with A[M×K], B[K×N], C[M×N].
void gemm_nn_acc(const Matrix& a, const Matrix& b, Matrix& c);
// C += Aᵀ·B with A[K×M], B[K×N], C[M×N].
void gemm_tn_acc(const Matrix& a, const Matrix& b, Matrix& c);

// out[r][j] = bias[j] for every row r.
void broadcast_rows(std::span<const double> bias, Matrix& out);
// acc[j] += Σ_r m[r][j], summed in row order.
void add_column_sums(const Matrix& m, std::span<double> acc);

// ---- multiply-accumulate accounting ----------------------------------------

// Per-thread count of multiply-accumulates issued by matvec and the GEMM
// wrappers. Used to measure per-step compute of each cell.
std::uint64_t mac_count() noexcept;
void reset_mac_count() noexcept;

}  // namespace rnnlab
