#include "rnnlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rnnlab/errors.hpp"
#include "rnnlab/kernels.hpp"

namespace rnnlab {
namespace {

thread_local std::uint64_t t_macs = 0;

[[noreturn]] void shape_fail(const char* op, const std::string& lhs, const std::string& rhs) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + lhs + " and " + rhs);
}

std::string len_str(std::size_t n) { return "[" + std::to_string(n) + "]"; }

}  // namespace

bool Vector::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("Matrix: " + std::to_string(data_.size()) + " values for shape " +
                     shape_str());
  }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) {
      throw ShapeError("Matrix::from_rows: ragged rows");
    }
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(data));
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1.0;
  }
  return m;
}

Matrix Matrix::row_vector(const Vector& v) {
  return Matrix(1, v.size(), std::vector<double>(v.begin(), v.end()));
}

void Matrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

std::string Matrix::shape_str() const {
  std::ostringstream os;
  os << '[' << rows_ << "x" << cols_ << ']';
  return os.str();
}

Vector Matrix::row_copy(std::size_t r) const {
  const auto s = row(r);
  return Vector(std::vector<double>(s.begin(), s.end()));
}

Vector matvec(const Matrix& m, const Vector& v) {
  if (m.cols() != v.size()) {
    shape_fail("matvec", m.shape_str(), len_str(v.size()));
  }
  const auto& k = kernels::active();
  Vector out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out[i] = k.dot(m.row(i).data(), v.data(), v.size());
  }
  t_macs += m.rows() * m.cols();
  return out;
}

Vector hadamard(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    shape_fail("hadamard", len_str(a.size()), len_str(b.size()));
  }
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = a[i] * b[i];
  }
  return out;
}

Vector sigmoid(const Vector& v) {
  Vector out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), sigmoid_scalar);
  return out;
}

Vector hard_sigmoid(const Vector& v) {
  Vector out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), hard_sigmoid_scalar);
  return out;
}

Vector tanh_vec(const Vector& v) {
  Vector out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::tanh(x); });
  return out;
}

Matrix glorot_init(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  if (rows == 0 || cols == 0) {
    throw ShapeError("glorot_init: dimensions must be >= 1, got " + std::to_string(rows) +
                     "x" + std::to_string(cols));
  }
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix m(rows, cols);
  for (double& x : m.flat()) {
    x = dist(rng);
  }
  return m;
}

void gemm_nt_acc(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.cols() != b.cols() || c.rows() != a.rows() || c.cols() != b.rows()) {
    shape_fail("gemm_nt", a.shape_str() + "*" + b.shape_str() + "^T", c.shape_str());
  }
  if (a.empty() || b.empty()) {
    return;
  }
  // Transpose B so the kernel streams contiguous rows of length N.
  thread_local std::vector<double> bt;
  const std::size_t n = b.rows();
  const std::size_t k = b.cols();
  bt.resize(n * k);
  for (std::size_t r = 0; r < n; ++r) {
    const double* src = b.data() + r * k;
    for (std::size_t q = 0; q < k; ++q) {
      bt[q * n + r] = src[q];
    }
  }
  kernels::active().gemm(a.rows(), n, k, a.data(), a.cols(), 1, bt.data(), n, c.data(),
                         c.cols());
  t_macs += a.rows() * n * k;
}

void gemm_nn_acc(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.cols() != b.rows() || c.rows() != a.rows() || c.cols() != b.cols()) {
    shape_fail("gemm_nn", a.shape_str() + "*" + b.shape_str(), c.shape_str());
  }
  if (a.empty() || b.empty()) {
    return;
  }
  kernels::active().gemm(a.rows(), b.cols(), a.cols(), a.data(), a.cols(), 1, b.data(),
                         b.cols(), c.data(), c.cols());
  t_macs += a.rows() * b.cols() * a.cols();
}

void gemm_tn_acc(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.rows() != b.rows() || c.rows() != a.cols() || c.cols() != b.cols()) {
    shape_fail("gemm_tn", a.shape_str() + "^T*" + b.shape_str(), c.shape_str());
  }
  if (a.empty() || b.empty()) {
    return;
  }
  kernels::active().gemm(a.cols(), b.cols(), a.rows(), a.data(), 1, a.cols(), b.data(),
                         b.cols(), c.data(), c.cols());
  t_macs += a.cols() * b.cols() * a.rows();
}

void broadcast_rows(std::span<const double> bias, Matrix& out) {
  if (bias.size() != out.cols()) {
    shape_fail("broadcast_rows", len_str(bias.size()), out.shape_str());
  }
  for (std::size_t r = 0; r < out.rows(); ++r) {
    std::copy(bias.begin(), bias.end(), out.row(r).begin());
  }
}

void add_column_sums(const Matrix& m, std::span<double> acc) {
  if (acc.size() != m.cols()) {
    shape_fail("add_column_sums", m.shape_str(), len_str(acc.size()));
  }
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t j = 0; j < acc.size(); ++j) {
      acc[j] += row[j];
    }
  }
}

std::uint64_t mac_count() noexcept { return t_macs; }
void reset_mac_count() noexcept { t_macs = 0; }

}  // namespace rnnlab
