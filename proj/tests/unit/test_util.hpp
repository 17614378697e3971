#pragma once

#include <filesystem>
#include <random>

#include "rnnlab/linalg.hpp"

namespace testutil {

inline std::filesystem::path fixture(const char* name) {
  return std::filesystem::path(RNNLAB_FIXTURE_DIR) / name;
}

inline rnnlab::Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                                    double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  rnnlab::Matrix m(rows, cols);
  for (double& v : m.flat()) v = u(rng);
  return m;
}

inline double max_abs_diff(const rnnlab::Matrix& a, const rnnlab::Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a.flat()[i] - b.flat()[i]));
  }
  return worst;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("rnnlab_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
