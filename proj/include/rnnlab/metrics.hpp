#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rnnlab {

// Rows are true classes, columns are predictions.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes) : k_(classes), counts_(classes * classes, 0) {}

  std::size_t classes() const noexcept { return k_; }
  std::uint64_t operator()(std::size_t truth, std::size_t pred) const {
    return counts_[truth * k_ + pred];
  }
  void add(std::size_t truth, std::size_t pred) { ++counts_[truth * k_ + pred]; }
  std::uint64_t total() const noexcept;
  std::uint64_t trace() const noexcept;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t k_;
  std::vector<std::uint64_t> counts_;
};

ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> truth,
                          std::size_t classes);

// Percentages. A zero denominator yields 0 and sets the matching flag.
struct BinaryScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;
  bool recall_undefined = false;
};

BinaryScores binary_scores(const ConfusionMatrix& cm, std::size_t positive);

struct MulticlassScores {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;  // unweighted mean of per-class F1
  double micro_f1 = 0.0;
  std::vector<double> per_class_f1;
};

MulticlassScores multiclass_scores(const ConfusionMatrix& cm);

struct MetricsReport {
  double accuracy = 0.0;   // %
  double precision = 0.0;  // %: attack class when binary, macro otherwise
  double recall = 0.0;
  double f1 = 0.0;
  double micro_f1 = 0.0;
  double wall_time_minutes = 0.0;
  std::size_t param_count = 0;
  bool binary = false;
  std::vector<std::string> flags;  // e.g. undefined precision
};

// Binary tasks (k = 2) report the positive class; otherwise macro averages.
MetricsReport make_report(const ConfusionMatrix& cm, std::size_t positive = 1);

std::string csv_header();
std::string to_csv_row(const MetricsReport& r);
std::string format_table(const MetricsReport& r);

}  // namespace rnnlab
