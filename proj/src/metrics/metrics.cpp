#include "rnnlab/metrics.hpp"

#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rnnlab {
namespace {

double pct(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

std::uint64_t ConfusionMatrix::total() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::trace() const noexcept {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < k_; ++i) t += counts_[i * k_ + i];
  return t;
}

ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> truth,
                          std::size_t classes) {
  if (preds.size() != truth.size()) {
    throw std::invalid_argument("confusion: " + std::to_string(preds.size()) +
                                " predictions vs " + std::to_string(truth.size()) + " labels");
  }
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] < 0 || truth[i] < 0 || static_cast<std::size_t>(preds[i]) >= classes ||
        static_cast<std::size_t>(truth[i]) >= classes) {
      throw std::out_of_range("confusion: class index outside [0, " + std::to_string(classes) +
                              ") at position " + std::to_string(i));
    }
    cm.add(static_cast<std::size_t>(truth[i]), static_cast<std::size_t>(preds[i]));
  }
  return cm;
}

BinaryScores binary_scores(const ConfusionMatrix& cm, std::size_t positive) {
  if (cm.classes() != 2 || positive > 1) {
    throw std::invalid_argument("binary_scores needs a 2-class matrix");
  }
  const std::size_t negative = 1 - positive;
  const auto tp = cm(positive, positive);
  const auto fp = cm(negative, positive);
  const auto fn = cm(positive, negative);
  BinaryScores s;
  s.precision_undefined = tp + fp == 0;
  s.recall_undefined = tp + fn == 0;
  s.precision = pct(tp, tp + fp);
  s.recall = pct(tp, tp + fn);
  s.f1 = harmonic(s.precision, s.recall);
  return s;
}

MulticlassScores multiclass_scores(const ConfusionMatrix& cm) {
  const std::size_t k = cm.classes();
  if (k < 2) {
    throw std::invalid_argument("multiclass_scores needs k >= 2");
  }
  MulticlassScores s;
  s.accuracy = pct(cm.trace(), cm.total());
  s.per_class_f1.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    std::uint64_t col = 0, row = 0;
    for (std::size_t o = 0; o < k; ++o) {
      col += cm(o, c);
      row += cm(c, o);
    }
    const double p = pct(cm(c, c), col);
    const double r = pct(cm(c, c), row);
    s.macro_precision += p;
    s.macro_recall += r;
    s.per_class_f1[c] = harmonic(p, r);
    s.macro_f1 += s.per_class_f1[c];
  }
  s.macro_precision /= static_cast<double>(k);
  s.macro_recall /= static_cast<double>(k);
  s.macro_f1 /= static_cast<double>(k);
  // Single-label multiclass: micro precision = micro recall = accuracy.
  s.micro_f1 = s.accuracy;
  return s;
}

MetricsReport make_report(const ConfusionMatrix& cm, std::size_t positive) {
  MetricsReport r;
  const auto mc = multiclass_scores(cm);
  r.accuracy = mc.accuracy;
  r.micro_f1 = mc.micro_f1;
  if (cm.classes() == 2) {
    const auto b = binary_scores(cm, positive);
    r.binary = true;
    r.precision = b.precision;
    r.recall = b.recall;
    r.f1 = b.f1;
    if (b.precision_undefined) r.flags.emplace_back("precision undefined (no positive predictions)");
    if (b.recall_undefined) r.flags.emplace_back("recall undefined (no positive samples)");
  } else {
    r.precision = mc.macro_precision;
    r.recall = mc.macro_recall;
    r.f1 = mc.macro_f1;
  }
  return r;
}

std::string csv_header() {
  return "accuracy,precision,recall,f1,micro_f1,wall_time_minutes,param_count";
}

std::string to_csv_row(const MetricsReport& r) {
  std::ostringstream os;
  os << std::setprecision(17) << r.accuracy << ',' << r.precision << ',' << r.recall << ','
     << r.f1 << ',' << r.micro_f1 << ',' << r.wall_time_minutes << ',' << r.param_count;
  return os.str();
}

std::string format_table(const MetricsReport& r) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "  accuracy   " << std::setw(8) << r.accuracy << " %\n";
  os << "  precision  " << std::setw(8) << r.precision << " %" << (r.binary ? "" : " (macro)")
     << '\n';
  os << "  recall     " << std::setw(8) << r.recall << " %" << (r.binary ? "" : " (macro)")
     << '\n';
  os << "  f1         " << std::setw(8) << r.f1 << " %" << (r.binary ? "" : " (macro)") << '\n';
  os << "  micro f1   " << std::setw(8) << r.micro_f1 << " %\n";
  os << "  time       " << std::setw(8) << r.wall_time_minutes << " min\n";
  os << "  parameters " << std::setw(8) << r.param_count << '\n';
  for (const auto& f : r.flags) os << "  note: " << f << '\n';
  return os.str();
}

}  // namespace rnnlab
