#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rnnlab/data.hpp"
#include "rnnlab/errors.hpp"

namespace rnnlab {

SequenceDataset SequenceDataset::head(std::size_t count) const {
  std::vector<std::size_t> idx(std::min(count, size()));
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return select(idx);
}

SequenceDataset SequenceDataset::select(std::span<const std::size_t> indices) const {
  SequenceDataset out;
  out.steps = steps;
  out.features = features;
  out.class_names = class_names;
  out.warnings = warnings;
  const std::size_t stride = steps * features;
  out.values.reserve(indices.size() * stride);
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    const auto s = sample(i);
    out.values.insert(out.values.end(), s.begin(), s.end());
    out.labels.push_back(labels[i]);
  }
  return out;
}

void SequenceDataset::validate() const {
  if (values.size() != labels.size() * steps * features) {
    throw DataError("dataset holds " + std::to_string(values.size()) + " values for " +
                    std::to_string(labels.size()) + " samples of " + std::to_string(steps) +
                    "x" + std::to_string(features));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= class_names.size()) {
      throw DataError("sample " + std::to_string(i) + " has label " + std::to_string(labels[i]) +
                      " but there are " + std::to_string(class_names.size()) + " classes");
    }
  }
  if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); })) {
    throw DataError("dataset contains non-finite feature values");
  }
}

Batch gather(const SequenceDataset& ds, std::span<const std::size_t> indices) {
  Batch b;
  b.indices.assign(indices.begin(), indices.end());
  b.labels.reserve(indices.size());
  b.inputs.assign(ds.steps, Matrix(indices.size(), ds.features));
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto s = ds.sample(indices[r]);
    for (std::size_t t = 0; t < ds.steps; ++t) {
      const auto src = s.subspan(t * ds.features, ds.features);
      std::copy(src.begin(), src.end(), b.inputs[t].row(r).begin());
    }
    b.labels.push_back(ds.labels[indices[r]]);
  }
  return b;
}

Batches::Batches(const SequenceDataset& ds, std::size_t batch_size, bool shuffle,
                 std::uint64_t seed)
    : ds_(&ds), batch_(batch_size), order_(ds.size()) {
  if (batch_size == 0) {
    throw std::invalid_argument("batch size must be >= 1");
  }
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (shuffle) {
    std::mt19937_64 rng(seed);
    std::shuffle(order_.begin(), order_.end(), rng);
  }
}

Batch Batches::operator[](std::size_t i) const {
  const std::size_t lo = i * batch_;
  const std::size_t hi = std::min(order_.size(), lo + batch_);
  return gather(*ds_, std::span<const std::size_t>(order_).subspan(lo, hi - lo));
}

Batches batches(const SequenceDataset& ds, std::size_t batch_size, bool shuffle,
                std::uint64_t seed) {
  return Batches(ds, batch_size, shuffle, seed);
}

}  // namespace rnnlab
