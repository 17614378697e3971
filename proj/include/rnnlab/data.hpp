#pragma once

// Dataset ingestion and batching.
//
// MNIST comes from the original IDX files; intrusion-detection data comes
// from pre-extracted per-packet/per-flow feature tables in CSV with a JSON
// schema. Both end up as fixed-shape sequence datasets.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rnnlab/linalg.hpp"

namespace rnnlab {

struct SequenceDataset {
  std::size_t steps = 0;     // T
  std::size_t features = 0;  // m
  std::vector<double> values;  // [N][T][m]
  std::vector<int> labels;     // [N]
  std::vector<std::string> class_names;
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t num_classes() const noexcept { return class_names.size(); }
  std::span<const double> sample(std::size_t i) const {
    return {values.data() + i * steps * features, steps * features};
  }
  // First `count` samples (all if count >= size()).
  SequenceDataset head(std::size_t count) const;
  SequenceDataset select(std::span<const std::size_t> indices) const;
  // Throws DataError if labels/values violate the dataset invariants.
  void validate() const;
};

// ---- MNIST ---------------------------------------------------------------------

enum class MnistReshape { rows28x28, pixels784x1 };

MnistReshape parse_reshape(std::string_view text);
std::string_view to_string(MnistReshape r) noexcept;

// Reads an IDX image file (magic 0x00000803) and label file (0x00000801).
// Pixels are scaled by 1/255. Throws FormatError with the byte offset of
// the problem, DataError when the two files disagree on the sample count.
SequenceDataset load_mnist(const std::filesystem::path& images,
                           const std::filesystem::path& labels, MnistReshape reshape);

struct MnistSplit {
  SequenceDataset train;
  SequenceDataset test;
};

// Looks for the four standard file names in dir (or dir/mnist).
MnistSplit load_mnist_dir(const std::filesystem::path& dir, MnistReshape reshape);

// ---- intrusion-detection CSV ---------------------------------------------------

enum class LabelMode { binary, multiclass };

LabelMode parse_label_mode(std::string_view text);
std::string_view to_string(LabelMode m) noexcept;

struct IntrusionSchema {
  std::vector<std::string> feature_columns;
  std::string label_column = "label";
  // Raw label text -> class name. The class named `normal_class` is the
  // benign class; every other class is an attack.
  std::vector<std::pair<std::string, std::string>> label_map;
  std::string normal_class = "normal";
  std::size_t window_length = 10;
  // Rows sharing a value here form one flow; windows never straddle flows.
  std::optional<std::string> flow_column;

  static IntrusionSchema from_json_file(const std::filesystem::path& path);
  static IntrusionSchema from_json_text(const std::string& text);
};

// The default taxonomy: normal traffic plus eight attack families.
std::vector<std::pair<std::string, std::string>> default_intrusion_labels();

struct IntrusionSplit {
  SequenceDataset train;
  SequenceDataset test;
  std::vector<double> feature_min;  // fitted on train
  std::vector<double> feature_max;
};

struct IntrusionLoadOptions {
  LabelMode mode = LabelMode::binary;
  double test_fraction = 0.2;  // stratified per class
  std::uint64_t split_seed = 7;
};

// Rows are grouped into non-overlapping windows of window_length consecutive
// rows per flow; a window takes the label of its last row. Features are
// min-max scaled with statistics from the training split only (constant
// columns map to 0).
IntrusionSplit load_intrusion_csv(const std::filesystem::path& csv, const IntrusionSchema& schema,
                                  const IntrusionLoadOptions& options = {});

// ---- batching ------------------------------------------------------------------

struct Batch {
  std::vector<Matrix> inputs;  // T matrices of [B x m]
  std::vector<int> labels;     // [B]
  std::vector<std::size_t> indices;  // dataset rows in this batch
};

// Fixed partition of one epoch into batches. The final short batch is kept.
class Batches {
 public:
  Batches(const SequenceDataset& ds, std::size_t batch_size, bool shuffle, std::uint64_t seed);

  std::size_t size() const noexcept { return (order_.size() + batch_ - 1) / batch_; }
  Batch operator[](std::size_t i) const;
  std::span<const std::size_t> order() const noexcept { return order_; }

  class iterator {
   public:
    iterator(const Batches* owner, std::size_t pos) : owner_(owner), pos_(pos) {}
    Batch operator*() const { return (*owner_)[pos_]; }
    iterator& operator++() {
      ++pos_;
      return *this;
    }
    bool operator==(const iterator& o) const noexcept { return pos_ == o.pos_; }

   private:
    const Batches* owner_;
    std::size_t pos_;
  };
  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, size()}; }

 private:
  const SequenceDataset* ds_;
  std::size_t batch_;
  std::vector<std::size_t> order_;
};

Batches batches(const SequenceDataset& ds, std::size_t batch_size, bool shuffle,
                std::uint64_t seed);

// Time-major inputs for an explicit list of samples.
Batch gather(const SequenceDataset& ds, std::span<const std::size_t> indices);

}  // namespace rnnlab
