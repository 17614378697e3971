#pragma once

// Experiment runner: configuration, training loop, evaluation, timing and
// result persistence.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rnnlab/cells.hpp"
#include "rnnlab/data.hpp"
#include "rnnlab/head.hpp"
#include "rnnlab/metrics.hpp"
#include "rnnlab/optimizer.hpp"

namespace rnnlab {

enum class DatasetKind { mnist, intrusion_csv };

DatasetKind parse_dataset(std::string_view text);
std::string_view to_string(DatasetKind d) noexcept;

// Environment variable consulted when no data directory is given.
inline constexpr const char* kDataDirEnv = "RNNLAB_DATA_DIR";

struct ExperimentConfig {
  Arch arch = Arch::litelstm;
  DatasetKind dataset = DatasetKind::mnist;
  std::size_t hidden = 100;
  MnistReshape reshape = MnistReshape::rows28x28;
  LabelMode label_mode = LabelMode::binary;
  std::optional<std::size_t> window;      // overrides the schema's window_length
  std::optional<std::size_t> batch_size;  // default: 128 for MNIST, 32 for CSV
  std::size_t epochs = 20;
  AdamConfig adam;
  GateFn gate = GateFn::logistic;
  std::uint64_t seed = 1;
  std::filesystem::path data_dir;  // empty: $RNNLAB_DATA_DIR, then "data"
  std::filesystem::path csv_path;  // empty: <data_dir>/intrusion.csv
  std::filesystem::path schema_path;
  std::filesystem::path out_dir = "runs";
  std::size_t train_limit = 0;  // 0 = all samples
  std::size_t test_limit = 0;
  double clip_norm = 0.0;         // 0 = no clipping
  std::size_t bptt_truncate = 0;  // 0 = full sequence
  bool write_outputs = true;
  bool verbose = false;

  std::size_t effective_batch_size() const noexcept;
  std::filesystem::path effective_data_dir() const;
  // Throws std::invalid_argument on counts < 1 or bad optimizer settings.
  void validate() const;
};

nlohmann::ordered_json to_json(const ExperimentConfig& cfg);
// FNV-1a over the configuration, excluding output-only fields.
std::string config_hash(const ExperimentConfig& cfg);

struct Model {
  CellParams cell;
  DenseParams head;

  std::size_t param_count() const noexcept {
    return cell.arrays.scalar_count() + head.arrays.scalar_count();
  }
};

Model init_model(const CellShape& shape, std::size_t classes, std::uint64_t seed);

struct LoadedData {
  SequenceDataset train;
  SequenceDataset test;
};

// Loads and trims the configured dataset; errors surface before training.
LoadedData load_data(const ExperimentConfig& cfg);

// Forward-only evaluation in chunks of eval_batch samples.
ConfusionMatrix evaluate(const Model& model, const SequenceDataset& ds,
                         std::size_t eval_batch = 1000);

struct EpochRecord {
  std::size_t epoch = 0;  // 0 = before training
  double train_loss = 0.0;
  MetricsReport eval;
  double train_seconds = 0.0;
};

struct RunRecord {
  ExperimentConfig config;
  std::string config_hash;
  std::string code_version;
  std::vector<EpochRecord> epochs;
  MetricsReport final;
  double time_train_s = 0.0;
  double time_total_s = 0.0;
  std::optional<std::string> abort_reason;  // set when a non-finite loss stopped training
  Model model;
};

RunRecord run_experiment(const ExperimentConfig& cfg);
RunRecord run_experiment(const ExperimentConfig& cfg, const LoadedData& data);

// Runs every architecture in table order with otherwise identical settings.
std::vector<RunRecord> run_compare(const ExperimentConfig& base);

std::string code_version();

// ---- persistence ---------------------------------------------------------------

std::string runs_csv_header();
std::string runs_csv_row(const RunRecord& rec);
// Appends one row, writing the header first if the file is new.
void append_runs_csv(const std::filesystem::path& path, const RunRecord& rec);
nlohmann::ordered_json to_json(const RunRecord& rec);
// runs.csv, run_<hash>.json and weights_<hash>.bin (+ .json) under out_dir.
void persist_run(const RunRecord& rec);

// Table with one column per architecture and rows Time(m), Parameters,
// Accuracy(%) (plus Precision/Recall/F1-score for binary tasks).
std::string format_compare_table(const std::vector<RunRecord>& runs);
void write_compare_csv(const std::filesystem::path& path, const std::vector<RunRecord>& runs);

// Census of every architecture at (hidden, input), in table order.
std::vector<Census> census_all(std::size_t hidden, std::size_t input,
                               GateFn gate = GateFn::logistic);
std::string format_census_table(const std::vector<Census>& rows);

}  // namespace rnnlab
