#include <cstdlib>
#include <iomanip>
#include <sstream>

#include "rnnlab/harness.hpp"

namespace rnnlab {

DatasetKind parse_dataset(std::string_view text) {
  if (text == "mnist") return DatasetKind::mnist;
  if (text == "intrusion_csv") return DatasetKind::intrusion_csv;
  throw std::invalid_argument("unknown dataset '" + std::string(text) +
                              "' (expected mnist or intrusion_csv)");
}

std::string_view to_string(DatasetKind d) noexcept {
  return d == DatasetKind::mnist ? "mnist" : "intrusion_csv";
}

std::size_t ExperimentConfig::effective_batch_size() const noexcept {
  if (batch_size) return *batch_size;
  return dataset == DatasetKind::mnist ? 128 : 32;
}

std::filesystem::path ExperimentConfig::effective_data_dir() const {
  if (!data_dir.empty()) return data_dir;
  if (const char* env = std::getenv(kDataDirEnv); env && *env) return env;
  return "data";
}

void ExperimentConfig::validate() const {
  if (hidden < 1) throw std::invalid_argument("hidden size must be >= 1");
  if (effective_batch_size() < 1) throw std::invalid_argument("batch size must be >= 1");
  if (window && *window < 1) throw std::invalid_argument("window must be >= 1");
  if (!(clip_norm >= 0.0)) throw std::invalid_argument("clip norm must be >= 0");
  (void)make_adam_state(ParamSet{}, adam);
}

nlohmann::ordered_json to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["arch"] = std::string(to_string(cfg.arch));
  j["dataset"] = std::string(to_string(cfg.dataset));
  j["hidden"] = cfg.hidden;
  if (cfg.dataset == DatasetKind::mnist) {
    j["reshape"] = std::string(to_string(cfg.reshape));
  } else {
    j["label_mode"] = std::string(to_string(cfg.label_mode));
    j["window"] = cfg.window ? nlohmann::ordered_json(*cfg.window) : nullptr;
    j["csv"] = cfg.csv_path.string();
    j["schema"] = cfg.schema_path.string();
  }
  j["batch_size"] = cfg.effective_batch_size();
  j["epochs"] = cfg.epochs;
  j["lr"] = cfg.adam.lr;
  j["beta1"] = cfg.adam.beta1;
  j["beta2"] = cfg.adam.beta2;
  j["eps"] = cfg.adam.eps;
  j["gate"] = std::string(to_string(cfg.gate));
  j["seed"] = cfg.seed;
  j["train_limit"] = cfg.train_limit;
  j["test_limit"] = cfg.test_limit;
  j["clip_norm"] = cfg.clip_norm;
  j["bptt_truncate"] = cfg.bptt_truncate;
  return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string code_version() {
#ifdef RNNLAB_VERSION
  return RNNLAB_VERSION;
#else
  return "unknown";
#endif
}

}  // namespace rnnlab
