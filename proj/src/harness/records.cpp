#include <fstream>
#include <iomanip>
#include <sstream>

#include "rnnlab/harness.hpp"
#include "rnnlab/serialize.hpp"

namespace rnnlab {
namespace {

using ojson = nlohmann::ordered_json;

ojson to_json(const MetricsReport& r) {
  ojson j;
  j["accuracy"] = r.accuracy;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["micro_f1"] = r.micro_f1;
  j["averaging"] = r.binary ? "binary (attack class)" : "macro";
  j["param_count"] = r.param_count;
  j["flags"] = r.flags;
  return j;
}

}  // namespace

std::string runs_csv_header() {
  return "config_hash,arch,dataset,params,time_train_s,time_total_s,accuracy,precision,recall,"
         "f1,micro_f1,epochs,seed,code_version,aborted";
}

std::string runs_csv_row(const RunRecord& rec) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << rec.config_hash << ',' << to_string(rec.config.arch) << ','
     << to_string(rec.config.dataset) << ',' << rec.model.param_count() << ','
     << rec.time_train_s << ',' << rec.time_total_s << ',' << rec.final.accuracy << ','
     << rec.final.precision << ',' << rec.final.recall << ',' << rec.final.f1 << ','
     << rec.final.micro_f1 << ',' << rec.config.epochs << ',' << rec.config.seed << ','
     << rec.code_version << ',' << (rec.abort_reason ? 1 : 0);
  return os.str();
}

void append_runs_csv(const std::filesystem::path& path, const RunRecord& rec) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (fresh) out << runs_csv_header() << '\n';
  out << runs_csv_row(rec) << '\n';
}

nlohmann::ordered_json to_json(const RunRecord& rec) {
  ojson j;
  j["config_hash"] = rec.config_hash;
  j["code_version"] = rec.code_version;
  j["config"] = to_json(rec.config);
  j["params"] = rec.model.param_count();
  j["time_train_s"] = rec.time_train_s;
  j["time_total_s"] = rec.time_total_s;
  j["final"] = to_json(rec.final);
  ojson epochs = ojson::array();
  for (const auto& e : rec.epochs) {
    ojson je;
    je["epoch"] = e.epoch;
    je["train_loss"] = e.train_loss;
    je["train_seconds"] = e.train_seconds;
    je["eval"] = to_json(e.eval);
    epochs.push_back(std::move(je));
  }
  j["epochs"] = std::move(epochs);
  j["aborted"] = rec.abort_reason ? ojson(*rec.abort_reason) : ojson(nullptr);
  return j;
}

void persist_run(const RunRecord& rec) {
  const auto& dir = rec.config.out_dir;
  std::filesystem::create_directories(dir);
  append_runs_csv(dir / "runs.csv", rec);
  {
    std::ofstream out(dir / ("run_" + rec.config_hash + ".json"));
    if (!out) throw std::runtime_error("cannot write run record under " + dir.string());
    out << to_json(rec).dump(2) << '\n';
  }
  save_weights(dir / ("weights_" + rec.config_hash + ".bin"), rec.model.cell,
               &rec.model.head.arrays);
}

std::string format_compare_table(const std::vector<RunRecord>& runs) {
  std::ostringstream os;
  const int w = 12;
  os << std::left << std::setw(16) << "Metric" << std::right;
  for (const auto& r : runs) os << std::setw(w) << display_name(r.config.arch);
  os << '\n' << std::fixed;
  auto row = [&](const char* label, auto get, int precision) {
    os << std::left << std::setw(16) << label << std::right << std::setprecision(precision);
    for (const auto& r : runs) os << std::setw(w) << get(r);
    os << '\n';
  };
  row("Time(m)", [](const RunRecord& r) { return r.time_train_s / 60.0; }, 2);
  row("Parameters", [](const RunRecord& r) { return r.model.param_count(); }, 0);
  row("Accuracy(%)", [](const RunRecord& r) { return r.final.accuracy; }, 2);
  const bool binary = !runs.empty() && runs.front().final.binary;
  if (binary) {
    row("Precision(%)", [](const RunRecord& r) { return r.final.precision; }, 2);
    row("Recall(%)", [](const RunRecord& r) { return r.final.recall; }, 2);
    row("F1-score(%)", [](const RunRecord& r) { return r.final.f1; }, 2);
  } else if (!runs.empty() && runs.front().config.dataset == DatasetKind::intrusion_csv) {
    row("Macro F1(%)", [](const RunRecord& r) { return r.final.f1; }, 2);
  }
  return os.str();
}

void write_compare_csv(const std::filesystem::path& path, const std::vector<RunRecord>& runs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "arch,time_train_min,params,accuracy,precision,recall,f1,config_hash\n";
  out << std::setprecision(17);
  for (const auto& r : runs) {
    out << to_string(r.config.arch) << ',' << r.time_train_s / 60.0 << ','
        << r.model.param_count() << ',' << r.final.accuracy << ',' << r.final.precision << ','
        << r.final.recall << ',' << r.final.f1 << ',' << r.config_hash << '\n';
  }
}

std::vector<Census> census_all(std::size_t hidden, std::size_t input, GateFn gate) {
  std::vector<Census> out;
  for (Arch a : kAllArchs) {
    out.push_back(param_census(zero_cell_params({a, hidden, input, gate})));
  }
  return out;
}

std::string format_census_table(const std::vector<Census>& rows) {
  std::ostringstream os;
  const int w = 11;
  os << std::left << std::setw(26) << "Component" << std::right;
  for (const auto& c : rows) os << std::setw(w) << display_name(c.arch);
  os << '\n';
  auto row = [&](const char* label, auto get) {
    os << std::left << std::setw(26) << label << std::right;
    for (const auto& c : rows) os << std::setw(w) << get(c);
    os << '\n';
  };
  auto yes_no = [](bool b) { return b ? "yes" : "no"; };
  row("gates", [](const Census& c) { return c.profile.gates; });
  row("activation functions", [](const Census& c) { return c.profile.activations; });
  row("memory cell", [&](const Census& c) { return yes_no(c.profile.memory_cell); });
  row("peephole", [&](const Census& c) { return yes_no(c.profile.peephole); });
  row("elementwise mults", [](const Census& c) { return c.profile.elementwise_mults; });
  row("weight matrices", [](const Census& c) { return c.matrices; });
  row("weight matrices (table)", [](const Census& c) { return c.profile.published_weight_matrices; });
  row("bias vectors", [](const Census& c) { return c.biases; });
  row("parameters", [](const Census& c) { return c.scalars; });
  row("MACs per step", [](const Census& c) { return c.macs_per_step; });
  for (const auto& c : rows) {
    if (!c.note.empty()) os << "note: " << display_name(c.arch) << " " << c.note << '\n';
  }
  return os.str();
}

}  // namespace rnnlab
