// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--scale ci|full] [--data-dir DIR] [--only 1,2,...]
//
// ci runs the MNIST gate on a 10,000/2,000 subset and skips the five-epoch
// cross-architecture comparison; full runs both at full size.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "../oracle/naive_cells.hpp"
#include "rnnlab/gradcheck.hpp"
#include "rnnlab/harness.hpp"
#include "rnnlab/kernels.hpp"

using namespace rnnlab;

namespace {

// Pinned tolerances and thresholds.
constexpr double kGradRelTol = 1e-4;
constexpr double kGradEps = 1e-5;
constexpr std::size_t kGradSeeds = 20;
constexpr double kGradSeconds = 60.0;
constexpr double kOracleTol = 1e-12;
constexpr int kOracleInstances = 50;
constexpr double kOracleSeconds = 10.0;
constexpr double kMnistCiAccuracy = 85.0;
constexpr double kMnistFullAccuracy = 94.0;
constexpr double kRnnGapPoints = 10.0;
constexpr double kGatedAccuracy = 90.0;
constexpr double kIotF1 = 95.0;
constexpr double kHarmonicTol = 1e-9;
constexpr double kPropertySeconds = 120.0;

enum class Status { pass, fail, skip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome verdict(bool ok, std::string detail) {
  return {ok ? Status::pass : Status::fail, std::move(detail)};
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 2) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << v;
  return os.str();
}

struct Context {
  std::string scale = "ci";
  std::filesystem::path data_dir;
  std::filesystem::path work;
  bool full() const { return scale == "full"; }
};

bool mnist_present(const std::filesystem::path& dir) {
  for (const auto& d : {dir, dir / "mnist"}) {
    if (std::filesystem::exists(d / "train-images-idx3-ubyte")) return true;
  }
  return false;
}

// ---- 1 ----------------------------------------------------------------------

Outcome gradient_suite(const Context&) {
  const auto t0 = Clock::now();
  GradCheckOptions opts;
  opts.epsilon = kGradEps;
  opts.rel_tol = kGradRelTol;
  double worst = 0.0;
  std::string failed;
  for (Arch a : kAllArchs) {
    const auto rep = check_cell(a, 4, 3, 6, seed_range(kGradSeeds), opts);
    for (const auto& s : rep.slots) worst = std::max(worst, s.max_rel_err);
    if (!rep.pass) failed += std::string(failed.empty() ? "" : ",") + std::string(to_string(a));
  }
  const double secs = seconds_since(t0);
  return verdict(failed.empty() && worst <= kGradRelTol && secs < kGradSeconds,
                 "5 archs x " + std::to_string(kGradSeeds) + " seeds, max rel err " + sci(worst) +
                     (failed.empty() ? "" : ", failing: " + failed) + ", " + fmt(secs) + " s");
}

// ---- 2 ----------------------------------------------------------------------

Outcome oracle_equivalence(const Context&) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0), ub(-0.5, 0.5);
  double worst = 0.0;
  for (Arch a : kAllArchs) {
    for (int trial = 0; trial < kOracleInstances; ++trial) {
      const std::size_t n = 1 + rng() % 8, m = 1 + rng() % 8, T = 1 + rng() % 10, B = 1 + rng() % 3;
      const GateFn gate = trial % 2 ? GateFn::hard : GateFn::logistic;
      CellParams p = init_cell_params({a, n, m, gate}, rng);
      for (auto& slot : p.arrays) {
        if (slot.kind == SlotKind::bias) for (double& v : slot.value.flat()) v = ub(rng);
      }
      std::vector<Matrix> seq(T, Matrix(B, m));
      for (auto& x : seq) for (double& v : x.flat()) v = u(rng);
      CellState s0 = CellState::zeros(p.shape, B);
      for (double& v : s0.h.flat()) v = ub(rng);
      for (double& v : s0.c.flat()) v = ub(rng);

      const auto fwd = forward_sequence(p, seq, s0);
      for (std::size_t b = 0; b < B; ++b) {
        std::vector<oracle::Vec> xs;
        for (const auto& x : seq) xs.emplace_back(x.row(b).begin(), x.row(b).end());
        oracle::State o0{{s0.h.row(b).begin(), s0.h.row(b).end()}, {}};
        if (s0.has_memory()) o0.c.assign(s0.c.row(b).begin(), s0.c.row(b).end());
        const auto ref = oracle::rollout(p, xs, o0);
        for (std::size_t t = 0; t < T; ++t) {
          for (std::size_t k = 0; k < n; ++k) {
            worst = std::max(worst, std::abs(ref[t].h[k] - fwd.states[t].h(b, k)));
            if (s0.has_memory()) worst = std::max(worst, std::abs(ref[t].c[k] - fwd.states[t].c(b, k)));
          }
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  return verdict(worst <= kOracleTol && secs < kOracleSeconds,
                 std::to_string(kOracleInstances) + " instances per arch, max |diff| " + sci(worst) +
                     ", " + fmt(secs) + " s");
}

// ---- 3 ----------------------------------------------------------------------

Outcome census_rows(const Context&) {
  const auto rows = census_all(100, 28);
  const int gates[] = {0, 2, 3, 3, 1};
  const bool memory[] = {false, false, true, true, true};
  const std::size_t biases[] = {1, 3, 4, 4, 2};
  const int mults[] = {2, 3, 3, 6, 3};
  const std::size_t matrices[] = {2, 6, 8, 11, 5};
  std::string bad;
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& c = rows[i];
    const bool ok = c.profile.gates == gates[i] && c.profile.memory_cell == memory[i] &&
                    c.biases == biases[i] && c.profile.elementwise_mults == mults[i] &&
                    c.matrices == matrices[i];
    if (!ok) bad += std::string(bad.empty() ? "" : ",") + std::string(to_string(c.arch));
  }
  const auto& lite = rows[4];
  const bool noted = lite.profile.published_weight_matrices == 6 && !lite.note.empty() &&
                     format_census_table(rows).find("note: LiteLSTM") != std::string::npos;
  return verdict(bad.empty() && noted,
                 "matrices 2/6/8/11/5, biases 1/3/4/4/2, gates 0/2/3/3/1" +
                     std::string(noted ? ", LiteLSTM 5-vs-6 note present" : ", note missing") +
                     (bad.empty() ? "" : ", mismatched: " + bad));
}

// ---- 4 ----------------------------------------------------------------------

Outcome compute_ordering(const Context&) {
  const auto rows = census_all(100, 28);
  const Census* order[] = {&rows[0], &rows[4], &rows[1], &rows[2], &rows[3]};
  bool ok = true;
  std::string detail = "MACs/step";
  for (std::size_t i = 0; i < 5; ++i) {
    detail += (i ? " < " : " ") + std::string(display_name(order[i]->arch)) + " " +
              std::to_string(order[i]->macs_per_step);
    if (i > 0) ok = ok && order[i - 1]->macs_per_step < order[i]->macs_per_step;
  }
  return verdict(ok, detail);
}

// ---- 5 ----------------------------------------------------------------------

ExperimentConfig mnist_config(const Context& ctx) {
  ExperimentConfig cfg;
  cfg.arch = Arch::litelstm;
  cfg.data_dir = ctx.data_dir;
  cfg.write_outputs = false;
  return cfg;
}

Outcome mnist_litelstm(const Context& ctx) {
  if (!mnist_present(ctx.data_dir)) {
    return {Status::fail, "MNIST IDX files not found under '" + ctx.data_dir.string() + "'"};
  }
  ExperimentConfig cfg = mnist_config(ctx);
  cfg.epochs = 2;
  cfg.train_limit = 10000;
  cfg.test_limit = 2000;
  const RunRecord ci = run_experiment(cfg);
  bool ok = ci.final.accuracy >= kMnistCiAccuracy;
  std::string detail = "CI gate (2 epochs, 10k/2k) " + fmt(ci.final.accuracy) + "% >= " +
                       fmt(kMnistCiAccuracy, 0);
  if (ctx.full()) {
    cfg.epochs = 20;
    cfg.train_limit = cfg.test_limit = 0;
    cfg.verbose = true;
    const RunRecord full = run_experiment(cfg);
    ok = ok && full.final.accuracy >= kMnistFullAccuracy && !full.abort_reason;
    detail += "; 20 epochs full set " + fmt(full.final.accuracy) + "% >= " +
              fmt(kMnistFullAccuracy, 0) + " (" + fmt(full.time_train_s / 60.0) + " min train)";
  } else {
    detail += "; 20-epoch run needs --scale full";
  }
  return verdict(ok, detail);
}

// ---- 6 ----------------------------------------------------------------------

Outcome mnist_ordering(const Context& ctx) {
  if (!ctx.full()) return {Status::skip, "five archs x 5 epochs on full MNIST; run with --scale full"};
  if (!mnist_present(ctx.data_dir)) {
    return {Status::fail, "MNIST IDX files not found under '" + ctx.data_dir.string() + "'"};
  }
  ExperimentConfig cfg = mnist_config(ctx);
  cfg.epochs = 5;
  cfg.verbose = true;
  const LoadedData data = load_data(cfg);
  double rnn = 0.0, min_gated = 100.0;
  std::string detail;
  double t_lite = 0.0, t_lstm = 0.0;
  for (Arch a : kAllArchs) {
    cfg.arch = a;
    const RunRecord rec = run_experiment(cfg, data);
    detail += std::string(detail.empty() ? "" : ", ") + std::string(display_name(a)) + " " +
              fmt(rec.final.accuracy) + "%";
    if (a == Arch::rnn) {
      rnn = rec.final.accuracy;
    } else {
      min_gated = std::min(min_gated, rec.final.accuracy);
    }
    if (a == Arch::litelstm) t_lite = rec.time_train_s;
    if (a == Arch::lstm) t_lstm = rec.time_train_s;
  }
  const double gap = min_gated - rnn;
  detail += "; RNN gap " + fmt(gap) + " points (need >= " + fmt(kRnnGapPoints, 0) +
            "), LiteLSTM/LSTM train time " + fmt(t_lite / t_lstm);
  return verdict(gap >= kRnnGapPoints && min_gated > kGatedAccuracy, detail);
}

// ---- 7 ----------------------------------------------------------------------

bool harmonic_ok(const MetricsReport& r) {
  const double hm = r.precision + r.recall > 0.0
                        ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                        : 0.0;
  return std::abs(r.f1 - hm) <= kHarmonicTol;
}

Outcome iot_fixture(const Context& ctx) {
  ExperimentConfig cfg;
  cfg.arch = Arch::litelstm;
  cfg.dataset = DatasetKind::intrusion_csv;
  cfg.csv_path = std::filesystem::path(RNNLAB_FIXTURE_DIR) / "intrusion_separable.csv";
  cfg.schema_path = std::filesystem::path(RNNLAB_FIXTURE_DIR) / "intrusion_separable.schema.json";
  cfg.label_mode = LabelMode::binary;
  cfg.epochs = 20;
  cfg.out_dir = ctx.work / "iot";
  const RunRecord rec = run_experiment(cfg);
  bool consistent = rec.final.binary && harmonic_ok(rec.final);
  for (const auto& e : rec.epochs) consistent = consistent && harmonic_ok(e.eval);

  // The persisted record must carry the same self-consistent numbers.
  std::ifstream js(cfg.out_dir / ("run_" + rec.config_hash + ".json"));
  const auto j = nlohmann::json::parse(js);
  MetricsReport stored;
  stored.precision = j["final"]["precision"];
  stored.recall = j["final"]["recall"];
  stored.f1 = j["final"]["f1"];
  consistent = consistent && harmonic_ok(stored) && stored.f1 == rec.final.f1;

  return verdict(rec.final.f1 >= kIotF1 && consistent,
                 "LiteLSTM binary F1 " + fmt(rec.final.f1) + "% >= " + fmt(kIotF1, 0) +
                     " (P " + fmt(rec.final.precision) + ", R " + fmt(rec.final.recall) +
                     "), harmonic identity " + (consistent ? "holds" : "VIOLATED"));
}

// ---- 8 ----------------------------------------------------------------------

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  return out;
}

Outcome determinism(const Context& ctx) {
  const std::string fixtures = RNNLAB_FIXTURE_DIR;
  auto run = [&](const std::string& tag) {
    const auto out = ctx.work / ("det_" + tag);
    std::filesystem::remove_all(out);
    const std::string cmd = std::string("\"") + RNNLAB_CLI + "\" train --dataset intrusion_csv --csv \"" +
                            fixtures + "/intrusion_separable.csv\" --schema \"" + fixtures +
                            "/intrusion_separable.schema.json\" --hidden 16 --epochs 3 --seed 5 --quiet --out \"" +
                            out.string() + "\" > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    std::ifstream in(out / "runs.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    return std::make_tuple(rc, split(header), split(row));
  };
  const auto [rc1, h1, r1] = run("a");
  const auto [rc2, h2, r2] = run("b");
  if (rc1 != 0 || rc2 != 0 || r1.empty() || r2.empty()) {
    return {Status::fail, "train invocation failed (exit " + std::to_string(rc1) + "/" +
                              std::to_string(rc2) + ")"};
  }
  const std::set<std::string> metric_fields{"config_hash", "params", "accuracy", "precision",
                                            "recall", "f1", "micro_f1"};
  std::size_t compared = 0;
  std::string differing;
  for (std::size_t i = 0; i < h1.size() && i < r1.size() && i < r2.size(); ++i) {
    if (!metric_fields.count(h1[i])) continue;
    ++compared;
    if (r1[i] != r2[i]) differing += " " + h1[i];
  }
  return verdict(compared == metric_fields.size() && differing.empty(),
                 "two CLI train runs, " + std::to_string(compared) + " runs.csv fields compared" +
                     (differing.empty() ? ", bit-identical" : ", differing:" + differing));
}

// ---- 9 ----------------------------------------------------------------------

Outcome property_suites(const Context&) {
  const auto t0 = Clock::now();
  const std::string cmd = std::string("\"") + RNNLAB_UNIT_TESTS +
                          "\" --test-case=\"property:*\" --no-intro --minimal > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  const double secs = seconds_since(t0);
  return verdict(rc == 0 && secs < kPropertySeconds,
                 "property test cases " + std::string(rc == 0 ? "passed" : "FAILED") + " in " +
                     fmt(secs) + " s (limit " + fmt(kPropertySeconds, 0) + " s)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rnnlab acceptance suite"};
  Context ctx;
  std::vector<int> only;
  app.add_option("--scale", ctx.scale, "ci or full")->check(CLI::IsMember({"ci", "full"}));
  app.add_option("--data-dir", ctx.data_dir, "directory holding the MNIST IDX files");
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  if (ctx.data_dir.empty()) {
    if (const char* env = std::getenv(kDataDirEnv); env && *env) {
      ctx.data_dir = env;
    } else {
      ctx.data_dir = RNNLAB_DEFAULT_MNIST_DIR;
    }
  }
  ctx.work = std::filesystem::temp_directory_path() / ("rnnlab_acceptance_" + ctx.scale);
  std::filesystem::create_directories(ctx.work);

  const std::vector<std::pair<const char*, std::function<Outcome(const Context&)>>> criteria{
      {"gradient suite", gradient_suite},
      {"oracle equivalence", oracle_equivalence},
      {"component census", census_rows},
      {"compute-budget ordering", compute_ordering},
      {"MNIST LiteLSTM accuracy", mnist_litelstm},
      {"cross-architecture MNIST ordering", mnist_ordering},
      {"intrusion fixture F1 and metric consistency", iot_fixture},
      {"determinism of train", determinism},
      {"property suites", property_suites},
  };

  std::cout << "acceptance (" << ctx.scale << " scale, kernels " << kernels::active().name << ")\n";
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o;
    try {
      o = criteria[i].second(ctx);
    } catch (const std::exception& e) {
      o = {Status::fail, std::string("threw: ") + e.what()};
    }
    const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
    if (o.status == Status::fail) ++failures;
    std::cout << "criterion " << id << "  " << tag << "  " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::filesystem::remove_all(ctx.work);
  return failures == 0 ? 0 : 1;
}
