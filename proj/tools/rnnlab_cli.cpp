// rnnlab: train, evaluate and compare recurrent cells; check gradients;
// print the component census.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rnnlab/gradcheck.hpp"
#include "rnnlab/harness.hpp"
#include "rnnlab/kernels.hpp"
#include "rnnlab/serialize.hpp"

using namespace rnnlab;

namespace {

struct ExperimentFlags {
  std::string arch = "litelstm";
  std::string dataset = "mnist";
  std::string reshape = "rows28x28";
  std::string gate = "logistic";
  std::string label_mode = "binary";
  std::size_t batch_size = 0;
  std::size_t window = 0;
  std::string data_dir, out = "runs", schema, csv;
  ExperimentConfig cfg;

  void attach(CLI::App* app, bool with_arch) {
    if (with_arch) {
      app->add_option("--arch", arch, "rnn | gru | lstm | plstm | litelstm")->capture_default_str();
    }
    app->add_option("--dataset", dataset, "mnist | intrusion_csv")->capture_default_str();
    app->add_option("--hidden", cfg.hidden, "hidden size n")->capture_default_str();
    app->add_option("--reshape", reshape, "rows28x28 | pixels784x1")->capture_default_str();
    app->add_option("--batch-size", batch_size, "default 128 (mnist) or 32 (intrusion_csv)");
    app->add_option("--epochs", cfg.epochs)->capture_default_str();
    app->add_option("--lr", cfg.adam.lr)->capture_default_str();
    app->add_option("--beta1", cfg.adam.beta1)->capture_default_str();
    app->add_option("--beta2", cfg.adam.beta2)->capture_default_str();
    app->add_option("--eps", cfg.adam.eps)->capture_default_str();
    app->add_option("--gate", gate, "logistic | hard")->capture_default_str();
    app->add_option("--seed", cfg.seed)->capture_default_str();
    app->add_option("--data-dir", data_dir, std::string("default $") + kDataDirEnv + ", then ./data");
    app->add_option("--out", out, "output directory")->capture_default_str();
    app->add_option("--schema", schema, "intrusion CSV JSON schema");
    app->add_option("--csv", csv, "intrusion CSV file (default <data-dir>/intrusion.csv)");
    app->add_option("--window", window, "rows per window (overrides the schema)");
    app->add_option("--label-mode", label_mode, "binary | multiclass")->capture_default_str();
    app->add_option("--train-limit", cfg.train_limit, "use the first N training samples");
    app->add_option("--test-limit", cfg.test_limit, "use the first N test samples");
    app->add_option("--clip-norm", cfg.clip_norm, "global gradient-norm clip (0 = off)");
    app->add_option("--bptt-truncate", cfg.bptt_truncate, "truncate BPTT after N steps (0 = off)");
    app->add_flag("--no-write", [this](std::int64_t) { cfg.write_outputs = false; },
                  "do not write runs.csv, run JSON or weights");
    app->add_flag("--quiet", [this](std::int64_t) { cfg.verbose = false; }, "no per-epoch progress");
  }

  ExperimentConfig resolve() {
    cfg.arch = parse_arch(arch);
    cfg.dataset = parse_dataset(dataset);
    cfg.reshape = parse_reshape(reshape);
    cfg.gate = parse_gate(gate);
    cfg.label_mode = parse_label_mode(label_mode);
    if (batch_size > 0) cfg.batch_size = batch_size;
    if (window > 0) cfg.window = window;
    cfg.data_dir = data_dir;
    cfg.out_dir = out;
    cfg.schema_path = schema;
    cfg.csv_path = csv;
    cfg.validate();
    return cfg;
  }
};

int cmd_train(ExperimentFlags& flags) {
  const RunRecord rec = run_experiment(flags.resolve());
  std::cout << display_name(rec.config.arch) << " on " << to_string(rec.config.dataset)
            << " (config " << rec.config_hash << ", " << rec.epochs.size() << " epochs)\n"
            << format_table(rec.final);
  if (rec.abort_reason) {
    std::cerr << "training aborted: " << *rec.abort_reason << '\n';
    return 3;
  }
  return 0;
}

int cmd_eval(ExperimentFlags& flags, const std::string& weights) {
  const ExperimentConfig cfg = flags.resolve();
  StoredWeights stored = load_weights(weights);
  if (stored.head.size() == 0) throw std::runtime_error(weights + " holds no classifier head");
  const Model model{stored.cell, dense_from_arrays(stored.head)};
  const LoadedData data = load_data(cfg);
  if (data.test.features != model.cell.shape.input ||
      data.test.num_classes() != model.head.classes()) {
    throw std::runtime_error("weights expect " + std::to_string(model.cell.shape.input) +
                             " features and " + std::to_string(model.head.classes()) +
                             " classes; dataset has " + std::to_string(data.test.features) +
                             " and " + std::to_string(data.test.num_classes()));
  }
  MetricsReport r = make_report(evaluate(model, data.test));
  r.param_count = model.param_count();
  std::cout << display_name(model.cell.shape.arch) << " from " << weights << " on "
            << data.test.size() << " test samples\n"
            << format_table(r);
  return 0;
}

int cmd_gradcheck(const std::string& arch, std::size_t hidden, std::size_t input,
                  std::size_t steps, std::size_t seeds, const std::string& gate) {
  GradCheckOptions opts;
  opts.gate = parse_gate(gate);
  bool all_pass = true;
  for (Arch a : kAllArchs) {
    if (arch != "all" && a != parse_arch(arch)) continue;
    const GradReport rep = check_cell(a, hidden, input, steps, seed_range(seeds), opts);
    std::cout << format_report(rep) << '\n';
    all_pass = all_pass && rep.pass;
  }
  std::cout << (all_pass ? "PASS" : "FAIL") << '\n';
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rnnlab: recurrent-cell experiments on MNIST and intrusion-detection CSV"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_version_flag("--version", code_version());

  ExperimentFlags train_flags, eval_flags, compare_flags;
  train_flags.cfg.verbose = true;
  compare_flags.cfg.verbose = true;

  auto* train = app.add_subcommand("train", "train one architecture and record the run");
  train_flags.attach(train, true);

  auto* eval = app.add_subcommand("eval", "evaluate stored weights on a test split");
  std::string weights;
  eval->add_option("--weights", weights, "weights file written by train")->required();
  eval_flags.attach(eval, false);

  auto* compare = app.add_subcommand("compare", "train all five architectures with one config");
  compare_flags.attach(compare, false);

  auto* grad = app.add_subcommand("gradcheck", "finite-difference check of every backward pass");
  std::string g_arch = "all", g_gate = "logistic";
  std::size_t g_hidden = 4, g_input = 3, g_steps = 6, g_seeds = 20;
  grad->add_option("--arch", g_arch, "architecture or all")->capture_default_str();
  grad->add_option("--hidden", g_hidden)->capture_default_str();
  grad->add_option("--input", g_input)->capture_default_str();
  grad->add_option("--steps", g_steps)->capture_default_str();
  grad->add_option("--seeds", g_seeds)->capture_default_str();
  grad->add_option("--gate", g_gate, "logistic | hard")->capture_default_str();

  auto* census = app.add_subcommand("census", "component table for every architecture");
  std::size_t c_hidden = 100, c_input = 28;
  census->add_option("--hidden", c_hidden)->capture_default_str();
  census->add_option("--input", c_input)->capture_default_str();

  app.add_flag_callback("--kernels", [] { std::cout << "kernels: " << kernels::active().name << '\n'; },
                        "print the selected linear-algebra kernels");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(train_flags);
    if (*eval) return cmd_eval(eval_flags, weights);
    if (*grad) return cmd_gradcheck(g_arch, g_hidden, g_input, g_steps, g_seeds, g_gate);
    if (*census) {
      std::cout << "n = " << c_hidden << ", m = " << c_input << '\n'
                << format_census_table(census_all(c_hidden, c_input));
      return 0;
    }
    if (*compare) {
      const auto runs = run_compare(compare_flags.resolve());
      std::cout << format_compare_table(runs);
      for (const auto& r : runs) {
        if (r.abort_reason) {
          std::cerr << display_name(r.config.arch) << " aborted: " << *r.abort_reason << '\n';
        }
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
