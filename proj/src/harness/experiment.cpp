#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>

#include "rnnlab/errors.hpp"
#include "rnnlab/harness.hpp"

namespace rnnlab {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t epoch_seed(std::uint64_t seed, std::size_t epoch) {
  return seed * 1000003ULL + epoch;
}

MetricsReport report_for(const Model& model, const SequenceDataset& test) {
  MetricsReport r = make_report(evaluate(model, test));
  r.param_count = model.param_count();
  return r;
}

}  // namespace

Model init_model(const CellShape& shape, std::size_t classes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Model model{init_cell_params(shape, rng), {}};
  model.head = init_dense_params(classes, shape.hidden, rng);
  return model;
}

LoadedData load_data(const ExperimentConfig& cfg) {
  LoadedData out;
  const auto dir = cfg.effective_data_dir();
  if (cfg.dataset == DatasetKind::mnist) {
    auto split = load_mnist_dir(dir, cfg.reshape);
    out.train = std::move(split.train);
    out.test = std::move(split.test);
  } else {
    const auto csv = cfg.csv_path.empty() ? dir / "intrusion.csv" : cfg.csv_path;
    const auto schema_path =
        cfg.schema_path.empty() ? dir / "intrusion_schema.json" : cfg.schema_path;
    auto schema = IntrusionSchema::from_json_file(schema_path);
    if (cfg.window) schema.window_length = *cfg.window;
    IntrusionLoadOptions opts;
    opts.mode = cfg.label_mode;
    auto split = load_intrusion_csv(csv, schema, opts);
    out.train = std::move(split.train);
    out.test = std::move(split.test);
  }
  if (cfg.train_limit > 0) out.train = out.train.head(cfg.train_limit);
  if (cfg.test_limit > 0) out.test = out.test.head(cfg.test_limit);
  out.train.validate();
  out.test.validate();
  if (out.train.size() == 0 || out.test.size() == 0) {
    throw DataError("empty train or test split");
  }
  return out;
}

ConfusionMatrix evaluate(const Model& model, const SequenceDataset& ds, std::size_t eval_batch) {
  ConfusionMatrix cm(ds.num_classes());
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < ds.size(); start += eval_batch) {
    const std::size_t stop = std::min(ds.size(), start + eval_batch);
    idx.resize(stop - start);
    std::iota(idx.begin(), idx.end(), start);
    const Batch b = gather(ds, idx);
    const CellState s =
        run_sequence(model.cell, b.inputs, CellState::zeros(model.cell.shape, idx.size()));
    const auto preds = argmax_rows(dense_forward(model.head, s.h));
    for (std::size_t i = 0; i < preds.size(); ++i) {
      cm.add(static_cast<std::size_t>(b.labels[i]), static_cast<std::size_t>(preds[i]));
    }
  }
  return cm;
}

RunRecord run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_experiment(cfg, load_data(cfg));
}

RunRecord run_experiment(const ExperimentConfig& cfg, const LoadedData& data) {
  cfg.validate();
  const auto total_start = Clock::now();
  RunRecord rec;
  rec.config = cfg;
  rec.config_hash = config_hash(cfg);
  rec.code_version = code_version();

  const CellShape shape{cfg.arch, cfg.hidden, data.train.features, cfg.gate};
  rec.model = init_model(shape, data.train.num_classes(), cfg.seed);
  Model& model = rec.model;
  AdamState opt_cell = make_adam_state(model.cell.arrays, cfg.adam);
  AdamState opt_head = make_adam_state(model.head.arrays, cfg.adam);
  const std::size_t B = cfg.effective_batch_size();

  if (cfg.epochs == 0) {
    rec.epochs.push_back({0, 0.0, report_for(model, data.test), 0.0});
  }

  for (std::size_t epoch = 1; epoch <= cfg.epochs && !rec.abort_reason; ++epoch) {
    const auto epoch_start = Clock::now();
    const Batches plan(data.train, B, true, epoch_seed(cfg.seed, epoch));
    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t bi = 0; bi < plan.size(); ++bi) {
      const Batch batch = plan[bi];
      const std::size_t rows = batch.labels.size();
      const auto fwd = forward_sequence(model.cell, batch.inputs, CellState::zeros(shape, rows));
      const Matrix& h_last = fwd.states.back().h;
      const Matrix logits = dense_forward(model.head, h_last);
      const BatchXent xent = softmax_xent(logits, batch.labels);
      if (!std::isfinite(xent.loss)) {
        rec.abort_reason = "non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(bi);
        break;
      }
      DenseBackward head_grads = dense_backward(model.head, h_last, xent.d_logits);
      std::vector<Matrix> d_h(batch.inputs.size());
      d_h.back() = std::move(head_grads.d_h);
      SequenceGradients cell_grads =
          backward_sequence(model.cell, fwd.caches, d_h, {}, cfg.bptt_truncate);
      if (cfg.clip_norm > 0.0) {
        ParamSet* sets[] = {&cell_grads.params, &head_grads.grads};
        clip_global_norm(sets, cfg.clip_norm);
      }
      try {
        adam_step(model.cell.arrays, cell_grads.params, opt_cell);
        adam_step(model.head.arrays, head_grads.grads, opt_head);
      } catch (const NumericError& e) {
        rec.abort_reason = std::string(e.what()) + " at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(bi);
        break;
      }
      loss_sum += xent.loss * static_cast<double>(rows);
      seen += rows;
    }
    const double train_s = seconds_since(epoch_start);
    rec.time_train_s += train_s;
    EpochRecord er{epoch, seen ? loss_sum / static_cast<double>(seen) : 0.0,
                   report_for(model, data.test), train_s};
    if (cfg.verbose) {
      std::cerr << to_string(cfg.arch) << " epoch " << epoch << "/" << cfg.epochs
                << " loss " << er.train_loss << " acc " << er.eval.accuracy << "% ("
                << train_s << " s)\n";
    }
    rec.epochs.push_back(std::move(er));
  }

  if (rec.epochs.empty()) {
    rec.epochs.push_back({0, 0.0, report_for(model, data.test), 0.0});
  }
  rec.final = rec.epochs.back().eval;
  rec.time_total_s = seconds_since(total_start);
  rec.final.wall_time_minutes = rec.time_train_s / 60.0;
  if (rec.abort_reason) rec.final.flags.push_back("aborted: " + *rec.abort_reason);
  if (cfg.write_outputs) persist_run(rec);
  return rec;
}

std::vector<RunRecord> run_compare(const ExperimentConfig& base) {
  base.validate();
  const LoadedData data = load_data(base);
  std::vector<RunRecord> runs;
  for (Arch a : kAllArchs) {
    ExperimentConfig cfg = base;
    cfg.arch = a;
    runs.push_back(run_experiment(cfg, data));
  }
  if (base.write_outputs) {
    std::filesystem::create_directories(base.out_dir);
    write_compare_csv(base.out_dir / "compare.csv", runs);
  }
  return runs;
}

}  // namespace rnnlab
