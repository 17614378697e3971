#include "rnnlab/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "rnnlab/errors.hpp"

namespace rnnlab {
namespace {

double checked(double loss) {
  if (!std::isfinite(loss)) {
    throw NumericError("finite_diff: loss is not finite at a probe point");
  }
  return loss;
}

struct Instance {
  CellParams params;
  std::size_t batch;
  std::size_t steps;
};

struct Probe {
  double loss;
  std::vector<double> gate_inputs;
};

// Inputs ride along as extra slots so one perturbation loop covers them.
ParamSet pack(const Instance& inst, const std::vector<Matrix>& seq, const CellState& s0) {
  ParamSet all = inst.params.arrays;
  Matrix xs(inst.steps * inst.batch, inst.params.shape.input);
  for (std::size_t t = 0; t < inst.steps; ++t) {
    std::copy(seq[t].flat().begin(), seq[t].flat().end(),
              xs.flat().begin() + static_cast<std::ptrdiff_t>(t * seq[t].size()));
  }
  all.add("input.x", SlotKind::weight, std::move(xs));
  all.add("input.h0", SlotKind::weight, s0.h);
  if (s0.has_memory()) {
    all.add("input.c0", SlotKind::weight, s0.c);
  }
  return all;
}

Probe rollout(const Instance& inst, const ParamSet& all) {
  CellParams p{inst.params.shape, {}};
  const std::size_t n_params = inst.params.arrays.size();
  for (std::size_t s = 0; s < n_params; ++s) {
    p.arrays.add(all[s].name, all[s].kind, all[s].value);
  }
  const Matrix& xs = all.value(n_params);
  std::vector<Matrix> seq;
  seq.reserve(inst.steps);
  const std::size_t m = inst.params.shape.input;
  for (std::size_t t = 0; t < inst.steps; ++t) {
    auto first = xs.flat().begin() + static_cast<std::ptrdiff_t>(t * inst.batch * m);
    seq.emplace_back(inst.batch, m, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(inst.batch * m)));
  }
  CellState s0;
  s0.h = all.value(n_params + 1);
  if (all.size() > n_params + 2) {
    s0.c = all.value(n_params + 2);
  }
  const auto fwd = forward_sequence(p, seq, s0);

  Probe out{0.0, {}};
  for (const auto& st : fwd.states) {
    for (double v : st.h.flat()) out.loss += v;
  }
  for (double v : fwd.states.back().c.flat()) out.loss += v;

  static const char* const kGateInputs[] = {"z_in", "r_in", "i_in", "f_in", "o_in", "inp"};
  const auto names = cache_names(inst.params.shape.arch);
  for (const auto& cache : fwd.caches) {
    for (std::size_t a = 0; a < names.size(); ++a) {
      if (std::find(std::begin(kGateInputs), std::end(kGateInputs), names[a]) !=
          std::end(kGateInputs)) {
        const auto vals = cache.acts[a].flat();
        out.gate_inputs.insert(out.gate_inputs.end(), vals.begin(), vals.end());
      }
    }
  }
  return out;
}

void fill_uniform(Matrix& m, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(lo, hi);
  for (double& v : m.flat()) v = d(rng);
}

}  // namespace

ParamSet finite_diff(const LossFn& loss, const ParamSet& params, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("finite_diff: epsilon must be positive");
  }
  checked(loss(params));
  ParamSet probe = params;
  ParamSet grad = params.zeros_like();
  for (std::size_t s = 0; s < probe.size(); ++s) {
    auto vals = probe.value(s).flat();
    auto out = grad.value(s).flat();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double orig = vals[i];
      vals[i] = orig + epsilon;
      const double up = checked(loss(probe));
      vals[i] = orig - epsilon;
      const double down = checked(loss(probe));
      vals[i] = orig;
      out[i] = (up - down) / (2.0 * epsilon);
    }
  }
  return grad;
}

std::vector<std::uint64_t> seed_range(std::size_t count) {
  std::vector<std::uint64_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = i + 1;
  return out;
}

GradReport check_cell(Arch arch, std::size_t hidden, std::size_t input, std::size_t steps,
                      const std::vector<std::uint64_t>& seeds, const GradCheckOptions& options) {
  if (hidden == 0 || input == 0 || steps == 0) {
    throw std::invalid_argument("check_cell: hidden, input and steps must be >= 1");
  }
  GradReport report;
  report.arch = arch;
  report.gate = options.gate;
  report.seeds = seeds.size();
  const CellShape shape{arch, hidden, input, options.gate};

  for (std::uint64_t seed : seeds) {
    std::mt19937_64 rng(seed);
    Instance inst{init_cell_params(shape, rng), options.batch, steps};
    for (auto& slot : inst.params.arrays) {
      if (slot.kind == SlotKind::bias) fill_uniform(slot.value, -0.5, 0.5, rng);
    }
    std::vector<Matrix> seq(steps, Matrix(options.batch, input));
    for (auto& x : seq) fill_uniform(x, -1.0, 1.0, rng);
    CellState s0 = CellState::zeros(shape, options.batch);
    fill_uniform(s0.h, -0.5, 0.5, rng);
    if (s0.has_memory()) fill_uniform(s0.c, -0.5, 0.5, rng);

    // Analytic side.
    const auto fwd = forward_sequence(inst.params, seq, s0);
    std::vector<Matrix> d_h(steps, Matrix(options.batch, hidden, 1.0));
    const Matrix d_c_last = s0.has_memory() ? Matrix(options.batch, hidden, 1.0) : Matrix();
    const auto bwd = backward_sequence(inst.params, fwd.caches, d_h, d_c_last);

    ParamSet analytic = bwd.params;
    {
      Matrix dxs(steps * options.batch, input);
      for (std::size_t t = 0; t < steps; ++t) {
        std::copy(bwd.d_x[t].flat().begin(), bwd.d_x[t].flat().end(),
                  dxs.flat().begin() + static_cast<std::ptrdiff_t>(t * bwd.d_x[t].size()));
      }
      analytic.add("input.x", SlotKind::weight, std::move(dxs));
      analytic.add("input.h0", SlotKind::weight, bwd.d_h0);
      if (s0.has_memory()) analytic.add("input.c0", SlotKind::weight, bwd.d_c0);
    }

    // Numeric side, with the knee exclusion for hard gates.
    ParamSet probe = pack(inst, seq, s0);
    const Probe base = rollout(inst, probe);
    std::vector<std::size_t> near_knee;
    if (options.gate == GateFn::hard) {
      for (std::size_t i = 0; i < base.gate_inputs.size(); ++i) {
        if (std::abs(std::abs(base.gate_inputs[i]) - kHardSigmoidKnee) < options.knee_margin) {
          near_knee.push_back(i);
        }
      }
    }
    auto touches_knee = [&](const Probe& p) {
      return std::any_of(near_knee.begin(), near_knee.end(), [&](std::size_t i) {
        return p.gate_inputs[i] != base.gate_inputs[i];
      });
    };

    if (report.slots.empty()) {
      for (const auto& slot : analytic) report.slots.push_back(SlotReport{slot.name});
    }
    for (std::size_t s = 0; s < probe.size(); ++s) {
      SlotReport& rep = report.slots[s];
      auto vals = probe.value(s).flat();
      const auto an = analytic.value(s).flat();
      const std::size_t cols = probe.value(s).cols();
      for (std::size_t i = 0; i < vals.size(); ++i) {
        const double orig = vals[i];
        vals[i] = orig + options.epsilon;
        const Probe up = rollout(inst, probe);
        vals[i] = orig - options.epsilon;
        const Probe down = rollout(inst, probe);
        vals[i] = orig;
        checked(up.loss);
        checked(down.loss);
        if (!near_knee.empty() && (touches_knee(up) || touches_knee(down))) {
          ++rep.excluded;
          continue;
        }
        const double num = (up.loss - down.loss) / (2.0 * options.epsilon);
        const double abs_err = std::abs(an[i] - num);
        const double scale = std::max(std::abs(an[i]), std::abs(num));
        const bool meaningful = abs_err > options.abs_tol || scale >= options.rel_floor;
        const double rel_err = meaningful && scale > 0.0 ? abs_err / scale : 0.0;
        ++rep.compared;
        const bool worse = rel_err > rep.max_rel_err ||
                           (rep.max_rel_err == 0.0 && rel_err == 0.0 && abs_err > rep.max_abs_err);
        if (worse) {
          rep.worst_row = i / cols;
          rep.worst_col = i % cols;
        }
        rep.max_abs_err = std::max(rep.max_abs_err, abs_err);
        rep.max_rel_err = std::max(rep.max_rel_err, rel_err);
        if (abs_err > options.abs_tol && rel_err > options.rel_tol) rep.pass = false;
      }
    }
  }
  report.pass = std::all_of(report.slots.begin(), report.slots.end(),
                            [](const SlotReport& s) { return s.pass; });
  return report;
}

std::string format_report(const GradReport& report) {
  std::ostringstream os;
  os << "gradient check: " << display_name(report.arch) << " (" << to_string(report.gate)
     << " gate, " << report.seeds << " seeds)\n";
  os << std::left << std::setw(12) << "slot" << std::right << std::setw(13) << "max_abs_err"
     << std::setw(13) << "max_rel_err" << std::setw(10) << "worst" << std::setw(9) << "checked"
     << std::setw(9) << "skipped" << "  status\n";
  for (const auto& s : report.slots) {
    std::ostringstream worst;
    worst << '(' << s.worst_row << ',' << s.worst_col << ')';
    os << std::left << std::setw(12) << s.name << std::right << std::scientific
       << std::setprecision(2) << std::setw(13) << s.max_abs_err << std::setw(13)
       << s.max_rel_err << std::setw(10) << worst.str() << std::setw(9) << s.compared
       << std::setw(9) << s.excluded << "  " << (s.pass ? "ok" : "FAIL") << '\n';
  }
  os << (report.pass ? "PASS" : "FAIL") << '\n';
  return os.str();
}

}  // namespace rnnlab
