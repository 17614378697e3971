#include <doctest.h>

#include <cmath>
#include <random>

#include "rnnlab/errors.hpp"
#include "rnnlab/gradcheck.hpp"
#include "rnnlab/head.hpp"
#include "rnnlab/optimizer.hpp"
#include "test_util.hpp"

using namespace rnnlab;

namespace {

DenseParams dense(const Matrix& w, const Matrix& b) {
  ParamSet p;
  p.add("W_out", SlotKind::weight, w);
  p.add("b_out", SlotKind::bias, b);
  return dense_from_arrays(std::move(p));
}

ParamSet scalar_set(double value) {
  ParamSet p;
  p.add("theta", SlotKind::weight, Matrix(1, 1, value));
  return p;
}

}  // namespace

TEST_SUITE("head") {

TEST_CASE("dense forward examples") {
  CHECK(dense_forward(zero_dense_params(3, 2), Vector{4, 5}) == Vector{0, 0, 0});
  CHECK(dense_forward(dense(Matrix::identity(2), Matrix(2, 1)), Vector{3, -4}) == Vector{3, -4});
  CHECK(dense_forward(dense(Matrix::from_rows({{1, 0}, {0, 2}}), Matrix::from_rows({{1}, {1}})),
                      Vector{3, 4}) == Vector{4, 9});
  CHECK_THROWS_AS((void)dense_forward(zero_dense_params(3, 2), Vector{1, 2, 3}), ShapeError);
  CHECK_THROWS_AS((void)zero_dense_params(1, 2), std::invalid_argument);
}

TEST_CASE("softmax cross-entropy examples") {
  const auto uniform = softmax_xent(Vector{0.3, 0.3, 0.3, 0.3}, 1);
  CHECK(uniform.loss == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(uniform.d_logits[0] == doctest::Approx(0.25));
  CHECK(uniform.d_logits[1] == doctest::Approx(-0.75));

  CHECK(softmax_xent(Vector{1e3, 0}, 0).loss <= 1e-300);
  CHECK(softmax_xent(Vector{1, 2, 3}, 2).loss ==
        doctest::Approx(0.407605964444380304).epsilon(1e-15));
  CHECK_THROWS_AS((void)softmax_xent(Vector{1, 2}, 2), std::out_of_range);
}

TEST_CASE("property: softmax shift invariance and zero-sum gradient") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-5.0, 5.0), shift(-100.0, 100.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + rng() % 9;
    Vector logits(k), shifted(k);
    const double c = shift(rng);
    for (std::size_t i = 0; i < k; ++i) {
      logits[i] = u(rng);
      shifted[i] = logits[i] + c;
    }
    const std::size_t label = rng() % k;
    const auto a = softmax_xent(logits, label);
    const auto b = softmax_xent(shifted, label);
    CHECK(std::abs(a.loss - b.loss) <= 1e-12);
    CHECK(a.loss >= 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      CHECK(std::abs(a.d_logits[i] - b.d_logits[i]) <= 1e-12);
      sum += a.d_logits[i];
    }
    CHECK(std::abs(sum) <= 1e-12);
  }
}

TEST_CASE("softmax gradient matches finite differences") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 + rng() % 6, label = rng() % k;
    Vector logits(k);
    for (double& v : logits) v = u(rng);
    const auto res = softmax_xent(logits, label);
    for (std::size_t i = 0; i < k; ++i) {
      Vector up = logits, down = logits;
      up[i] += 1e-5;
      down[i] -= 1e-5;
      const double num = (softmax_xent(up, label).loss - softmax_xent(down, label).loss) / 2e-5;
      CHECK(std::abs(num - res.d_logits[i]) <= 1e-7);
    }
  }
}

TEST_CASE("batched loss is the mean of per-row losses") {
  std::mt19937_64 rng(33);
  const Matrix logits = testutil::random_matrix(5, 4, rng, -3, 3);
  const std::vector<int> labels{0, 3, 2, 2, 1};
  const auto batch = softmax_xent(logits, labels);
  double mean = 0.0;
  for (std::size_t r = 0; r < 5; ++r) {
    const auto one = softmax_xent(logits.row_copy(r), static_cast<std::size_t>(labels[r]));
    mean += one.loss / 5.0;
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(batch.d_logits(r, j) == doctest::Approx(one.d_logits[j] / 5.0).epsilon(1e-14));
    }
  }
  CHECK(batch.loss == doctest::Approx(mean).epsilon(1e-14));
}

TEST_CASE("dense backward matches finite differences") {
  std::mt19937_64 rng(34);
  DenseParams p = init_dense_params(3, 4, rng);
  for (double& v : p.arrays.value(1).flat()) v = 0.1;
  const Matrix h = testutil::random_matrix(2, 4, rng);
  const std::vector<int> labels{2, 0};
  const auto xent = softmax_xent(dense_forward(p, h), labels);
  const auto back = dense_backward(p, h, xent.d_logits);
  const LossFn loss = [&](const ParamSet& arrays) {
    return softmax_xent(dense_forward(dense_from_arrays(arrays), h), labels).loss;
  };
  const ParamSet num = finite_diff(loss, p.arrays, 1e-5);
  for (std::size_t s = 0; s < num.size(); ++s) {
    for (std::size_t i = 0; i < num.value(s).size(); ++i) {
      CHECK(std::abs(num.value(s).flat()[i] - back.grads.value(s).flat()[i]) <= 1e-7);
    }
  }
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t j = 0; j < 4; ++j) {
      Matrix up = h, down = h;
      up(r, j) += 1e-5;
      down(r, j) -= 1e-5;
      const double d = (softmax_xent(dense_forward(p, up), labels).loss -
                        softmax_xent(dense_forward(p, down), labels).loss) / 2e-5;
      CHECK(std::abs(d - back.d_h(r, j)) <= 1e-7);
    }
  }
}

TEST_CASE("argmax ties resolve to the lowest index") {
  CHECK(argmax_rows(Matrix::from_rows({{1, 3, 3}, {2, 2, 0}})) == std::vector<int>{1, 0});
}

}  // TEST_SUITE

TEST_SUITE("optimizer") {

TEST_CASE("first Adam step on a unit gradient") {
  ParamSet theta = scalar_set(0.0);
  AdamState st = make_adam_state(theta);
  adam_step(theta, scalar_set(1.0), st);
  CHECK(theta.value(0)(0, 0) == doctest::Approx(-0.001 / (1.0 + 1e-7)).epsilon(1e-15));
  CHECK(theta.value(0)(0, 0) == doctest::Approx(-0.0009999999).epsilon(1e-9));
  CHECK(st.t == 1);
}

TEST_CASE("first Adam step moves by lr times the sign") {
  std::mt19937_64 rng(40);
  ParamSet p;
  p.add("w", SlotKind::weight, testutil::random_matrix(4, 5, rng));
  ParamSet g = p.zeros_like();
  for (double& v : g.value(0).flat()) v = testutil::random_matrix(1, 1, rng, -10, 10)(0, 0);
  const ParamSet before = p;
  AdamState st = make_adam_state(p);
  adam_step(p, g, st);
  for (std::size_t i = 0; i < p.value(0).size(); ++i) {
    const double delta = p.value(0).flat()[i] - before.value(0).flat()[i];
    const double gi = g.value(0).flat()[i];
    CHECK(std::abs(std::abs(delta) - 1e-3) <= 1e-3 * 1e-7 / std::abs(gi) + 1e-15);
    CHECK((delta < 0) == (gi > 0));
  }
}

TEST_CASE("property: zero gradient is a fixpoint") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    ParamSet p;
    p.add("a", SlotKind::weight, testutil::random_matrix(1 + rng() % 5, 1 + rng() % 5, rng));
    p.add("b", SlotKind::bias, testutil::random_matrix(1 + rng() % 5, 1, rng));
    const ParamSet before = p;
    AdamState st = make_adam_state(p);
    for (int s = 0; s < 5; ++s) adam_step(p, p.zeros_like(), st);
    CHECK(p == before);
    for (const auto& slot : st.m) for (double v : slot.value.flat()) CHECK(v == 0.0);
    for (const auto& slot : st.v) for (double v : slot.value.flat()) CHECK(v == 0.0);
  }
}

TEST_CASE("property: second moments stay non-negative and runs are bit-identical") {
  std::mt19937_64 rng(42);
  ParamSet p1;
  p1.add("w", SlotKind::weight, testutil::random_matrix(3, 3, rng));
  ParamSet p2 = p1;
  AdamState s1 = make_adam_state(p1), s2 = make_adam_state(p2);
  for (int step = 0; step < 100; ++step) {
    ParamSet g = p1.zeros_like();
    for (double& v : g.value(0).flat()) v = testutil::random_matrix(1, 1, rng, -5, 5)(0, 0);
    adam_step(p1, g, s1);
    adam_step(p2, g, s2);
    for (double v : s1.v.value(0).flat()) CHECK(v >= 0.0);
  }
  CHECK(p1 == p2);
  CHECK(s1.m == s2.m);
}

TEST_CASE("Adam converges on a quadratic") {
  ParamSet theta = scalar_set(1.0);
  AdamState st = make_adam_state(theta);
  int steps = 0;
  while (std::abs(theta.value(0)(0, 0)) >= 1e-3 && steps < 5000) {
    adam_step(theta, scalar_set(theta.value(0)(0, 0)), st);
    ++steps;
  }
  CHECK(std::abs(theta.value(0)(0, 0)) < 1e-3);
  CHECK(steps < 5000);
}

TEST_CASE("non-finite gradient names the array and leaves params untouched") {
  ParamSet p;
  p.add("W_fx", SlotKind::weight, Matrix(2, 2, 1.0));
  p.add("b_f", SlotKind::bias, Matrix(2, 1, 1.0));
  ParamSet g = p.zeros_like();
  g.value(1)(1, 0) = std::nan("");
  const ParamSet before = p;
  AdamState st = make_adam_state(p);
  CHECK_THROWS_WITH_AS(adam_step(p, g, st), doctest::Contains("b_f"), NumericError);
  CHECK(p == before);
  CHECK(st.t == 0);
}

TEST_CASE("invalid hyperparameters are rejected") {
  CHECK_THROWS_AS((void)make_adam_state(ParamSet{}, AdamConfig{0.0, 0.9, 0.999, 1e-7}), std::invalid_argument);
  CHECK_THROWS_AS((void)make_adam_state(ParamSet{}, AdamConfig{1e-3, 1.0, 0.999, 1e-7}), std::invalid_argument);
  CHECK_THROWS_AS((void)make_adam_state(ParamSet{}, AdamConfig{1e-3, 0.9, 0.999, 0.0}), std::invalid_argument);
}

TEST_CASE("global-norm clipping") {
  ParamSet a = scalar_set(3.0), b = scalar_set(4.0);
  ParamSet* sets[] = {&a, &b};
  const ParamSet* csets[] = {&a, &b};
  CHECK(global_norm(csets) == doctest::Approx(5.0));
  CHECK(clip_global_norm(sets, 10.0) == doctest::Approx(5.0));
  CHECK(a.value(0)(0, 0) == 3.0);
  clip_global_norm(sets, 1.0);
  CHECK(global_norm(csets) == doctest::Approx(1.0));
  CHECK(a.value(0)(0, 0) == doctest::Approx(0.6));
}

}  // TEST_SUITE

TEST_SUITE("gradcheck") {

TEST_CASE("finite differences of simple losses") {
  ParamSet p;
  p.add("theta", SlotKind::weight, Matrix::from_rows({{1.0, 2.0}}));
  const ParamSet zero = finite_diff([](const ParamSet&) { return 3.0; }, p, 1e-5);
  for (double v : zero.value(0).flat()) CHECK(std::abs(v) <= 1e-12);

  const ParamSet quad = finite_diff(
      [](const ParamSet& q) {
        double s = 0.0;
        for (double v : q.value(0).flat()) s += v * v;
        return s;
      },
      p, 1e-5);
  CHECK(quad.value(0)(0, 0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(quad.value(0)(0, 1) == doctest::Approx(4.0).epsilon(1e-9));
  CHECK_THROWS_AS((void)finite_diff([](const ParamSet&) { return std::nan(""); }, p, 1e-5),
                  NumericError);
}

TEST_CASE("scalar litelstm rollout agrees with BPTT") {
  const auto rep = check_cell(Arch::litelstm, 1, 1, 3, {11});
  CHECK(rep.pass);
  for (const auto& s : rep.slots) CHECK(s.max_rel_err <= 1e-4);
}

TEST_CASE("smallest rnn instance passes") {
  CHECK(check_cell(Arch::rnn, 1, 1, 1, {1}).pass);
}

TEST_CASE("every architecture passes over twenty seeds") {
  for (Arch a : kAllArchs) {
    const auto rep = check_cell(a, 4, 3, 5, seed_range(20));
    CAPTURE(format_report(rep));
    CHECK(rep.pass);
    CHECK(rep.slots.size() == slot_names(a).size() + (has_memory_cell(a) ? 3 : 2));
  }
}

TEST_CASE("pass status is stable across epsilon") {
  for (double eps : {1e-4, 1e-5, 1e-6}) {
    GradCheckOptions opts;
    opts.epsilon = eps;
    for (Arch a : kAllArchs) {
      CAPTURE(eps);
      CHECK(check_cell(a, 3, 2, 4, seed_range(5), opts).pass);
    }
  }
}

TEST_CASE("zero tolerances fail and the report says so") {
  GradCheckOptions opts;
  opts.abs_tol = 0.0;
  opts.rel_tol = 0.0;
  const auto rep = check_cell(Arch::lstm, 3, 2, 3, {1}, opts);
  CHECK(!rep.pass);
  CHECK(format_report(rep).find("FAIL") != std::string::npos);
}

}  // TEST_SUITE
