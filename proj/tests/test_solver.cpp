#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "star/linalg.hpp"
#include "star/solver.hpp"

using namespace star;
using star::test::max_abs_diff;
using star::test::random_cube;
using star::test::random_matrix;
using star::test::random_orthonormal;

namespace {

// y = G ×₃ A with random factors: exactly rank `r` along mode 3.
Cube low_rank_cube(const Dims& d, std::size_t r, std::uint64_t seed) {
  return mode_product(random_cube({d.n1, d.n2, r}, seed), random_orthonormal(d.n3, r, seed + 1), 3);
}

// A state whose B, L, P are filled with random values.
RciState busy_state(const Cube& y, std::size_t rank, const Dims& patch, const Index3& stride,
                    Model model, std::uint64_t seed) {
  RciState st = init_state(y, rank, patch, stride, model);
  for (std::size_t i = 0; i < st.b.size(); ++i) {
    st.b[i] = random_cube(patch, seed + 3 * i, -0.5, 0.5);
    st.l_aux[i] = random_cube(patch, seed + 3 * i + 1, -0.5, 0.5);
    st.p[i] = random_cube(patch, seed + 3 * i + 2, -0.05, 0.05);
  }
  if (st.s) *st.s = random_cube(y.dims(), seed + 999, -0.1, 0.1);
  return st;
}

StageParams params_of(double lambda, double gamma1, double gamma2, double beta, double mu,
                      double l) {
  StageParams p;
  p.lambda = lambda, p.gamma1 = gamma1, p.gamma2 = gamma2, p.beta = beta, p.mu = mu;
  p.lipschitz = l;
  return p;
}

double trace_at_b(const Matrix& a, const Matrix& cross) {
  double t = 0.0;
  for (std::size_t c = 0; c < a.cols(); ++c)
    for (std::size_t r = 0; r < a.rows(); ++r) t += a(r, c) * cross(r, c);
  return t;
}

}  // namespace

// ---------------------------------------------------------------- parameters

TEST_CASE("default schedule") {
  Schedule s = default_schedule(Model::Star);
  CHECK(s.stages.size() == 9);
  for (const StageParams& p : s.stages) {
    CHECK(p.lambda == 0.02);
    CHECK(p.gamma1 == 0.02);
    CHECK(p.gamma2 == 0.02);
    CHECK(p.beta == 0.02);
    CHECK(p.mu == 0.02);
    CHECK(p.lipschitz == 0.02);
    CHECK_FALSE(p.dictionaries.has_value());
  }
  CHECK(default_schedule(Model::StarS, 3).stages.size() == 3);
  CHECK_THROWS_AS(default_schedule(Model::Star, 0), ParamError);
}

TEST_CASE("parameter validation") {
  StageParams p;
  CHECK_NOTHROW(p.validate());
  p.beta = -1.0;
  CHECK_THROWS_AS(p.validate(), ParamError);
  p = StageParams{};
  p.lipschitz = 0.0;
  CHECK_THROWS_AS(p.validate(), ParamError);
  p = StageParams{};
  p.gamma1 = -0.1;
  CHECK_THROWS_AS(p.validate(), ParamError);
  p = StageParams{};
  p.lambda = NAN;
  CHECK_THROWS_AS(p.validate(), ParamError);
  p = StageParams{};
  p.lambda = p.gamma1 = p.gamma2 = p.mu = 0.0;  // zero weights switch terms off
  CHECK_NOTHROW(p.validate());
  CHECK_THROWS_AS(Schedule{}.validate(), ParamError);
}

TEST_CASE("model and mode names") {
  CHECK(parse_model("star") == Model::Star);
  CHECK(parse_model("star_s") == Model::StarS);
  CHECK(parse_model("star-s") == Model::StarS);
  CHECK(to_string(Model::StarS) == "star_s");
  CHECK(parse_run_mode("unrolled") == RunMode::Unrolled);
  CHECK_THROWS_AS(parse_model("rpca"), ParamError);
  CHECK_THROWS_AS(parse_run_mode("fast"), ParamError);
}

// ---------------------------------------------------------------- init_state

TEST_CASE("init_state recovers an exactly low-rank cube") {
  Cube y = low_rank_cube({8, 7, 12}, 4, 1);
  RciState st = init_state(y, 4, {4, 4, 4}, {3, 3, 3}, Model::Star);
  CHECK(fro_norm(sub(mode_product(st.g, st.a, 3), y)) / fro_norm(y) < 1e-8);
  CHECK(orthonormality_defect(st.a) < 1e-10);
  CHECK(st.g.dims() == Dims{8, 7, 4});
  CHECK(st.b.size() == st.layout.count());
  CHECK(st.l_aux.size() == st.b.size());
  CHECK(st.p.size() == st.b.size());
  for (const Cube& b : st.b) CHECK(fro_norm(b) == 0.0);
  CHECK_FALSE(st.s.has_value());
}

TEST_CASE("init_state with full rank reconstructs any cube") {
  Cube y = random_cube({5, 6, 7}, 2);
  RciState st = init_state(y, 7, {3, 3, 3}, {2, 2, 2}, Model::StarS);
  CHECK(max_abs_diff(mode_product(st.g, st.a, 3), y) < 1e-10);
  REQUIRE(st.s.has_value());
  CHECK(fro_norm(*st.s) == 0.0);
}

TEST_CASE("init_state edge cases") {
  RciState st = init_state(Cube({4, 4, 5}), 2, {2, 2, 2}, {2, 2, 2}, Model::Star);
  CHECK(fro_norm(st.g) == 0.0);
  CHECK(orthonormality_defect(st.a) < 1e-10);
  CHECK_THROWS_AS(init_state(Cube({4, 4, 5}), 6, {2, 2, 2}, {2, 2, 2}, Model::Star), ParamError);
  CHECK_THROWS_AS(init_state(Cube({4, 4, 5}), 0, {2, 2, 2}, {2, 2, 2}, Model::Star), ParamError);
  Cube bad({3, 3, 3});
  bad(1, 1, 1) = NAN;
  CHECK_THROWS_AS(init_state(bad, 2, {2, 2, 2}, {1, 1, 1}, Model::Star), NumericError);
}

// ---------------------------------------------------------------- G-block

TEST_CASE("g_update special cases") {
  Cube y = random_cube({9, 8, 6}, 3);
  DictionarySet d = DictionarySet::dct({4, 4, 3});
  RciState st = busy_state(y, 3, {4, 4, 3}, {3, 3, 2}, Model::Star, 10);

  StageParams p = params_of(0.0, 0.1, 0.1, 1.0, 0.1, 1.0);
  CHECK(max_abs_diff(g_update(st, y, p, d), mode_product_transposed(y, st.a, 3)) < 1e-14);

  RciState zero = init_state(y, 3, {4, 4, 3}, {3, 3, 2}, Model::Star);
  p.lambda = 1.0;
  Cube expect = hadamard(coverage_weights(zero.layout, 1.0).w, mode_product_transposed(y, zero.a, 3));
  CHECK(max_abs_diff(g_update(zero, y, p, d), expect) < 1e-14);
}

TEST_CASE("g_update is the exact minimiser of its subproblem") {
  for (Model model : {Model::Star, Model::StarS}) {
    Cube y = random_cube({10, 9, 6}, 4);
    DictionarySet d = DictionarySet::dct({4, 4, 3});
    RciState st = busy_state(y, 3, {4, 4, 3}, {3, 3, 2}, model, 20);
    StageParams p = params_of(0.7, 0.1, 0.1, 1.0, 0.1, 1.0);
    Cube g = g_update(st, y, p, d);
    const double fg = g_subproblem_objective(st, y, p, d, g);
    std::mt19937_64 rng(6);
    int worse = 0;
    for (int t = 0; t < 1000; ++t) {
      Cube r = random_cube(g.dims(), rng());
      Cube q = axpy(g, 1e-3 / fro_norm(r), r);
      if (g_subproblem_objective(st, y, p, d, q) < fg) ++worse;
    }
    CHECK(worse == 0);
  }
}

// ---------------------------------------------------------------- B-block

TEST_CASE("b_update scalar closed form") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.1, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double lambda = pos(rng), beta = pos(rng), gamma1 = 0.5 * pos(rng);
    const double g = u(rng), l = u(rng), pm = u(rng);
    RciState st = init_state(Cube({1, 1, 1}, 0.5), 1, {1, 1, 1}, {1, 1, 1}, Model::Star);
    st.g = Cube({1, 1, 1}, g);
    st.b = {Cube({1, 1, 1}, u(rng))};
    st.l_aux = {Cube({1, 1, 1}, l)};
    st.p = {Cube({1, 1, 1}, pm)};
    StageParams p = params_of(lambda, gamma1, 0.0, beta, 0.0, lambda + beta);
    const double expect = soft_threshold((lambda * g + beta * l + pm) / (lambda + beta),
                                         lambda * gamma1 / (lambda + beta));
    auto out = b_update(st, p, DictionarySet::dct({1, 1, 1}), 50);
    CHECK(std::abs(out[0](0, 0, 0) - expect) < 1e-6);
  }
}

TEST_CASE("b_update fixed point and full shrinkage") {
  Cube y = random_cube({8, 8, 5}, 5);
  DictionarySet d = DictionarySet::dct({4, 4, 3});
  RciState st = busy_state(y, 3, {4, 4, 3}, {4, 4, 3}, Model::Star, 30);
  StageParams p = params_of(0.5, 0.0, 0.1, 0.8, 0.1, 2.0);
  // Choose P so the gradient vanishes at the current B: P = λTᵀ(TB − RG) + β(B − L).
  auto rg = extract(st.g, st.layout);
  for (std::size_t i = 0; i < st.b.size(); ++i) {
    Cube fit = sub(tucker_apply(st.b[i], d), rg[i]);
    st.p[i] = axpy(scale(tucker_apply(fit, d, true), p.lambda), p.beta, sub(st.b[i], st.l_aux[i]));
  }
  auto same = b_update(st, p, d, 3);
  for (std::size_t i = 0; i < st.b.size(); ++i) CHECK(max_abs_diff(same[i], st.b[i]) < 1e-12);

  p.gamma1 = 1e6;
  for (const Cube& b : b_update(st, p, d, 1)) CHECK(fro_norm(b) == 0.0);
  CHECK_THROWS_AS(b_update(st, params_of(0.5, 0.1, 0.1, 0.8, 0.1, 0.0), d, 1), ParamError);
  CHECK_THROWS_AS(b_update(st, p, d, 0), ParamError);
}

TEST_CASE("b_update never increases its subproblem objective") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Cube y = random_cube({10, 10, 6}, seed);
    DictionarySet d = DictionarySet::dct({5, 5, 3});
    RciState st = busy_state(y, 3, {5, 5, 3}, {3, 3, 2}, Model::Star, 40 + seed);
    StageParams p = params_of(0.3 + seed, 0.05, 0.1, 0.5, 0.1, 1.0);
    p.lipschitz = classical_lipschitz(p, d);
    CHECK(p.lipschitz == doctest::Approx(kSpectralSafety * (p.lambda + p.beta)).epsilon(1e-3));
    for (int inner : {1, 5}) {
      auto out = b_update(st, p, d, inner);
      for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(b_subproblem_objective(st, p, d, i, out[i]) <=
              b_subproblem_objective(st, p, d, i, st.b[i]) + 1e-12);
      }
    }
  }
}

TEST_CASE("b_update is invariant to thread count") {
  Cube y = random_cube({12, 12, 6}, 8);
  DictionarySet d = DictionarySet::dct({5, 5, 3});
  RciState st = busy_state(y, 3, {5, 5, 3}, {3, 3, 2}, Model::Star, 50);
  StageParams p = params_of(0.5, 0.05, 0.1, 0.5, 0.1, 1.2);
  auto a = b_update(st, p, d, 2, 1);
  auto b = b_update(st, p, d, 2, 4);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

// ---------------------------------------------------------------- L-block

TEST_CASE("l_update cases") {
  Cube y = random_cube({8, 8, 5}, 9);
  RciState st = busy_state(y, 3, {4, 4, 3}, {4, 4, 3}, Model::Star, 60);
  StageParams p = params_of(0.5, 0.1, 0.0, 0.8, 0.1, 1.0);
  auto l0 = l_update(st, p);
  for (std::size_t i = 0; i < st.b.size(); ++i) {
    CHECK(l0[i] == axpy(st.b[i], -1.0 / p.beta, st.p[i]));
  }
  RciState flat = st;
  for (std::size_t i = 0; i < flat.b.size(); ++i) flat.p[i] = scale(flat.b[i], p.beta);
  for (const Cube& l : l_update(flat, params_of(0.5, 0.1, 0.3, 0.8, 0.1, 1.0))) {
    CHECK(fro_norm(l) < 1e-15);
  }
  p.gamma2 = 1e6;
  for (const Cube& l : l_update(st, p)) CHECK(fro_norm(l) < 1e-12);
  p.beta = 0.0;
  CHECK_THROWS_AS(l_update(st, p), ParamError);
}

// ---------------------------------------------------------------- A-block

TEST_CASE("a_update with cross-product I returns I") {
  Cube y = random_cube({6, 5, 3}, 10);
  RciState st = init_state(y, 3, {3, 3, 3}, {3, 3, 3}, Model::Star);
  // G = y ×₃ Iᵀ makes the cross-product the Gram matrix of y's bands, which
  // is symmetric positive definite: its polar factor is I.
  st.g = y;
  AUpdate au = a_update(st, y);
  CHECK_FALSE(au.degenerate);
  CHECK(max_abs_diff(au.a, Matrix::identity(3)) < 1e-10);
}

TEST_CASE("a_update in one dimension takes the sign of the correlation") {
  for (double sgn : {1.0, -1.0}) {
    Cube y = random_cube({4, 4, 1}, 11);
    RciState st = init_state(y, 1, {2, 2, 1}, {2, 2, 1}, Model::Star);
    st.g = scale(y, sgn * 0.3);
    AUpdate au = a_update(st, y);
    CHECK(au.a(0, 0) == doctest::Approx(sgn));
  }
}

TEST_CASE("a_update beats every sampled rotation") {
  for (std::uint64_t inst = 0; inst < 20; ++inst) {
    Cube y = random_cube({5, 4, 2}, 200 + inst);
    RciState st = init_state(y, 2, {2, 2, 2}, {2, 2, 2}, Model::Star);
    st.g = random_cube({5, 4, 2}, 300 + inst);
    Matrix cross = unfold(y, 3) * unfold(st.g, 3).transpose();
    AUpdate au = a_update(st, y);
    CHECK(orthonormality_defect(au.a) < 1e-8);
    const double best = trace_at_b(au.a, cross);
    for (int n = 0; n < 360; ++n) {
      const double th = 2.0 * std::numbers::pi * n / 360.0;
      Matrix r = Matrix::from_rows({{std::cos(th), -std::sin(th)}, {std::sin(th), std::cos(th)}});
      CHECK(best >= trace_at_b(r, cross) - 1e-12);
    }
  }
}

TEST_CASE("a_update keeps the previous basis on a zero cross-product") {
  Cube y = random_cube({5, 4, 6}, 12);
  RciState st = init_state(y, 3, {3, 3, 3}, {2, 2, 2}, Model::Star);
  st.g = Cube(st.g.dims());
  AUpdate au = a_update(st, y);
  CHECK(au.degenerate);
  CHECK(au.a == st.a);
}

TEST_CASE("a_update in STAR-S fits the residual y - S") {
  Cube y = random_cube({5, 4, 3}, 13);
  RciState st = init_state(y, 3, {3, 3, 3}, {2, 2, 2}, Model::StarS);
  *st.s = random_cube(y.dims(), 14);
  st.g = sub(y, *st.s);
  CHECK(max_abs_diff(a_update(st, y, true).a, Matrix::identity(3)) < 1e-10);
  CHECK(max_abs_diff(a_update(st, y, false).a, Matrix::identity(3)) > 1e-6);
}

// ---------------------------------------------------------------- P- and S-blocks

TEST_CASE("p_update arithmetic") {
  Cube y = random_cube({6, 6, 4}, 15);
  RciState st = busy_state(y, 2, {3, 3, 2}, {3, 3, 2}, Model::Star, 70);
  StageParams p = params_of(0.5, 0.1, 0.1, 2.0, 0.1, 1.0);
  RciState same = st;
  same.l_aux = same.b;
  auto unchanged = p_update(same, p);
  for (std::size_t i = 0; i < st.p.size(); ++i) CHECK(unchanged[i] == st.p[i]);

  Cube c = random_cube({3, 3, 2}, 71);
  RciState one = st;
  for (std::size_t i = 0; i < one.p.size(); ++i) {
    one.p[i] = Cube({3, 3, 2});
    one.l_aux[i] = add(one.b[i], c);
  }
  StageParams unit = p;
  unit.beta = 1.0;
  for (const Cube& q : p_update(one, unit)) CHECK(max_abs_diff(q, c) < 1e-15);
  one.p = p_update(one, p);
  one.p = p_update(one, p);
  for (const Cube& q : one.p) CHECK(max_abs_diff(q, scale(c, 4.0)) < 1e-14);
}

TEST_CASE("s_update cases") {
  Cube y = low_rank_cube({6, 5, 4}, 2, 16);
  RciState st = init_state(y, 2, {3, 3, 2}, {3, 3, 2}, Model::StarS);
  StageParams p = params_of(0.5, 0.1, 0.1, 1.0, 0.1, 1.0);
  CHECK(fro_norm(s_update(st, y, p)) < 1e-12);

  Cube noisy = random_cube(y.dims(), 17);
  p.mu = 0.0;
  CHECK(s_update(st, noisy, p) == sub(noisy, mode_product(st.g, st.a, 3)));

  p.mu = 0.1;
  Cube spiked = y;
  spiked(2, 3, 1) += 0.75;
  Cube s = s_update(st, spiked, p);
  CHECK(s(2, 3, 1) == doctest::Approx(0.65));
  s(2, 3, 1) = 0.0;
  CHECK(fro_norm(s) < 1e-12);
  RciState plain = init_state(y, 2, {3, 3, 2}, {3, 3, 2}, Model::Star);
  CHECK_THROWS_AS(s_update(plain, y, p), ModeError);
}

// ---------------------------------------------------------------- objective

TEST_CASE("objective of the all-zero problem is zero") {
  Cube y({6, 6, 4});
  RciState st = init_state(y, 2, {3, 3, 2}, {3, 3, 2}, Model::StarS);
  CHECK(objective_value(st, y, StageParams{}, DictionarySet::dct({3, 3, 2})) == 0.0);
}

TEST_CASE("objective matches a direct evaluation") {
  Cube y = random_cube({7, 6, 4}, 18);
  DictionarySet d = DictionarySet::dct({3, 3, 2});
  RciState st = busy_state(y, 2, {3, 3, 2}, {2, 3, 2}, Model::StarS, 80);
  StageParams p = params_of(0.4, 0.2, 0.3, 1.0, 0.15, 1.0);
  double expect = 0.0;
  Cube r = sub(sub(y, mode_product(st.g, st.a, 3)), *st.s);
  for (double v : r.data()) expect += 0.5 * v * v;
  for (double v : st.s->data()) expect += p.mu * std::abs(v);
  for (std::size_t i = 0; i < st.b.size(); ++i) {
    const Index3& o = st.layout.origins[i];
    Cube synth = tucker_apply(st.b[i], d);
    double fit = 0.0, l1 = 0.0;
    for (std::size_t k = 0; k < 2; ++k)
      for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t ii = 0; ii < 3; ++ii) {
          const double e = st.g(o[0] + ii, o[1] + j, o[2] + k) - synth(ii, j, k);
          fit += e * e;
          l1 += std::abs(st.b[i](ii, j, k));
        }
    expect += p.lambda * (0.5 * fit + p.gamma1 * l1 + p.gamma2 * tensor_nuclear_norm(st.l_aux[i]));
  }
  CHECK(objective_value(st, y, p, d) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("reconstruction_loss") {
  CHECK(reconstruction_loss(Cube({1, 1, 1}, 3.0), Cube({1, 1, 1}, 1.0)) == 4.0);
  Cube a = random_cube({4, 3, 2}, 19), b = random_cube({4, 3, 2}, 20);
  CHECK(reconstruction_loss(a, a) == 0.0);
  const double f = fro_norm(sub(a, b));
  CHECK(reconstruction_loss(a, b) == doctest::Approx(f * f).epsilon(1e-12));
  CHECK_THROWS_AS(reconstruction_loss(a, Cube({4, 3, 3})), DimsError);
}

// ---------------------------------------------------------------- driver

namespace {

SolverOptions small_opts() {
  SolverOptions o;
  o.rank = 3;
  o.patch = {4, 4, 3};
  o.stride = {3, 3, 2};
  return o;
}

}  // namespace

TEST_CASE("run: K = 1 with zero weights projects onto the initial subspace") {
  Cube y = random_cube({8, 8, 6}, 21, 0.0, 1.0);
  Schedule s = default_schedule(Model::Star, 1);
  s.stages[0].lambda = s.stages[0].gamma1 = s.stages[0].gamma2 = 0.0;
  SolverOptions o = small_opts();
  RunResult r = run(y, s, RunMode::Unrolled, o);
  RciState st0 = init_state(y, o.rank, o.patch, o.stride, Model::Star);
  Cube proj = mode_product(mode_product_transposed(y, st0.a, 3), st0.a, 3);
  CHECK(max_abs_diff(r.x, proj) < 1e-10);
  CHECK(r.report.iterations == 1);
}

TEST_CASE("run: unrolled determinism and thread invariance") {
  Cube y = random_cube({10, 9, 6}, 22, 0.0, 1.0);
  Schedule s = default_schedule(Model::StarS, 4);
  SolverOptions o = small_opts();
  o.threads = 1;
  RunResult a = run(y, s, RunMode::Unrolled, o);
  RunResult b = run(y, s, RunMode::Unrolled, o);
  o.threads = 4;
  RunResult c = run(y, s, RunMode::Unrolled, o);
  CHECK(a.x == b.x);
  CHECK(a.x == c.x);
  CHECK(a.report.residuals == c.report.residuals);
  CHECK(a.report.iterations == 4);
  CHECK(a.report.residuals.size() == 4);
  CHECK(a.report.objective.size() == 4);
}

TEST_CASE("run: unrolled constant schedule equals classical with inner_iters = 1") {
  for (Model model : {Model::Star, Model::StarS}) {
    Cube y = random_cube({10, 9, 6}, 23, 0.0, 1.0);
    SolverOptions o = small_opts();
    o.tol = 0.0;
    o.max_iters = 5;
    o.inner_iters = 1;
    StageParams p = params_of(0.3, 0.05, 0.1, 0.4, 0.1, 1.0);
    Schedule classical{model, {p}};
    RunResult rc = run(y, classical, RunMode::Classical, o);
    p.lipschitz = classical_lipschitz(p, DictionarySet::dct(o.patch), o.seed, o.power_iters);
    CHECK(p.lipschitz == rc.report.lipschitz);
    Schedule unrolled{model, std::vector<StageParams>(5, p)};
    RunResult ru = run(y, unrolled, RunMode::Unrolled, o);
    CHECK(rc.report.iterations == 5);
    CHECK(rc.x == ru.x);
    CHECK(rc.report.residuals == ru.report.residuals);
  }
}

TEST_CASE("run: classical stops on the residual rule or the cap") {
  Cube y = random_cube({10, 9, 6}, 24, 0.0, 1.0);
  Schedule s{Model::Star, {params_of(0.5, 0.02, 0.02, 1.0, 0.0, 1.0)}};
  SolverOptions o = small_opts();
  o.max_iters = 60;
  o.tol = 1e-3;
  RunResult r = run(y, s, RunMode::Classical, o);
  CHECK(r.report.residuals.size() == static_cast<std::size_t>(r.report.iterations));
  CHECK(r.report.lipschitz > 0.0);
  if (r.report.converged) {
    CHECK(r.report.iterations <= 60);
  } else {
    CHECK(r.report.iterations == 60);
  }
  o.tol = 0.0;
  o.max_iters = 3;
  RunResult capped = run(y, s, RunMode::Classical, o);
  CHECK(capped.report.iterations == 3);
  CHECK_FALSE(capped.report.converged);
}

TEST_CASE("run: full rank with zero regularisation reproduces the input") {
  Cube y = random_cube({8, 8, 4}, 25, 0.0, 1.0);
  Schedule s{Model::Star, {params_of(0.0, 0.0, 0.0, 1.0, 0.0, 1.0)}};
  SolverOptions o;
  o.rank = 4;
  o.patch = {4, 4, 4};
  o.stride = {4, 4, 4};
  o.max_iters = 3;
  RunResult r = run(y, s, RunMode::Classical, o);
  CHECK(max_abs_diff(r.x, y) < 1e-10);
}

TEST_CASE("run: error paths") {
  Cube y = random_cube({8, 8, 4}, 26, 0.0, 1.0);
  SolverOptions o = small_opts();
  Schedule s = default_schedule(Model::Star, 2);
  s.stages[1].beta = -1.0;
  CHECK_THROWS_AS(run(y, s, RunMode::Unrolled, o), ParamError);
  Cube bad = y;
  bad(0, 0, 0) = INFINITY;
  CHECK_THROWS_AS(run(bad, default_schedule(Model::Star, 1), RunMode::Unrolled, o), NumericError);
  // A tiny Lipschitz constant makes the unrolled ISTA step blow up.
  Schedule wild = default_schedule(Model::Star, 9);
  for (StageParams& p : wild.stages) p.lambda = 1e150, p.lipschitz = 1e-300;
  CHECK_THROWS_AS(run(y, wild, RunMode::Unrolled, o), NumericError);
  o.rank = 5;
  CHECK_THROWS_AS(run(y, default_schedule(Model::Star, 1), RunMode::Unrolled, o), ParamError);
  o = small_opts();
  Schedule odd = default_schedule(Model::Star, 1);
  odd.stages[0].dictionaries = DictionarySet::dct({3, 3, 3});
  CHECK_THROWS_AS(run(y, odd, RunMode::Unrolled, o), DimsError);
}

TEST_CASE("run: per-stage dictionary overrides are used") {
  Cube y = random_cube({8, 8, 4}, 27, 0.0, 1.0);
  SolverOptions o = small_opts();
  Schedule a = default_schedule(Model::Star, 2);
  Schedule b = a;
  b.stages[1].dictionaries = DictionarySet{Matrix::identity(4), Matrix::identity(4),
                                           Matrix::identity(3)};
  CHECK_FALSE(run(y, a, RunMode::Unrolled, o).x == run(y, b, RunMode::Unrolled, o).x);
  b.stages[1].dictionaries = DictionarySet::dct(o.patch);
  CHECK(run(y, a, RunMode::Unrolled, o).x == run(y, b, RunMode::Unrolled, o).x);
}
