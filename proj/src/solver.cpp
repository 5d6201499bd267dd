#include "star/solver.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "parallel.hpp"
#include "star/linalg.hpp"

namespace star {

namespace {

void require_finite(const Cube& c, const char* block, int stage) {
  if (!c.all_finite()) {
    throw NumericError("non-finite value in " + std::string(block) + "-block at stage " +
                       std::to_string(stage));
  }
}

void require_finite(const std::vector<Cube>& cs, const char* block, int stage) {
  for (const Cube& c : cs) require_finite(c, block, stage);
}

void check_dicts(const DictionarySet& d, const Dims& patch) {
  if (d.atom_dims() != patch || d.code_dims() != patch) {
    throw DimsError("dictionaries " + d.atom_dims().str() + " -> " + d.code_dims().str() +
                    " do not match patch " + patch.str());
  }
}

double l1_norm(const Cube& c) {
  double s = 0.0;
  for (double v : c.data()) s += std::abs(v);
  return s;
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool finite_pos(double v) { return std::isfinite(v) && v > 0.0; }

// Gradient of the smooth part of the B-subproblem at b:
//   λ Tᵀ(T b − RG) + β(b − L) − P.
Cube b_gradient(const Cube& b, const Cube& rg, const Cube& l_aux, const Cube& p,
                const StageParams& params, const DictionarySet& dicts) {
  Cube fit = sub(tucker_apply(b, dicts), rg);
  Cube grad = scale(tucker_apply(fit, dicts, /*adjoint=*/true), params.lambda);
  grad = axpy(grad, params.beta, sub(b, l_aux));
  return sub(grad, p);
}

}  // namespace

// ---------------------------------------------------------------- parameters

Model parse_model(std::string_view s) {
  if (s == "star") return Model::Star;
  if (s == "star_s" || s == "star-s") return Model::StarS;
  throw ParamError("unknown model '" + std::string(s) + "' (expected star or star_s)");
}

std::string_view to_string(Model m) { return m == Model::Star ? "star" : "star_s"; }

RunMode parse_run_mode(std::string_view s) {
  if (s == "classical") return RunMode::Classical;
  if (s == "unrolled") return RunMode::Unrolled;
  throw ParamError("unknown mode '" + std::string(s) + "' (expected classical or unrolled)");
}

std::string_view to_string(RunMode m) {
  return m == RunMode::Classical ? "classical" : "unrolled";
}

void StageParams::validate() const {
  auto fail = [](const char* name, double v, const char* rule) {
    throw ParamError(std::string(name) + " must be " + rule + ", got " + std::to_string(v));
  };
  if (!finite_nonneg(lambda)) fail("lambda", lambda, "finite and >= 0");
  if (!finite_nonneg(gamma1)) fail("gamma1", gamma1, "finite and >= 0");
  if (!finite_nonneg(gamma2)) fail("gamma2", gamma2, "finite and >= 0");
  if (!finite_nonneg(mu)) fail("mu", mu, "finite and >= 0");
  if (!finite_pos(beta)) fail("beta", beta, "finite and > 0");
  if (!finite_pos(lipschitz)) fail("lipschitz", lipschitz, "finite and > 0");
}

void Schedule::validate() const {
  if (stages.empty()) throw ParamError("schedule must contain at least one stage");
  for (const StageParams& s : stages) s.validate();
}

Schedule default_schedule(Model model, std::size_t stages) {
  if (stages == 0) throw ParamError("schedule must contain at least one stage");
  return Schedule{model, std::vector<StageParams>(stages)};
}

// ---------------------------------------------------------------- blocks

RciState init_state(const Cube& y, std::size_t rank, const Dims& patch, const Index3& stride,
                    Model model) {
  const Dims& d = y.dims();
  if (rank < 1 || rank > d.n3) {
    throw ParamError("rank must satisfy 1 <= rank <= n3 = " + std::to_string(d.n3) +
                     ", got " + std::to_string(rank));
  }
  if (rank > d.n1 * d.n2) {
    throw ParamError("rank exceeds the number of spatial pixels");
  }
  if (!y.all_finite()) throw NumericError("input cube contains non-finite samples");

  const SvdResult r = svd(unfold(y, 3));
  Matrix a(d.n3, rank);
  for (std::size_t c = 0; c < rank; ++c)
    for (std::size_t i = 0; i < d.n3; ++i) a(i, c) = r.u(i, c);

  RciState st;
  st.g = mode_product_transposed(y, a, 3);
  st.a = std::move(a);
  st.layout = plan_patches(st.g.dims(), patch, stride);
  st.coverage = coverage_counts(st.layout);
  st.weights = coverage_weights(st.coverage, 0.0);
  st.b.assign(st.layout.count(), Cube(patch));
  st.l_aux = st.b;
  st.p = st.b;
  if (model == Model::StarS) st.s = Cube(d);
  return st;
}

Cube g_update(const RciState& st, const Cube& y, const StageParams& params,
              const DictionarySet& dicts) {
  if (!(params.lambda >= 0.0)) throw ParamError("g_update: lambda must be >= 0");
  std::vector<Cube> synth;
  synth.reserve(st.b.size());
  for (const Cube& b : st.b) synth.push_back(tucker_apply(b, dicts));
  const Cube data = st.s ? sub(y, *st.s) : y;
  Cube rhs = axpy(mode_product_transposed(data, st.a, 3), params.lambda,
                  aggregate(synth, st.layout));
  if (st.weights.lambda == params.lambda) return hadamard(st.weights.w, rhs);
  return hadamard(coverage_weights(st.coverage, params.lambda).w, rhs);
}

std::vector<Cube> b_update(const RciState& st, const StageParams& params,
                           const DictionarySet& dicts, int inner_iters, unsigned threads) {
  if (!finite_pos(params.lipschitz)) throw ParamError("b_update: lipschitz must be > 0");
  if (inner_iters < 1) throw ParamError("b_update: inner_iters must be >= 1");
  const std::vector<Cube> rg = extract(st.g, st.layout);
  const double step = 1.0 / params.lipschitz;
  const double tau = params.lambda * params.gamma1 / params.lipschitz;
  std::vector<Cube> out(st.b.size());
  detail::parallel_for(st.b.size(), threads, [&](std::size_t i) {
    Cube b = st.b[i];
    for (int it = 0; it < inner_iters; ++it) {
      Cube f = axpy(b, -step, b_gradient(b, rg[i], st.l_aux[i], st.p[i], params, dicts));
      b = soft_threshold(f, tau);
    }
    out[i] = std::move(b);
  });
  return out;
}

std::vector<Cube> l_update(const RciState& st, const StageParams& params, TnnConvention tnn,
                           unsigned threads) {
  if (!finite_pos(params.beta)) throw ParamError("l_update: beta must be > 0");
  const double tau = params.lambda * params.gamma2 / params.beta;
  std::vector<Cube> out(st.b.size());
  detail::parallel_for(st.b.size(), threads, [&](std::size_t i) {
    out[i] = tensor_svt(axpy(st.b[i], -1.0 / params.beta, st.p[i]), tau, tnn);
  });
  return out;
}

AUpdate a_update(const RciState& st, const Cube& y, bool on_residual) {
  const Cube data = (st.s && on_residual) ? sub(y, *st.s) : y;
  const Dims& d = data.dims();
  const Dims& gd = st.g.dims();
  if (gd.n1 != d.n1 || gd.n2 != d.n2) {
    throw DimsError("a_update: G " + gd.str() + " incompatible with Y " + d.str());
  }
  // cross = unfold(Y, 3) · unfold(G, 3)ᵀ, an n₃×n₄ matrix.
  const std::size_t plane = d.n1 * d.n2;
  auto ys = data.data();
  auto gs = st.g.data();
  Matrix cross(d.n3, gd.n3);
  for (std::size_t c = 0; c < gd.n3; ++c)
    for (std::size_t r = 0; r < d.n3; ++r) {
      const double* yp = ys.data() + plane * r;
      const double* gp = gs.data() + plane * c;
      double s = 0.0;
      for (std::size_t n = 0; n < plane; ++n) s += yp[n] * gp[n];
      cross(r, c) = s;
    }
  if (cross.fro_norm() == 0.0) return {st.a, true};
  const SvdResult r = svd(cross);
  return {r.u * r.v.transpose(), false};
}

std::vector<Cube> p_update(const RciState& st, const StageParams& params) {
  std::vector<Cube> out(st.p.size());
  for (std::size_t i = 0; i < st.p.size(); ++i) {
    out[i] = axpy(st.p[i], params.beta, sub(st.l_aux[i], st.b[i]));
  }
  return out;
}

Cube s_update(const RciState& st, const Cube& y, const StageParams& params) {
  if (!st.s) throw ModeError("s_update called on a state without a sparse-noise block");
  return soft_threshold(sub(y, mode_product(st.g, st.a, 3)), params.mu);
}

// ---------------------------------------------------------------- objectives

double objective_value(const RciState& st, const Cube& y, const StageParams& params,
                       const DictionarySet& dicts, TnnConvention tnn) {
  Cube resid = sub(y, mode_product(st.g, st.a, 3));
  double total = 0.0;
  if (st.s) {
    resid = sub(resid, *st.s);
    total += params.mu * l1_norm(*st.s);
  }
  total += 0.5 * dot(resid, resid);

  const std::vector<Cube> rg = extract(st.g, st.layout);
  double prior = 0.0;
  for (std::size_t i = 0; i < st.b.size(); ++i) {
    const Cube fit = sub(rg[i], tucker_apply(st.b[i], dicts));
    prior += 0.5 * dot(fit, fit) + params.gamma1 * l1_norm(st.b[i]);
    if (params.gamma2 != 0.0) prior += params.gamma2 * tensor_nuclear_norm(st.l_aux[i], tnn);
  }
  return total + params.lambda * prior;
}

double b_subproblem_objective(const RciState& st, const StageParams& params,
                              const DictionarySet& dicts, std::size_t patch, const Cube& b) {
  const Cube rg = extract(st.g, st.layout).at(patch);
  const Cube fit = sub(rg, tucker_apply(b, dicts));
  const Cube split = axpy(sub(st.l_aux[patch], b), 1.0 / params.beta, st.p[patch]);
  return 0.5 * params.lambda * dot(fit, fit) + 0.5 * params.beta * dot(split, split) +
         params.lambda * params.gamma1 * l1_norm(b);
}

double g_subproblem_objective(const RciState& st, const Cube& y, const StageParams& params,
                              const DictionarySet& dicts, const Cube& g) {
  Cube resid = sub(y, mode_product(g, st.a, 3));
  if (st.s) resid = sub(resid, *st.s);
  const std::vector<Cube> rg = extract(g, st.layout);
  double prior = 0.0;
  for (std::size_t i = 0; i < st.b.size(); ++i) {
    const Cube fit = sub(rg[i], tucker_apply(st.b[i], dicts));
    prior += dot(fit, fit);
  }
  return 0.5 * dot(resid, resid) + 0.5 * params.lambda * prior;
}

double classical_lipschitz(const StageParams& params, const DictionarySet& dicts,
                           std::uint64_t seed, int power_iters) {
  const LinearOp normal = [&](const Cube& b) {
    Cube tb = tucker_apply(tucker_apply(b, dicts), dicts, /*adjoint=*/true);
    return axpy(scale(tb, params.lambda), params.beta, b);
  };
  const double l = spectral_norm(normal, normal, dicts.code_dims(), power_iters, seed);
  return l > 0.0 ? l : 1e-12;
}

double primal_residual(const RciState& st) {
  double s = 0.0;
  for (std::size_t i = 0; i < st.b.size(); ++i) {
    const Cube d = sub(st.l_aux[i], st.b[i]);
    s += dot(d, d);
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------- driver

void advance_stage(RciState& st, const Cube& y, const StageParams& params,
                   const DictionarySet& dicts, int inner_iters, const SolverOptions& opts,
                   int stage_index, SolveReport* report) {
  if (st.weights.lambda != params.lambda) {
    st.weights = coverage_weights(st.coverage, params.lambda);
  }
  st.g = g_update(st, y, params, dicts);
  require_finite(st.g, "G", stage_index);
  if (st.s) {
    st.s = s_update(st, y, params);
    require_finite(*st.s, "S", stage_index);
  }
  if (!std::isfinite(params.lambda * params.gamma1 / params.lipschitz) ||
      !std::isfinite(1.0 / params.lipschitz)) {
    throw NumericError("non-finite value in B-block at stage " + std::to_string(stage_index) +
                       ": step or threshold overflows");
  }
  st.b = b_update(st, params, dicts, inner_iters, opts.threads);
  require_finite(st.b, "B", stage_index);
  st.l_aux = l_update(st, params, opts.tnn, opts.threads);
  require_finite(st.l_aux, "L", stage_index);
  AUpdate au = a_update(st, y, opts.procrustes_on_residual);
  for (double v : au.a.data()) {
    if (!std::isfinite(v)) {
      throw NumericError("non-finite value in A-block at stage " + std::to_string(stage_index));
    }
  }
  st.a = std::move(au.a);
  if (au.degenerate && report) ++report->degenerate_a_updates;
  st.p = p_update(st, params);
  require_finite(st.p, "P", stage_index);
}

RunResult run(const Cube& y, const Schedule& schedule, RunMode mode, const SolverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  schedule.validate();
  if (!y.all_finite()) throw NumericError("input cube contains non-finite samples");
  if (!(opts.tol >= 0.0)) throw ParamError("tol must be >= 0");
  if (opts.max_iters < 1) throw ParamError("max_iters must be >= 1");

  RciState st = init_state(y, opts.rank, opts.patch, opts.stride, schedule.model);
  const DictionarySet shared = DictionarySet::dct(opts.patch);
  SolveReport report;

  auto record = [&](const StageParams& params, const DictionarySet& dicts) {
    ++report.iterations;
    report.residuals.push_back(primal_residual(st));
    report.objective.push_back(objective_value(st, y, params, dicts, opts.tnn));
  };

  if (mode == RunMode::Classical) {
    StageParams params = schedule.stages.front();
    const DictionarySet& dicts = params.dictionaries ? *params.dictionaries : shared;
    check_dicts(dicts, opts.patch);
    params.lipschitz = classical_lipschitz(params, dicts, opts.seed, opts.power_iters);
    report.lipschitz = params.lipschitz;
    st.weights = coverage_weights(st.coverage, params.lambda);
    for (int it = 0; it < opts.max_iters; ++it) {
      advance_stage(st, y, params, dicts, opts.inner_iters, opts, it, &report);
      record(params, dicts);
      double bnorm = 0.0;
      for (const Cube& b : st.b) bnorm += dot(b, b);
      if (report.residuals.back() / std::max(1.0, std::sqrt(bnorm)) < opts.tol) {
        report.converged = true;
        break;
      }
    }
  } else {
    for (std::size_t k = 0; k < schedule.stages.size(); ++k) {
      const StageParams& params = schedule.stages[k];
      const DictionarySet& dicts = params.dictionaries ? *params.dictionaries : shared;
      check_dicts(dicts, opts.patch);
      advance_stage(st, y, params, dicts, /*inner_iters=*/1, opts, static_cast<int>(k), &report);
      record(params, dicts);
    }
  }

  RunResult out{mode_product(st.g, st.a, 3), std::move(report)};
  require_finite(out.x, "output", out.report.iterations);
  out.report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

double reconstruction_loss(const Cube& x_hat, const Cube& x_ref) {
  const Cube d = sub(x_hat, x_ref);
  return dot(d, d);
}

}  // namespace star
