#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "star/dictionary.hpp"
#include "star/patches.hpp"
#include "star/prox.hpp"
#include "star/tensor.hpp"

namespace star {

/// STAR (subspace + Tucker dictionary + low-rank patches) or STAR-S, which
/// adds an explicit sparse-noise cube S with an ℓ₁ penalty μ‖S‖₁.
enum class Model { Star, StarS };
enum class RunMode { Classical, Unrolled };

Model parse_model(std::string_view s);  // "star", "star_s" or "star-s"
std::string_view to_string(Model m);     // "star" / "star_s"
RunMode parse_run_mode(std::string_view s);
std::string_view to_string(RunMode m);

/// One stage's scalar parameters.
///
/// β and the Lipschitz constant l are divisors and must be > 0. The weights
/// λ, γ₁, γ₂ and μ must be >= 0; zero switches the corresponding term off.
struct StageParams {
  double lambda = 0.02;
  double gamma1 = 0.02;
  double gamma2 = 0.02;
  double beta = 0.02;
  double mu = 0.02;
  double lipschitz = 0.02;
  std::optional<DictionarySet> dictionaries;

  void validate() const;  // throws ParamError
};

struct Schedule {
  Model model = Model::Star;
  std::vector<StageParams> stages;

  void validate() const;
};

inline constexpr std::size_t kDefaultStages = 9;
inline constexpr double kDefaultParam = 0.02;

/// K identical stages with every scalar at 0.02 and the shared DCT set.
Schedule default_schedule(Model model, std::size_t stages = kDefaultStages);

struct SolverOptions {
  std::size_t rank = 9;            // n₄, subspace dimension
  Dims patch{9, 9, 9};             // patch extents == dictionary sizes
  Index3 stride{6, 6, 6};
  double tol = 1e-4;               // relative primal residual (classical)
  int max_iters = 100;             // classical
  int inner_iters = 10;            // ISTA steps per B-block (classical)
  TnnConvention tnn = TnnConvention::TSvd;
  bool procrustes_on_residual = true;  // STAR-S: A-block fits Y − S
  unsigned threads = 0;            // 0 = hardware concurrency
  std::uint64_t seed = 0;          // power-iteration probe
  int power_iters = 50;
};

/// Complete ADMM state carried from stage to stage.
struct RciState {
  Cube g;                      // n₁×n₂×n₄ coefficient image
  Matrix a;                    // n₃×n₄, orthonormal columns
  std::vector<Cube> b;         // sparse codes, one per patch
  std::vector<Cube> l_aux;     // low-rank copies of b
  std::vector<Cube> p;         // multipliers
  std::optional<Cube> s;       // sparse noise (STAR-S only)
  PatchLayout layout;
  Cube coverage;               // patches covering each voxel of g
  CoverageWeights weights;     // cached for weights.lambda
};

struct SolveReport {
  int iterations = 0;
  std::vector<double> residuals;  // ‖L − B‖_F per iteration
  std::vector<double> objective;  // objective_value per iteration
  double wall_ms = 0.0;
  bool converged = false;         // classical: relative residual fell below tol
  int degenerate_a_updates = 0;   // A-blocks that kept the previous basis
  double lipschitz = 0.0;         // classical: estimated l
};

struct RunResult {
  Cube x;
  SolveReport report;
};

RciState init_state(const Cube& y, std::size_t rank, const Dims& patch, const Index3& stride,
                    Model model);

/// Exact minimiser of the G-subproblem:
///   G = w ∘ (λ Σᵢ Rᵢᵀ(Bᵢ ×₁D₁ ×₂D₂ ×₃D₃) + (Y − S) ×₃ Aᵀ).
Cube g_update(const RciState& st, const Cube& y, const StageParams& params,
              const DictionarySet& dicts);

/// `inner_iters` ISTA steps per patch on
///   λ/2‖RᵢG − T(Bᵢ)‖² + β/2‖Lᵢ − Bᵢ + Pᵢ/β‖² + λγ₁‖Bᵢ‖₁
/// with step 1/l and threshold λγ₁/l, warm-started at the current Bᵢ.
std::vector<Cube> b_update(const RciState& st, const StageParams& params,
                           const DictionarySet& dicts, int inner_iters, unsigned threads = 1);

/// Lᵢ = tensor_svt(Bᵢ − Pᵢ/β, λγ₂/β).
std::vector<Cube> l_update(const RciState& st, const StageParams& params,
                           TnnConvention tnn = TnnConvention::TSvd, unsigned threads = 1);

struct AUpdate {
  Matrix a;
  bool degenerate = false;  // cross-product was zero; `a` is the previous basis
};

/// Reduced-rank Procrustes: A = U Vᵀ from svd(unfold(Y_eff, 3) · unfold(G, 3)ᵀ),
/// with Y_eff = Y − S when the state has S and `on_residual` is set.
AUpdate a_update(const RciState& st, const Cube& y, bool on_residual = true);

/// Pᵢ + β(Lᵢ − Bᵢ).
std::vector<Cube> p_update(const RciState& st, const StageParams& params);

/// S = soft_threshold(Y − G ×₃ A, μ). Throws ModeError without an S block.
Cube s_update(const RciState& st, const Cube& y, const StageParams& params);

/// ½‖Y − G×₃A − S‖² + μ‖S‖₁ + λ Σᵢ (½‖RᵢG − T(Bᵢ)‖² + γ₁‖Bᵢ‖₁ + γ₂‖Lᵢ‖_*).
double objective_value(const RciState& st, const Cube& y, const StageParams& params,
                       const DictionarySet& dicts, TnnConvention tnn = TnnConvention::TSvd);

/// Per-patch objective of the B-subproblem minimised by b_update.
double b_subproblem_objective(const RciState& st, const StageParams& params,
                              const DictionarySet& dicts, std::size_t patch, const Cube& b);

/// Objective of the G-subproblem minimised by g_update.
double g_subproblem_objective(const RciState& st, const Cube& y, const StageParams& params,
                              const DictionarySet& dicts, const Cube& g);

/// Power-iteration Lipschitz constant of the B-subproblem gradient,
/// ‖λ TᵀT + β I‖ with the 1.05 safety factor.
double classical_lipschitz(const StageParams& params, const DictionarySet& dicts,
                           std::uint64_t seed = 0, int power_iters = 50);

/// Σᵢ ‖Lᵢ − Bᵢ‖², square-rooted.
double primal_residual(const RciState& st);

/// Runs one full stage G → (S) → B → L → A → P in place.
void advance_stage(RciState& st, const Cube& y, const StageParams& params,
                   const DictionarySet& dicts, int inner_iters, const SolverOptions& opts,
                   int stage_index, SolveReport* report = nullptr);

/// Classical mode repeats schedule.stages.front() with an estimated l and
/// `opts.inner_iters` ISTA steps until the relative residual
/// ‖L − B‖_F / max(1, ‖B‖_F) < tol or max_iters. Unrolled mode runs every
/// stage exactly once with its own parameters and one ISTA step.
RunResult run(const Cube& y, const Schedule& schedule, RunMode mode,
              const SolverOptions& opts = {});

/// ‖x̂ − x‖_F².
double reconstruction_loss(const Cube& x_hat, const Cube& x_ref);

}  // namespace star
