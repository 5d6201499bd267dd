#include "star/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "star/io.hpp"
#include "star/metrics.hpp"
#include "star/noise.hpp"
#include "star/solver.hpp"

namespace star {

namespace {

void diagnostic(std::ostream& err, const std::string& kind, const std::string& message) {
  err << nlohmann::json{{"error", kind}, {"message", message}}.dump() << "\n";
}

// "9" or "9,9,4".
std::vector<std::size_t> parse_extents(const std::string& text, const char* flag) {
  std::vector<std::size_t> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long n = -1;
    try {
      n = std::stoll(item, &used);
    } catch (const std::exception&) {
    }
    if (used != item.size() || n < 1) {
      throw CLI::ValidationError(flag, "expected a positive integer or a comma triple");
    }
    v.push_back(static_cast<std::size_t>(n));
  }
  if (v.size() != 1 && v.size() != 3) {
    throw CLI::ValidationError(flag, "expected one value or three comma-separated values");
  }
  return v;
}

// A single patch extent p expands to (p, p, p), each axis clamped to the
// coefficient image n1×n2×rank. Explicit triples are used verbatim.
Dims resolve_patch(const std::vector<std::size_t>& v, const Dims& cube, std::size_t rank) {
  if (v.size() == 3) return {v[0], v[1], v[2]};
  return {std::min(v[0], cube.n1), std::min(v[0], cube.n2), std::min(v[0], rank)};
}

Index3 resolve_stride(const std::vector<std::size_t>& v) {
  if (v.size() == 3) return {v[0], v[1], v[2]};
  return {v[0], v[0], v[0]};
}

struct SimulateArgs {
  std::string in, out;
  double gaussian = 0.0, impulse = 0.0, deadlines = 0.0;
  std::uint64_t seed = 0;
};

struct DenoiseArgs {
  std::string in, out, model = "star", mode = "classical", schedule, report;
  std::string patch = "9", stride = "6", tnn = "tsvd";
  std::optional<std::size_t> rank;  // default min(9, n3)
  double tol = 1e-4;
  int max_iters = 100, inner_iters = 10;
  unsigned threads = 0;
  std::uint64_t seed = 0;
  std::optional<double> lambda, gamma1, gamma2, beta, mu;
};

struct MetricsArgs {
  std::string ref, test;
};

struct InitArgs {
  std::string model = "star", out;
  std::size_t k = kDefaultStages;
};

int do_simulate(const SimulateArgs& a, std::ostream& out) {
  const Cube x = read_cube(a.in);
  const Cube y = simulate(x, NoiseSpec{a.gaussian, a.impulse, a.deadlines, a.seed});
  write_cube(a.out, y);
  out << nlohmann::json{{"written", a.out}, {"dims", x.dims().str()}}.dump() << "\n";
  return kExitOk;
}

int do_denoise(const DenoiseArgs& a, bool model_given, std::ostream& out) {
  const auto patch = parse_extents(a.patch, "--patch");
  const auto stride = parse_extents(a.stride, "--stride");
  const Cube y = read_cube(a.in);
  Schedule schedule;
  if (!a.schedule.empty()) {
    schedule = load_schedule(a.schedule);
    if (model_given && schedule.model != parse_model(a.model)) {
      throw ParamError("--model " + a.model + " disagrees with schedule model " +
                       std::string(to_string(schedule.model)));
    }
  } else {
    schedule = default_schedule(parse_model(a.model));
  }
  for (StageParams& p : schedule.stages) {
    if (a.lambda) p.lambda = *a.lambda;
    if (a.gamma1) p.gamma1 = *a.gamma1;
    if (a.gamma2) p.gamma2 = *a.gamma2;
    if (a.beta) p.beta = *a.beta;
    if (a.mu) p.mu = *a.mu;
  }

  SolverOptions opts;
  opts.rank = a.rank.value_or(std::min(opts.rank, y.dims().n3));
  opts.patch = resolve_patch(patch, y.dims(), opts.rank);
  opts.stride = resolve_stride(stride);
  opts.tol = a.tol;
  opts.max_iters = a.max_iters;
  opts.inner_iters = a.inner_iters;
  opts.tnn = parse_tnn(a.tnn);
  opts.threads = a.threads;
  opts.seed = a.seed;

  const RunResult r = run(y, schedule, parse_run_mode(a.mode), opts);
  write_cube(a.out, r.x);
  if (!a.report.empty()) {
    std::ofstream rep(a.report, std::ios::trunc);
    if (!rep) throw FormatError("cannot write report '" + a.report + "'");
    rep << report_to_json(r.report);
  }
  out << nlohmann::json{{"written", a.out},
                        {"iterations", r.report.iterations},
                        {"converged", r.report.converged},
                        {"wall_ms", r.report.wall_ms}}
             .dump()
      << "\n";
  return kExitOk;
}

int do_metrics(const MetricsArgs& a, std::ostream& out) {
  const Cube ref = read_cube(a.ref);
  const Cube test = read_cube(a.test);
  const MetricReport m = evaluate(test, ref);
  out << metrics_to_json(m) << "\n";
  out << std::fixed << std::setprecision(4);
  out << "metric   value\n";
  out << "PSNR     " << m.psnr << " dB\n";
  out << "SSIM     " << m.ssim << "\n";
  out << "SAM      " << m.sam << " rad\n";
  out << "ERGAS    " << m.ergas << "\n";
  return kExitOk;
}

int do_init_schedule(const InitArgs& a, std::ostream& out) {
  const Schedule s = default_schedule(parse_model(a.model), a.k);
  if (a.out.empty()) {
    out << schedule_to_json(s);
  } else {
    save_schedule(a.out, s);
    out << nlohmann::json{{"written", a.out}, {"stages", s.stages.size()}}.dump() << "\n";
  }
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"STAR / STAR-S denoising for hyperspectral cubes", "star_denoise"};
  app.require_subcommand(1);
  const std::vector<std::string> models{"star", "star-s", "star_s"};

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "corrupt a clean cube");
  simulate_cmd->add_option("--in", sim.in, "clean cube (.htc)")->required();
  simulate_cmd->add_option("--out", sim.out, "noisy cube (.htc)")->required();
  simulate_cmd->add_option("--gaussian", sim.gaussian, "Gaussian sigma on the 0-255 scale")
      ->check(CLI::NonNegativeNumber);
  simulate_cmd->add_option("--impulse", sim.impulse, "salt-and-pepper ratio per band")
      ->check(CLI::Range(0.0, 1.0));
  simulate_cmd->add_option("--deadlines", sim.deadlines, "fraction of bands with dead lines")
      ->check(CLI::Range(0.0, 1.0));
  simulate_cmd->add_option("--seed", sim.seed, "random seed");

  DenoiseArgs dn;
  auto* denoise_cmd = app.add_subcommand("denoise", "run the STAR / STAR-S solver");
  denoise_cmd->add_option("--in", dn.in, "noisy cube (.htc)")->required();
  denoise_cmd->add_option("--out", dn.out, "denoised cube (.htc)")->required();
  auto* model_opt = denoise_cmd->add_option("--model", dn.model, "star | star-s")
                        ->check(CLI::IsMember(models));
  denoise_cmd->add_option("--mode", dn.mode, "classical | unrolled")
      ->check(CLI::IsMember({"classical", "unrolled"}));
  denoise_cmd->add_option("--schedule", dn.schedule, "stage parameters (JSON)");
  denoise_cmd->add_option("--rank", dn.rank, "subspace dimension (default min(9, n3))")
      ->check(CLI::PositiveNumber);
  denoise_cmd->add_option("--patch", dn.patch, "patch extent p or p1,p2,p3");
  denoise_cmd->add_option("--stride", dn.stride, "patch stride s or s1,s2,s3");
  denoise_cmd->add_option("--tol", dn.tol, "relative residual tolerance (classical)")
      ->check(CLI::NonNegativeNumber);
  denoise_cmd->add_option("--max-iters", dn.max_iters, "iteration cap (classical)")
      ->check(CLI::PositiveNumber);
  denoise_cmd->add_option("--inner-iters", dn.inner_iters, "ISTA steps per B-block (classical)")
      ->check(CLI::PositiveNumber);
  denoise_cmd->add_option("--tnn", dn.tnn, "tensor nuclear norm: tsvd | mode3-unfold")
      ->check(CLI::IsMember({"tsvd", "mode3-unfold"}));
  denoise_cmd->add_option("--report", dn.report, "write the solve report (JSON)");
  denoise_cmd->add_option("--threads", dn.threads, "worker threads, 0 = all cores");
  denoise_cmd->add_option("--seed", dn.seed, "power-iteration seed");
  denoise_cmd->add_option("--lambda", dn.lambda, "override lambda in every stage");
  denoise_cmd->add_option("--gamma1", dn.gamma1, "override gamma1 in every stage");
  denoise_cmd->add_option("--gamma2", dn.gamma2, "override gamma2 in every stage");
  denoise_cmd->add_option("--beta", dn.beta, "override beta in every stage");
  denoise_cmd->add_option("--mu", dn.mu, "override mu in every stage");

  MetricsArgs met;
  auto* metrics_cmd = app.add_subcommand("metrics", "PSNR / SSIM / SAM / ERGAS");
  metrics_cmd->add_option("--ref", met.ref, "reference cube (.htc)")->required();
  metrics_cmd->add_option("--test", met.test, "cube under test (.htc)")->required();

  InitArgs init;
  auto* init_cmd = app.add_subcommand("init-schedule", "write the default stage schedule");
  init_cmd->add_option("--model", init.model, "star | star-s")->check(CLI::IsMember(models));
  init_cmd->add_option("--k", init.k, "number of stages")->check(CLI::PositiveNumber);
  init_cmd->add_option("--out", init.out, "output path (stdout when omitted)");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("star_denoise");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    diagnostic(err, "UsageError", e.what());
    return kExitUsage;
  }

  try {
    if (*simulate_cmd) return do_simulate(sim, out);
    if (*denoise_cmd) return do_denoise(dn, model_opt->count() > 0, out);
    if (*metrics_cmd) return do_metrics(met, out);
    return do_init_schedule(init, out);
  } catch (const CLI::ValidationError& e) {
    diagnostic(err, "UsageError", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    diagnostic(err, e.kind(), e.what());
    return kExitData;
  } catch (const std::exception& e) {
    diagnostic(err, "InternalError", e.what());
    return kExitData;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace star
