#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <optional>
#include <string>
#include <variant>

#include "star/io.hpp"
#include "star/metrics.hpp"
#include "star/noise.hpp"
#include "star/prox.hpp"
#include "star/solver.hpp"

namespace py = pybind11;

namespace {

using FArray = py::array_t<double, py::array::f_style | py::array::forcecast>;
using Extent = std::variant<std::size_t, std::array<std::size_t, 3>>;

// numpy arrays of shape (n1, n2, n3) in Fortran order share the Cube layout.
star::Cube to_cube(const FArray& a) {
  if (a.ndim() != 3) throw star::DimsError("expected a 3-D array (n1, n2, n3)");
  const star::Dims d{static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
                     static_cast<std::size_t>(a.shape(2))};
  return star::Cube(d, std::vector<double>(a.data(), a.data() + a.size()));
}

FArray to_array(const star::Cube& c) {
  const star::Dims& d = c.dims();
  FArray out({d.n1, d.n2, d.n3});
  std::copy(c.data().begin(), c.data().end(), out.mutable_data());
  return out;
}

star::Dims patch_dims(const Extent& e, const star::Dims& cube, std::size_t rank) {
  if (const auto* t = std::get_if<std::array<std::size_t, 3>>(&e)) return {(*t)[0], (*t)[1], (*t)[2]};
  const std::size_t p = std::get<std::size_t>(e);
  return {std::min(p, cube.n1), std::min(p, cube.n2), std::min(p, rank)};
}

star::Index3 stride3(const Extent& e) {
  if (const auto* t = std::get_if<std::array<std::size_t, 3>>(&e)) return *t;
  const std::size_t s = std::get<std::size_t>(e);
  return {s, s, s};
}

py::dict report_dict(const star::SolveReport& r) {
  py::dict d;
  d["iterations"] = r.iterations;
  d["residuals"] = r.residuals;
  d["objective"] = r.objective;
  d["wall_ms"] = r.wall_ms;
  d["converged"] = r.converged;
  d["degenerate_a_updates"] = r.degenerate_a_updates;
  d["lipschitz"] = r.lipschitz;
  return d;
}

py::tuple denoise(const FArray& noisy, const std::string& model, const std::string& mode,
                  std::optional<std::string> schedule_json, std::optional<std::size_t> rank, const Extent& patch,
                  const Extent& stride, double tol, int max_iters, int inner_iters,
                  const std::string& tnn, unsigned threads, std::uint64_t seed,
                  std::optional<double> lambda, std::optional<double> gamma1,
                  std::optional<double> gamma2, std::optional<double> beta,
                  std::optional<double> mu) {
  const star::Cube y = to_cube(noisy);
  star::Schedule schedule = schedule_json ? star::parse_schedule(*schedule_json)
                                          : star::default_schedule(star::parse_model(model));
  for (star::StageParams& p : schedule.stages) {
    if (lambda) p.lambda = *lambda;
    if (gamma1) p.gamma1 = *gamma1;
    if (gamma2) p.gamma2 = *gamma2;
    if (beta) p.beta = *beta;
    if (mu) p.mu = *mu;
  }
  star::SolverOptions opts;
  opts.rank = rank.value_or(std::min(opts.rank, y.dims().n3));
  opts.patch = patch_dims(patch, y.dims(), opts.rank);
  opts.stride = stride3(stride);
  opts.tol = tol;
  opts.max_iters = max_iters;
  opts.inner_iters = inner_iters;
  opts.tnn = star::parse_tnn(tnn);
  opts.threads = threads;
  opts.seed = seed;

  star::RunResult r;
  {
    py::gil_scoped_release release;
    r = star::run(y, schedule, star::parse_run_mode(mode), opts);
  }
  return py::make_tuple(to_array(r.x), report_dict(r.report));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "STAR / STAR-S hyperspectral denoising (C++ core)";

  static py::exception<star::Error> base(m, "StarError", PyExc_RuntimeError);
  py::register_exception<star::DimsError>(m, "DimsError", base.ptr());
  py::register_exception<star::NumericError>(m, "NumericError", base.ptr());
  py::register_exception<star::ParamError>(m, "ParamError", base.ptr());
  py::register_exception<star::ModeError>(m, "ModeError", base.ptr());
  py::register_exception<star::FormatError>(m, "FormatError", base.ptr());
  py::register_exception<star::ScheduleParseError>(m, "ScheduleParseError", base.ptr());
  py::register_exception<star::MetricUndefined>(m, "MetricUndefined", base.ptr());

  m.def("denoise", &denoise, py::arg("noisy"), py::arg("model") = "star",
        py::arg("mode") = "classical", py::arg("schedule") = py::none(), py::arg("rank") = py::none(),
        py::arg("patch") = Extent{std::size_t{9}}, py::arg("stride") = Extent{std::size_t{6}},
        py::arg("tol") = 1e-4, py::arg("max_iters") = 100, py::arg("inner_iters") = 10,
        py::arg("tnn") = "tsvd", py::arg("threads") = 0, py::arg("seed") = 0,
        py::arg("lam") = py::none(), py::arg("gamma1") = py::none(),
        py::arg("gamma2") = py::none(), py::arg("beta") = py::none(), py::arg("mu") = py::none(),
        "Denoise an (n1, n2, n3) cube. Returns (denoised, report).");

  m.def(
      "simulate",
      [](const FArray& x, double gaussian, double impulse, double deadlines, std::uint64_t seed) {
        return to_array(star::simulate(to_cube(x), {gaussian, impulse, deadlines, seed}));
      },
      py::arg("clean"), py::arg("gaussian") = 0.0, py::arg("impulse") = 0.0,
      py::arg("deadlines") = 0.0, py::arg("seed") = 0);

  m.def(
      "metrics",
      [](const FArray& ref, const FArray& test) {
        const star::MetricReport r = star::evaluate(to_cube(test), to_cube(ref));
        py::dict d;
        d["psnr"] = r.psnr;
        d["ssim"] = r.ssim;
        d["sam"] = r.sam;
        d["ergas"] = r.ergas;
        return d;
      },
      py::arg("ref"), py::arg("test"));
  m.def("psnr", [](const FArray& t, const FArray& r) { return star::psnr(to_cube(t), to_cube(r)); });
  m.def("ssim", [](const FArray& t, const FArray& r) { return star::ssim(to_cube(t), to_cube(r)); });
  m.def("sam", [](const FArray& t, const FArray& r) { return star::sam(to_cube(t), to_cube(r)); });
  m.def("ergas", [](const FArray& t, const FArray& r) { return star::ergas(to_cube(t), to_cube(r)); });

  m.def(
      "soft_threshold",
      [](const FArray& x, double tau) { return to_array(star::soft_threshold(to_cube(x), tau)); },
      py::arg("x"), py::arg("tau"));
  m.def(
      "tensor_svt",
      [](const FArray& x, double tau, const std::string& tnn) {
        return to_array(star::tensor_svt(to_cube(x), tau, star::parse_tnn(tnn)));
      },
      py::arg("x"), py::arg("tau"), py::arg("tnn") = "tsvd");

  m.def(
      "default_schedule",
      [](const std::string& model, std::size_t k) {
        return star::schedule_to_json(star::default_schedule(star::parse_model(model), k));
      },
      py::arg("model") = "star", py::arg("k") = star::kDefaultStages,
      "Default schedule as a JSON document.");

  m.def("read_cube", [](const std::string& path) { return to_array(star::read_cube(path)); });
  m.def("write_cube", [](const std::string& path, const FArray& x) {
    star::write_cube(path, to_cube(x));
  });
}
