#include <optional>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "logem/analysis.hpp"
#include "logem/assumptions.hpp"
#include "logem/config.hpp"
#include "logem/errors.hpp"
#include "logem/scheme.hpp"

namespace py = pybind11;
using namespace logem;

namespace {

RunConfig parse(const std::string& text, std::optional<std::uint64_t> seed) {
  RunConfig cfg = parse_config(text);
  if (seed) cfg.seed = *seed;
  return cfg;
}

McOptions mc(const RunConfig& cfg, unsigned threads) { return {cfg.seed, cfg.n_paths, threads}; }

}  // namespace

PYBIND11_MODULE(_logem, m) {
  m.doc() = "log-Euler-Maruyama scheme for jump SDDEs";

  static py::exception<Error> error(m, "LogemError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr ptr) {
    try {
      if (ptr) std::rethrow_exception(ptr);
    } catch (const Error& e) {
      py::set_error(error, (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  m.def("canonical_scenario", [](const std::string& text) {
    return scenario_to_json(parse_config(text).scenario).dump();
  });

  m.def("validate", [](const std::string& text) {
    const RunConfig cfg = parse_config(text);
    return to_json(validate_assumptions(cfg.scenario, cfg.q)).dump();
  });

  m.def(
      "simulate",
      [](const std::string& text, std::optional<std::uint64_t> seed) {
        const RunConfig cfg = parse(text, seed);
        const Grid grid = build_grid(cfg.scenario.b, cfg.scenario.T, cfg.m);
        const auto realization =
            sample_jump_realization(cfg.scenario.levy, cfg.scenario.T, cfg.seed, cfg.stream);
        const SolutionPath path = simulate(cfg.scenario, grid, realization);
        py::dict out;
        out["times"] = path.times;
        out["X"] = Matrix(path.X);
        out["p"] = Matrix(path.p);
        out["S"] = Matrix(path.S);
        out["jumps"] = realization.total_events();
        return out;
      },
      py::arg("config"), py::arg("seed") = py::none());

  m.def(
      "converge",
      [](const std::string& text, std::optional<std::uint64_t> seed, unsigned threads) {
        const RunConfig cfg = parse(text, seed);
        py::gil_scoped_release release;
        ConvergenceReport report =
            coupled_strong_error(cfg.scenario, cfg.fine_m, cfg.coarse_m, cfg.p, mc(cfg, threads));
        report.scenario_hash = cfg.scenario_hash;
        return to_json(report).dump();
      },
      py::arg("config"), py::arg("seed") = py::none(), py::arg("threads") = 0);

  m.def(
      "audit",
      [](const std::string& text, std::optional<std::uint64_t> seed, unsigned threads) {
        const RunConfig cfg = parse(text, seed);
        py::gil_scoped_release release;
        AuditRecord rec = positivity_audit(
            cfg.scenario, build_grid(cfg.scenario.b, cfg.scenario.T, cfg.m), mc(cfg, threads));
        rec.scenario_hash = cfg.scenario_hash;
        return to_json(rec).dump();
      },
      py::arg("config"), py::arg("seed") = py::none(), py::arg("threads") = 0);
}
