#include "logem/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <vector>

#include <unistd.h>

#include "logem/analysis.hpp"
#include "logem/assumptions.hpp"
#include "logem/errors.hpp"
#include "logem/format.hpp"

namespace logem::cli {
namespace {

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Configuration:
    case ErrorKind::Unsupported:
      return kConfigError;
    case ErrorKind::ValidationUnsupported:
      return kValidationFailure;
    default:
      return kRuntimeFailure;
  }
}

RunConfig load(const CommandOptions& options) {
  RunConfig cfg = load_config(options.config);
  if (options.seed) cfg.seed = *options.seed;
  if (options.out) cfg.out = *options.out;
  if (options.format) cfg.format = *options.format;
  return cfg;
}

/// Emits `content` to the configured file, or to `out` when none is set.
void emit(const RunConfig& cfg, const std::string& content, std::ostream& out) {
  if (cfg.out) {
    write_atomically(*cfg.out, content);
  } else {
    out << content;
  }
}

/// Summary lines go to stdout unless stdout already carries the data.
std::ostream& summary_stream(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return cfg.out ? out : err;
}

std::string join(const std::vector<std::string>& items) {
  std::string s;
  for (const auto& item : items) s += (s.empty() ? "" : ", ") + item;
  return s;
}

/// Runs the assumption checks. Returns an exit code when the command must
/// stop, or nullopt to continue.
std::optional<int> gate(const RunConfig& cfg, const CommandOptions& options, std::ostream& err) {
  const AssumptionReport report = validate_assumptions(cfg.scenario, cfg.q);
  if (report.all_pass()) return std::nullopt;
  if (!cfg.scenario.positivity_mode && options.allow_unvalidated) {
    err << "warning: assumptions not satisfied (" << join(report.failures())
        << "); continuing with --allow-unvalidated\n";
    return std::nullopt;
  }
  err << "assumption validation failed: " << join(report.failures()) << '\n';
  return kValidationFailure;
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

}  // namespace

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) fail(ErrorKind::Usage, "cannot open " + tmp.string() + " for writing");
    file << content;
    file.flush();
    if (!file) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      fail(ErrorKind::Usage, "failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

unsigned threads_from_environment() {
  const char* env = std::getenv("SDDE_LOGEM_THREADS");
  if (env == nullptr) return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1) return 0;
  return static_cast<unsigned>(v);
}

int cmd_simulate(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load(options);
    if (auto stop = gate(cfg, options, err)) return *stop;
    const Scenario& s = cfg.scenario;
    const Grid grid = build_grid(s.b, s.T, cfg.m);
    const auto r = sample_jump_realization(s.levy, s.T, cfg.seed, cfg.stream);
    const SolutionPath path = simulate(s, grid, r);

    emit(cfg, cfg.format == OutputFormat::Csv ? path_to_csv(path) : path_to_json(path).dump(2) + "\n",
         out);

    auto& summary = summary_stream(cfg, out, err);
    const auto last = static_cast<Eigen::Index>(path.computed - 1);
    summary << "nodes: " << path.computed << '\n' << "final S:";
    for (Eigen::Index i = 0; i < path.S.cols(); ++i) summary << ' ' << format_double(path.S(last, i));
    summary << '\n' << "min S: " << format_double(path.S.minCoeff()) << '\n';
    summary << "jumps: " << r.total_events() << '\n';

    if (options.check_oracle) {
      const auto exact = exact_frozen_solution(s, r, path.times);
      double worst = 0.0;
      for (std::size_t k = 0; k < exact.size(); ++k) {
        for (Eigen::Index i = 0; i < s.dim(); ++i) {
          const double ref = exact[k](i);
          const double dev = std::abs(path.S(static_cast<Eigen::Index>(k), i) - ref);
          worst = std::max(worst, ref != 0.0 ? dev / std::abs(ref) : dev);
        }
      }
      summary << "oracle max relative deviation: " << format_double(worst) << '\n';
      if (!(worst <= 1e-12)) {
        err << "oracle deviation exceeds 1e-12\n";
        return static_cast<int>(kRuntimeFailure);
      }
    }
    return static_cast<int>(kSuccess);
  });
}

int cmd_converge(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load(options);
    if (auto stop = gate(cfg, options, err)) return *stop;
    McOptions mc{cfg.seed, cfg.n_paths, options.threads};
    ConvergenceReport report = coupled_strong_error(cfg.scenario, cfg.fine_m, cfg.coarse_m, cfg.p, mc);
    report.scenario_hash = cfg.scenario_hash;
    emit(cfg, cfg.format == OutputFormat::Csv ? to_csv(report) : to_json(report).dump(2) + "\n",
         out);
    auto& summary = summary_stream(cfg, out, err);
    double largest = 0.0;
    for (const auto& level : report.levels) largest = std::max(largest, level.error);
    if (report.fit.exact) {
      summary << "all errors are zero: scheme exact for this scenario\n";
    } else if (largest <= 1e-12) {
      // exact up to rounding; a slope through noise means nothing
      summary << "all errors at rounding level (max " << format_double(largest)
              << "): scheme exact for this scenario\n";
    } else {
      summary << "fitted slope: " << format_double(report.fit.slope) << '\n';
    }
    return static_cast<int>(kSuccess);
  });
}

int cmd_audit(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load(options);
    const AssumptionReport validation = validate_assumptions(cfg.scenario, cfg.q);
    if (!validation.all_pass()) {
      err << "assumption validation failed: " << join(validation.failures()) << '\n';
      return static_cast<int>(kValidationFailure);
    }
    const Grid grid = build_grid(cfg.scenario.b, cfg.scenario.T, cfg.m);
    AuditRecord rec = positivity_audit(cfg.scenario, grid, {cfg.seed, cfg.n_paths, options.threads});
    rec.scenario_hash = cfg.scenario_hash;
    emit(cfg, to_json(rec).dump(2) + "\n", out);
    auto& summary = summary_stream(cfg, out, err);
    summary << "positivity margin: " << format_double(validation.positivity_margin) << '\n'
            << "negative entries: " << rec.negative_count << " of " << rec.entries << '\n'
            << "min S: " << format_double(rec.min_value) << '\n'
            << "median path minimum: " << format_double(rec.path_minima.median) << '\n';
    if (rec.first_breach) {
      summary << "positivity breach on path " << rec.first_breach->path_index << ": "
              << rec.first_breach->message << '\n';
    }
    return static_cast<int>(rec.clean() ? kSuccess : kRuntimeFailure);
  });
}

int cmd_validate(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load(options);
    const AssumptionReport report = validate_assumptions(cfg.scenario, cfg.q);
    emit(cfg, to_json(report).dump(2) + "\n", out);
    if (!report.all_pass()) {
      err << "failed: " << join(report.failures()) << '\n';
      return static_cast<int>(kValidationFailure);
    }
    return static_cast<int>(kSuccess);
  });
}

}  // namespace logem::cli
