#include "logem/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "logem/errors.hpp"
#include "logem/format.hpp"
#include "logem/parallel.hpp"

namespace logem {
namespace {

/// Sample mean and standard error of the mean, accumulated in index order.
struct MeanStd {
  double mean = 0.0;
  double std_error = 0.0;
};

MeanStd mean_and_error(std::span<const double> values) {
  const auto n = static_cast<double>(values.size());
  if (values.empty()) return {};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

/// (E Y)^{1/p} and its delta-method standard error from samples of Y = e^p.
std::pair<double, double> pth_root(const MeanStd& moment, double p) {
  if (moment.mean <= 0.0) return {0.0, 0.0};
  const double root = std::pow(moment.mean, 1.0 / p);
  return {root, moment.std_error * root / (p * moment.mean)};
}

void require_levels(std::vector<int>& m_list, const char* what) {
  if (m_list.empty()) fail(ErrorKind::Configuration, std::string(what) + " must not be empty");
  std::sort(m_list.begin(), m_list.end());
  m_list.erase(std::unique(m_list.begin(), m_list.end()), m_list.end());
}

void require_paths(const McOptions& options) {
  if (options.n_paths == 0) fail(ErrorKind::Configuration, "n_paths must be >= 1");
}

std::vector<Grid> grids_for(const Scenario& scenario, std::span<const int> m_list) {
  std::vector<Grid> grids;
  for (int m : m_list) grids.push_back(build_grid(scenario.b, scenario.T, m));
  return grids;
}

double row_distance(const RowMatrix& a, std::size_t ra, const RowMatrix& b, std::size_t rb) {
  return (a.row(static_cast<Eigen::Index>(ra)) - b.row(static_cast<Eigen::Index>(rb))).norm();
}

double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

double from_finite_or_null(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

}  // namespace

FitResult fit_rate(std::span<const std::pair<double, double>> pairs) {
  FitResult fit;
  std::vector<double> lx, ly;
  for (const auto& [delta, err] : pairs) {
    if (!(delta > 0.0) || !std::isfinite(delta) || !(err >= 0.0) || !std::isfinite(err)) {
      fail(ErrorKind::Usage, "fit_rate needs Δ > 0 and finite errors >= 0");
    }
    if (err == 0.0) {
      ++fit.excluded;
      continue;
    }
    lx.push_back(std::log(delta));
    ly.push_back(std::log(err));
  }
  fit.used = lx.size();
  if (!pairs.empty() && fit.used == 0) {
    fit.exact = true;
    return fit;
  }
  if (fit.used < 2) {
    fail(ErrorKind::InsufficientData, "fit_rate needs at least 2 nonzero errors, got " +
                                          std::to_string(fit.used));
  }
  const double n = static_cast<double>(fit.used);
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) fail(ErrorKind::InsufficientData, "fit_rate needs at least 2 distinct Δ");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

ConvergenceReport coupled_strong_error(const Scenario& scenario, int fine_m,
                                       std::vector<int> coarse_m, double p,
                                       const McOptions& options) {
  scenario.validate();
  require_levels(coarse_m, "coarse m list");
  require_paths(options);
  if (!(p >= 2.0) || !std::isfinite(p)) fail(ErrorKind::Configuration, "p must be >= 2");
  for (int m : coarse_m) {
    if (m < 1 || fine_m % m != 0) {
      fail(ErrorKind::Configuration, "coarse m = " + std::to_string(m) +
                                         " does not divide fine m = " + std::to_string(fine_m) +
                                         " (grids must be nested)");
    }
  }
  if (fine_m < 8 * coarse_m.back()) {
    fail(ErrorKind::Configuration, "fine m must be at least 8 times the largest coarse m");
  }
  const Grid fine_grid = build_grid(scenario.b, scenario.T, fine_m);
  const std::vector<Grid> grids = grids_for(scenario, coarse_m);
  const std::size_t levels = grids.size();

  // per path: node-sup and augmented sup errors per level, raised to p
  std::vector<double> node_pow(options.n_paths * levels);
  std::vector<double> aug_pow(options.n_paths * levels);

  parallel_for(options.n_paths, options.threads, [&](std::size_t i) {
    const auto r = sample_jump_realization(scenario.levy, scenario.T, options.seed, i);
    const SolutionPath fine = simulate(scenario, fine_grid, r);
    for (std::size_t l = 0; l < levels; ++l) {
      const Grid& grid = grids[l];
      const SolutionPath coarse = simulate(scenario, grid, r);
      if (coarse.realization_fingerprint != fine.realization_fingerprint) {
        fail(ErrorKind::Sequencing, "coarse and fine paths saw different realizations");
      }
      const auto ratio = static_cast<std::size_t>(fine_m / grid.m());
      double sup = 0.0;
      for (std::size_t k = 0; k < grid.nodes(); ++k) {
        const std::size_t fk = (k == grid.steps()) ? fine_grid.steps() : k * ratio;
        sup = std::max(sup, row_distance(fine.S, fk, coarse.S, k));
      }
      double sup_aug = sup;
      for (std::size_t fk = 0; fk < fine_grid.nodes(); ++fk) {
        const Vector c = interpolate(scenario, grid, coarse, r, fine.times[fk]);
        sup_aug = std::max(sup_aug,
                           (fine.S.row(static_cast<Eigen::Index>(fk)).transpose() - c).norm());
      }
      node_pow[i * levels + l] = std::pow(sup, p);
      aug_pow[i * levels + l] = std::pow(sup_aug, p);
    }
  });

  ConvergenceReport report;
  report.p = p;
  report.seed = options.seed;
  report.fine_m = fine_m;
  std::vector<std::pair<double, double>> pairs;
  std::vector<double> column(options.n_paths);
  for (std::size_t l = 0; l < levels; ++l) {
    ConvergenceLevel level;
    level.m = grids[l].m();
    level.delta = grids[l].delta();
    level.n_paths = options.n_paths;
    for (std::size_t i = 0; i < options.n_paths; ++i) column[i] = node_pow[i * levels + l];
    std::tie(level.error, level.std_error) = pth_root(mean_and_error(column), p);
    for (std::size_t i = 0; i < options.n_paths; ++i) column[i] = aug_pow[i * levels + l];
    std::tie(level.error_augmented, level.std_error_augmented) =
        pth_root(mean_and_error(column), p);
    pairs.emplace_back(level.delta, level.error);
    report.levels.push_back(level);
  }
  report.fit = fit_rate(pairs);
  return report;
}

Vector deterministic_reference(const Scenario& scenario, double t) {
  const auto f = scenario.field.constant_f();
  if (!scenario.field.g_is_zero() || !f) {
    fail(ErrorKind::Unsupported, "deterministic reference requires g ≡ 0 and constant f");
  }
  if (!(t >= 0.0) || t > scenario.b) fail(ErrorKind::Usage, "deterministic reference needs t in [0, b]");
  Matrix F = *f;
  F.diagonal().setZero();
  const Vector p = (F * t).exp() * Vector::Ones(scenario.dim());
  const Vector x = (scenario.phi_at(0.0).array() * (f->diagonal().array() * t).exp()).matrix();
  return p.cwiseProduct(x);
}

std::vector<ReferenceErrorLevel> deterministic_reference_error(const Scenario& scenario,
                                                               std::span<const int> m_list) {
  scenario.validate();
  deterministic_reference(scenario, 0.0);  // precondition check
  const auto d = static_cast<std::size_t>(scenario.dim());
  Scenario sub = scenario;
  sub.T = std::min(scenario.T, scenario.b);
  const JumpRealization quiet(sub.T, std::vector<std::vector<JumpEvent>>(d));

  std::vector<ReferenceErrorLevel> out;
  for (int m : m_list) {
    const Grid grid = build_grid(sub.b, sub.T, m);
    const SolutionPath path = simulate(sub, grid, quiet);
    double sup = 0.0;
    for (std::size_t k = 0; k < grid.nodes(); ++k) {
      const Vector ref = deterministic_reference(sub, path.times[k]);
      sup = std::max(sup, (path.S.row(static_cast<Eigen::Index>(k)).transpose() - ref).norm());
    }
    out.push_back({m, grid.delta(), sup});
  }
  return out;
}

AuditRecord positivity_audit(const Scenario& scenario, const Grid& grid,
                             const McOptions& options) {
  scenario.validate();
  require_paths(options);
  struct PathResult {
    std::size_t negative = 0;
    std::size_t nonpositive = 0;
    double min = std::numeric_limits<double>::infinity();
    std::optional<std::string> breach;
  };
  std::vector<PathResult> results(options.n_paths);
  parallel_for(options.n_paths, options.threads, [&](std::size_t i) {
    const auto r = sample_jump_realization(scenario.levy, scenario.T, options.seed, i);
    PathResult& out = results[i];
    try {
      const SolutionPath path = simulate(scenario, grid, r);
      for (double v : path.S.reshaped()) {
        out.negative += v < 0.0;
        out.nonpositive += v <= 0.0;
        out.min = std::min(out.min, v);
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::PositivityBreach) throw;
      out.breach = e.what();
    }
  });

  AuditRecord rec;
  rec.n_paths = options.n_paths;
  rec.m = grid.m();
  rec.nodes = grid.nodes();
  rec.components = static_cast<std::size_t>(scenario.dim());
  rec.seed = options.seed;
  rec.min_value = std::numeric_limits<double>::infinity();
  std::vector<double> minima;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (r.breach) {
      ++rec.breached_paths;
      if (!rec.first_breach) rec.first_breach = PositivityBreachRecord{i, *r.breach};
      continue;
    }
    rec.entries += rec.nodes * rec.components;
    rec.negative_count += r.negative;
    rec.nonpositive_count += r.nonpositive;
    rec.min_value = std::min(rec.min_value, r.min);
    minima.push_back(r.min);
  }
  if (!minima.empty()) {
    const double mean = std::accumulate(minima.begin(), minima.end(), 0.0) /
                        static_cast<double>(minima.size());
    std::sort(minima.begin(), minima.end());
    rec.path_minima = {minima.front(), percentile(minima, 0.05), percentile(minima, 0.5),
                       percentile(minima, 0.95), minima.back(), mean};
  }
  return rec;
}

double MomentReport::max_min_ratio() const {
  if (levels.empty()) return 1.0;
  auto [lo, hi] = std::minmax_element(levels.begin(), levels.end(),
                                      [](const MomentLevel& a, const MomentLevel& b) {
                                        return a.estimate < b.estimate;
                                      });
  return hi->estimate / lo->estimate;
}

MomentReport moment_study(const Scenario& scenario, std::vector<int> m_list, double q,
                          const McOptions& options) {
  scenario.validate();
  if (!(q >= 1.0) || !std::isfinite(q)) fail(ErrorKind::Configuration, "q must be >= 1");
  require_levels(m_list, "m list");
  require_paths(options);
  const std::vector<Grid> grids = grids_for(scenario, m_list);
  const std::size_t levels = grids.size();
  std::vector<double> samples(options.n_paths * levels);
  parallel_for(options.n_paths, options.threads, [&](std::size_t i) {
    const auto r = sample_jump_realization(scenario.levy, scenario.T, options.seed, i);
    for (std::size_t l = 0; l < levels; ++l) {
      const SolutionPath path = simulate(scenario, grids[l], r);
      samples[i * levels + l] = std::pow(path.X.cwiseAbs().maxCoeff(), q);
    }
  });
  MomentReport report;
  report.q = q;
  report.seed = options.seed;
  std::vector<double> column(options.n_paths);
  for (std::size_t l = 0; l < levels; ++l) {
    for (std::size_t i = 0; i < options.n_paths; ++i) column[i] = samples[i * levels + l];
    const auto ms = mean_and_error(column);
    report.levels.push_back(
        {grids[l].m(), grids[l].delta(), q, ms.mean, ms.std_error, options.n_paths});
  }
  return report;
}

IncrementReport increment_scaling(const Scenario& scenario, std::vector<int> m_list, double p,
                                  const McOptions& options) {
  scenario.validate();
  if (!(p >= 2.0) || !std::isfinite(p)) fail(ErrorKind::Configuration, "p must be >= 2");
  require_levels(m_list, "m list");
  require_paths(options);
  const std::vector<Grid> grids = grids_for(scenario, m_list);
  const std::size_t levels = grids.size();
  // offsets of each level's per-step block inside one path's record
  std::vector<std::size_t> offset(levels + 1, 0);
  for (std::size_t l = 0; l < levels; ++l) offset[l + 1] = offset[l] + grids[l].steps();
  const std::size_t stride = offset.back();
  std::vector<double> steps(options.n_paths * stride);

  parallel_for(options.n_paths, options.threads, [&](std::size_t i) {
    const auto r = sample_jump_realization(scenario.levy, scenario.T, options.seed, i);
    for (std::size_t l = 0; l < levels; ++l) {
      const SolutionPath path = simulate(scenario, grids[l], r);
      for (std::size_t k = 0; k < grids[l].steps(); ++k) {
        steps[i * stride + offset[l] + k] = std::pow(row_distance(path.S, k + 1, path.S, k), p);
      }
    }
  });

  IncrementReport report;
  report.p = p;
  report.seed = options.seed;
  std::vector<std::pair<double, double>> pairs;
  std::vector<double> column(options.n_paths);
  std::vector<double> path_max(options.n_paths);
  for (std::size_t l = 0; l < levels; ++l) {
    IncrementLevel level;
    level.m = grids[l].m();
    level.delta = grids[l].delta();
    level.n_paths = options.n_paths;
    std::fill(path_max.begin(), path_max.end(), 0.0);
    double mean_sum = 0.0;
    for (std::size_t k = 0; k < grids[l].steps(); ++k) {
      for (std::size_t i = 0; i < options.n_paths; ++i) {
        column[i] = steps[i * stride + offset[l] + k];
        path_max[i] = std::max(path_max[i], column[i]);
      }
      const auto ms = mean_and_error(column);
      mean_sum += ms.mean;
      if (ms.mean > level.sup_step_moment || k == 0) {
        level.sup_step_moment = ms.mean;
        level.std_error = ms.std_error;
      }
    }
    level.mean_step_moment = mean_sum / static_cast<double>(grids[l].steps());
    level.expected_max = mean_and_error(path_max).mean;
    pairs.emplace_back(level.delta, level.sup_step_moment);
    report.levels.push_back(level);
  }
  report.fit = fit_rate(pairs);
  return report;
}

nlohmann::json to_json(const FitResult& fit) {
  return {{"exact", fit.exact},          {"slope", fit.slope}, {"intercept", fit.intercept},
          {"residual", fit.residual},    {"used", fit.used},   {"excluded", fit.excluded}};
}

nlohmann::json to_json(const ConvergenceReport& report) {
  auto levels = nlohmann::json::array();
  for (const auto& l : report.levels) {
    levels.push_back({{"m", l.m},
                      {"delta", l.delta},
                      {"n_paths", l.n_paths},
                      {"error", l.error},
                      {"stderr", l.std_error},
                      {"error_augmented", l.error_augmented},
                      {"stderr_augmented", l.std_error_augmented}});
  }
  return {{"levels", levels},
          {"fit", to_json(report.fit)},
          {"p", report.p},
          {"seed", report.seed},
          {"fine_m", report.fine_m},
          {"scenario_hash", report.scenario_hash}};
}

std::string to_csv(const ConvergenceReport& report) {
  std::ostringstream out;
  out << "delta,n_paths,p,error,stderr\n";
  for (const auto& l : report.levels) {
    out << format_double(l.delta) << ',' << l.n_paths << ',' << format_double(report.p) << ','
        << format_double(l.error) << ',' << format_double(l.std_error) << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const AuditRecord& r) {
  nlohmann::json breach = nullptr;
  if (r.first_breach) {
    breach = {{"path_index", r.first_breach->path_index}, {"message", r.first_breach->message}};
  }
  const auto& s = r.path_minima;
  return {{"n_paths", r.n_paths},
          {"m", r.m},
          {"nodes", r.nodes},
          {"components", r.components},
          {"entries", r.entries},
          {"negative_count", r.negative_count},
          {"nonpositive_count", r.nonpositive_count},
          {"min_value", finite_or_null(r.min_value)},
          {"path_minima",
           {{"min", s.min}, {"p05", s.p05}, {"median", s.median}, {"p95", s.p95},
            {"max", s.max}, {"mean", s.mean}}},
          {"breached_paths", r.breached_paths},
          {"first_breach", breach},
          {"seed", r.seed},
          {"scenario_hash", r.scenario_hash},
          {"clean", r.clean()}};
}

AuditRecord audit_from_json(const nlohmann::json& j) {
  AuditRecord r;
  r.n_paths = j.at("n_paths").get<std::size_t>();
  r.m = j.at("m").get<int>();
  r.nodes = j.at("nodes").get<std::size_t>();
  r.components = j.at("components").get<std::size_t>();
  r.entries = j.at("entries").get<std::size_t>();
  r.negative_count = j.at("negative_count").get<std::size_t>();
  r.nonpositive_count = j.at("nonpositive_count").get<std::size_t>();
  r.min_value = from_finite_or_null(j.at("min_value"));
  const auto& s = j.at("path_minima");
  r.path_minima = {s.at("min").get<double>(), s.at("p05").get<double>(),
                   s.at("median").get<double>(), s.at("p95").get<double>(),
                   s.at("max").get<double>(), s.at("mean").get<double>()};
  r.breached_paths = j.at("breached_paths").get<std::size_t>();
  if (!j.at("first_breach").is_null()) {
    const auto& b = j.at("first_breach");
    r.first_breach = PositivityBreachRecord{b.at("path_index").get<std::size_t>(),
                                            b.at("message").get<std::string>()};
  }
  r.seed = j.at("seed").get<std::uint64_t>();
  r.scenario_hash = j.at("scenario_hash").get<std::string>();
  return r;
}

nlohmann::json to_json(const MomentReport& report) {
  auto levels = nlohmann::json::array();
  for (const auto& l : report.levels) {
    levels.push_back({{"m", l.m}, {"delta", l.delta}, {"q", l.q}, {"estimate", l.estimate},
                      {"stderr", l.std_error}, {"n_paths", l.n_paths}});
  }
  return {{"levels", levels}, {"q", report.q}, {"seed", report.seed},
          {"max_min_ratio", report.max_min_ratio()}};
}

nlohmann::json to_json(const IncrementReport& report) {
  auto levels = nlohmann::json::array();
  for (const auto& l : report.levels) {
    levels.push_back({{"m", l.m},
                      {"delta", l.delta},
                      {"n_paths", l.n_paths},
                      {"sup_step_moment", l.sup_step_moment},
                      {"stderr", l.std_error},
                      {"mean_step_moment", l.mean_step_moment},
                      {"expected_max", l.expected_max}});
  }
  return {{"levels", levels}, {"fit", to_json(report.fit)}, {"p", report.p},
          {"seed", report.seed}};
}

}  // namespace logem
