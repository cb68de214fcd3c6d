#include "logem/scheme.hpp"

#include <cmath>
#include <sstream>

#include "logem/errors.hpp"
#include "logem/format.hpp"

namespace logem {
namespace {

std::string describe_node(std::size_t k, double t) {
  return "node " + std::to_string(k) + " (t=" + format_double(t) + ")";
}

void check_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) fail(ErrorKind::Overflow, std::string(what) + " became non-finite");
}

}  // namespace

Grid::Grid(double b, double T, int m) : b_(b), T_(T), m_(m) {
  if (!(b > 0.0) || !std::isfinite(b)) fail(ErrorKind::Configuration, "delay b must be > 0");
  if (!(T > 0.0) || !std::isfinite(T)) fail(ErrorKind::Configuration, "horizon T must be > 0");
  if (m < 1) fail(ErrorKind::Configuration, "m must be >= 1");
  delta_ = b / m;
  if (!(delta_ < b)) {
    fail(ErrorKind::Configuration,
         "step b/m = " + format_double(delta_) + " must satisfy Δ < b (m >= 2)");
  }
  if (!(delta_ < 1.0)) {
    fail(ErrorKind::Configuration,
         "step b/m = " + format_double(delta_) + " violates the Δ < 1 requirement");
  }
  // Snap T/Δ to an integer when it is one up to rounding.
  const double ratio = T * m / b;
  const double nearest = std::round(ratio);
  steps_ = static_cast<std::size_t>(std::abs(ratio - nearest) <= 1e-9 * ratio ? nearest
                                                                               : std::ceil(ratio));
  steps_ = std::max<std::size_t>(steps_, 1);
}

double Grid::time(std::size_t k) const {
  if (k >= steps_) return T_;
  return static_cast<double>(k) * b_ / m_;
}

double Grid::history_time(std::size_t j) const {
  return (static_cast<double>(j) - m_) * b_ / m_;
}

Grid build_grid(double b, double T, int m) { return Grid(b, T, m); }

Vector delayed_state(const SolutionPath& path, const Grid& grid, std::size_t k) {
  const auto m = static_cast<std::size_t>(grid.m());
  if (k <= m) {
    if (k >= static_cast<std::size_t>(path.history.rows())) {
      fail(ErrorKind::Sequencing, "history node " + std::to_string(k) + " missing");
    }
    return path.history.row(static_cast<Eigen::Index>(k)).transpose();
  }
  if (k - m >= path.computed) {
    fail(ErrorKind::Sequencing, "delayed node " + std::to_string(k - m) +
                                    " requested before it was computed");
  }
  return path.S.row(static_cast<Eigen::Index>(k - m)).transpose();
}

Vector x_step(const Vector& x, const Vector& delayed,
              std::span<const std::span<const JumpEvent>> events, double dt,
              const CoefficientField& field) {
  const Eigen::Index d = field.dim();
  if (x.size() != d || static_cast<Eigen::Index>(events.size()) != d) {
    fail(ErrorKind::Usage, "x_step: dimension mismatch");
  }
  if (!x.allFinite()) fail(ErrorKind::NumericInput, "x_step: X is not finite");
  const Matrix g = evaluate_g(field, delayed);
  Vector out(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double exponent = field.f(i, i)(delayed) * dt;
    for (Eigen::Index j = 0; j < d; ++j) {
      for (const auto& e : events[static_cast<std::size_t>(j)]) {
        const double gz = g(i, j) * e.mark;
        if (!(1.0 + gz > 0.0)) {
          fail(ErrorKind::PositivityBreach,
               "1 + g*z <= 0 at i=" + std::to_string(i) + ", j=" + std::to_string(j) +
                   ", z=" + format_double(e.mark) + ", g_ij=" + format_double(g(i, j)));
        }
        exponent += std::log1p(gz);
      }
    }
    out(i) = x(i) * std::exp(exponent);
  }
  check_finite(out, "X");
  return out;
}

Vector p_step(const Vector& p, const Vector& delayed, double dt, const CoefficientField& field) {
  if (!p.allFinite()) fail(ErrorKind::NumericInput, "p_step: p is not finite");
  const Matrix F = off_diagonal_matrix(field, delayed);
  Vector out = p + dt * (F * p);
  check_finite(out, "p");
  return out;
}

Vector compose(const Vector& p, const Vector& x) { return p.cwiseProduct(x); }

SolutionPath simulate(const Scenario& scenario, const Grid& grid,
                      const JumpRealization& realization) {
  const Eigen::Index d = scenario.dim();
  if (static_cast<Eigen::Index>(realization.components()) != d) {
    fail(ErrorKind::Usage, "realization has " + std::to_string(realization.components()) +
                               " components, scenario has " + std::to_string(d));
  }
  if (realization.horizon() < grid.horizon()) {
    fail(ErrorKind::Usage, "realization horizon is shorter than the grid horizon");
  }
  if (grid.delay() != scenario.b) fail(ErrorKind::Usage, "grid delay differs from scenario b");

  const auto m = static_cast<std::size_t>(grid.m());
  const auto nodes = static_cast<Eigen::Index>(grid.nodes());

  SolutionPath path;
  path.realization_fingerprint = realization.fingerprint();
  path.history_times.resize(m + 1);
  path.history.resize(static_cast<Eigen::Index>(m + 1), d);
  for (std::size_t j = 0; j <= m; ++j) {
    path.history_times[j] = grid.history_time(j);
    path.history.row(static_cast<Eigen::Index>(j)) = scenario.phi_at(path.history_times[j]);
  }
  path.times.resize(grid.nodes());
  for (std::size_t k = 0; k < grid.nodes(); ++k) path.times[k] = grid.time(k);
  path.X.resize(nodes, d);
  path.p.resize(nodes, d);
  path.S.resize(nodes, d);

  Vector x = scenario.phi_at(0.0);
  Vector p = Vector::Ones(d);
  path.X.row(0) = x;
  path.p.row(0) = p;
  path.S.row(0) = compose(p, x);
  path.computed = 1;

  std::vector<std::span<const JumpEvent>> step_events(static_cast<std::size_t>(d));
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const double t0 = path.times[k];
    const double t1 = path.times[k + 1];
    try {
      const Vector delayed = delayed_state(path, grid, k);
      for (Eigen::Index j = 0; j < d; ++j) {
        step_events[static_cast<std::size_t>(j)] =
            events_in(realization, static_cast<std::size_t>(j), t0, t1);
      }
      x = x_step(x, delayed, step_events, t1 - t0, scenario.field);
      p = p_step(p, delayed, t1 - t0, scenario.field);
    } catch (const Error& e) {
      throw e.with_context(describe_node(k, t0));
    }
    const auto row = static_cast<Eigen::Index>(k + 1);
    path.X.row(row) = x;
    path.p.row(row) = p;
    path.S.row(row) = compose(p, x);
    path.computed = k + 2;
  }
  return path;
}

Vector interpolate(const Scenario& scenario, const Grid& grid, const SolutionPath& path,
                   const JumpRealization& realization, double t) {
  if (!(t >= 0.0) || t > grid.horizon()) fail(ErrorKind::Usage, "interpolate: t outside [0, T]");
  if (path.computed != grid.nodes()) fail(ErrorKind::Usage, "interpolate: path is incomplete");
  // step k with t in [t_k, t_{k+1})
  auto k = std::min(static_cast<std::size_t>(t / grid.delta()), grid.steps() - 1);
  while (k > 0 && path.times[k] > t) --k;
  while (k + 1 < grid.steps() && path.times[k + 1] <= t) ++k;
  const double tk = path.times[k];
  if (t == tk) return path.S.row(static_cast<Eigen::Index>(k)).transpose();

  const Eigen::Index d = scenario.dim();
  const Vector delayed = delayed_state(path, grid, k);
  std::vector<std::span<const JumpEvent>> ev(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    ev[static_cast<std::size_t>(j)] = events_in(realization, static_cast<std::size_t>(j), tk, t);
  }
  const Vector xk = path.X.row(static_cast<Eigen::Index>(k)).transpose();
  const Vector pk = path.p.row(static_cast<Eigen::Index>(k)).transpose();
  return compose(p_step(pk, delayed, t - tk, scenario.field),
                 x_step(xk, delayed, ev, t - tk, scenario.field));
}

std::vector<Vector> exact_frozen_solution(const Scenario& scenario,
                                          const JumpRealization& realization,
                                          std::span<const double> times) {
  const auto f = scenario.field.constant_f();
  const auto g = scenario.field.constant_g();
  if (!f || !g) fail(ErrorKind::Unsupported, "exact oracle requires constant f and g");
  const Eigen::Index d = scenario.dim();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i != j && (*f)(i, j) != 0.0) {
        fail(ErrorKind::Unsupported, "exact oracle requires zero off-diagonal f");
      }
    }
  }
  if (static_cast<Eigen::Index>(realization.components()) != d) {
    fail(ErrorKind::Usage, "realization dimension mismatch");
  }
  std::vector<Vector> out;
  out.reserve(times.size());
  for (double t : times) {
    Vector s(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      double product = 1.0;
      for (Eigen::Index j = 0; j < d; ++j) {
        for (const auto& e : realization.events(static_cast<std::size_t>(j))) {
          if (e.time > t) break;
          const double factor = 1.0 + (*g)(i, j) * e.mark;
          if (!(factor > 0.0)) {
            fail(ErrorKind::PositivityBreach, "exact oracle: 1 + g*z <= 0");
          }
          product *= factor;
        }
      }
      s(i) = scenario.phi[static_cast<std::size_t>(i)].at_zero() * std::exp((*f)(i, i) * t) *
             product;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string path_to_csv(const SolutionPath& path) {
  std::ostringstream out;
  out << "time,component,X,p,S\n";
  for (std::size_t k = 0; k < path.computed; ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    for (Eigen::Index i = 0; i < path.S.cols(); ++i) {
      out << format_double(path.times[k]) << ',' << i << ',' << format_double(path.X(row, i))
          << ',' << format_double(path.p(row, i)) << ',' << format_double(path.S(row, i))
          << '\n';
    }
  }
  return out.str();
}

nlohmann::json path_to_json(const SolutionPath& path) {
  auto rows = nlohmann::json::array();
  for (std::size_t k = 0; k < path.computed; ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    for (Eigen::Index i = 0; i < path.S.cols(); ++i) {
      rows.push_back({{"time", path.times[k]}, {"component", i}, {"X", path.X(row, i)},
                      {"p", path.p(row, i)}, {"S", path.S(row, i)}});
    }
  }
  return rows;
}

}  // namespace logem
