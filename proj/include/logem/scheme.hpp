#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "logem/levy.hpp"
#include "logem/scenario.hpp"

namespace logem {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Uniform partition of [0, T] with step b/m. The delay is an integer
/// number of steps, so t_k - b is node k - m (a history node when k <= m).
class Grid {
 public:
  Grid(double b, double T, int m);

  int m() const noexcept { return m_; }
  double delay() const noexcept { return b_; }
  double horizon() const noexcept { return T_; }
  double delta() const noexcept { return delta_; }
  /// Number of steps; node indices run 0..steps().
  std::size_t steps() const noexcept { return steps_; }
  std::size_t nodes() const noexcept { return steps_ + 1; }

  /// t_k = k b / m, except the final node which is exactly T.
  double time(std::size_t k) const;
  double step(std::size_t k) const { return time(k + 1) - time(k); }
  /// History node j = 0..m at -b + j b / m.
  double history_time(std::size_t j) const;

 private:
  double b_;
  double T_;
  int m_;
  double delta_;
  std::size_t steps_;
};

/// Throws ErrorKind::Configuration when m < 2 (Δ < b) or Δ >= 1.
Grid build_grid(double b, double T, int m);

/// Grid-indexed scheme output, one row per node.
struct SolutionPath {
  std::vector<double> times;
  RowMatrix X;
  RowMatrix p;
  RowMatrix S;
  std::vector<double> history_times;
  RowMatrix history;  // φ sampled at history nodes
  std::uint64_t realization_fingerprint = 0;
  std::size_t computed = 0;  // rows of X, p, S filled so far
};

/// v₂ on [t_k, t_{k+1}): φ(t_k - b) when k <= m, else S at node k - m.
Vector delayed_state(const SolutionPath& path, const Grid& grid, std::size_t k);

/// Exponential step for X with coefficients frozen at `delayed`:
/// X_i <- X_i exp(f_ii dt + Σ_j Σ_{z in events[j]} ln(1 + g_ij z)).
Vector x_step(const Vector& x, const Vector& delayed,
              std::span<const std::span<const JumpEvent>> events, double dt,
              const CoefficientField& field);

/// p <- (F(delayed) dt + I) p
Vector p_step(const Vector& p, const Vector& delayed, double dt, const CoefficientField& field);

Vector compose(const Vector& p, const Vector& x);

/// Runs the scheme over every node of `grid`, driven by `realization`.
/// Errors carry the failing node index and time.
SolutionPath simulate(const Scenario& scenario, const Grid& grid,
                      const JumpRealization& realization);

/// Continuous interpolation of a computed path at t in [0, T]: within a step
/// X follows the per-jump exponential form and p the linear form.
Vector interpolate(const Scenario& scenario, const Grid& grid, const SolutionPath& path,
                   const JumpRealization& realization, double t);

/// Closed-form solution for constant f, g with zero off-diagonal f:
/// S_i(t) = φ_i(0) e^{f_ii t} Π_j Π_{events u <= t} (1 + g_ij z).
std::vector<Vector> exact_frozen_solution(const Scenario& scenario,
                                          const JumpRealization& realization,
                                          std::span<const double> times);

/// CSV with header `time,component,X,p,S`, time-major, 17 significant digits.
std::string path_to_csv(const SolutionPath& path);
nlohmann::json path_to_json(const SolutionPath& path);

}  // namespace logem
