#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "logem/scheme.hpp"

namespace logem {

/// Monte Carlo controls. Path i always uses stream i of `seed`.
struct McOptions {
  std::uint64_t seed = 0;
  std::size_t n_paths = 1000;
  unsigned threads = 0;  // 0: available parallelism
};

/// Least squares on (log Δ, log error). `exact` is set when every error is
/// zero; slope and intercept are then meaningless.
struct FitResult {
  bool exact = false;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of log-space residuals
  std::size_t used = 0;
  std::size_t excluded = 0;  // zero-error pairs dropped
};

FitResult fit_rate(std::span<const std::pair<double, double>> pairs);

struct ConvergenceLevel {
  int m = 0;
  double delta = 0.0;
  std::size_t n_paths = 0;
  double error = 0.0;  // (E sup_nodes |S_fine - S_coarse|^p)^{1/p}
  double std_error = 0.0;
  /// Same with the coarse continuous interpolation compared on every fine
  /// node, which also sees jumps strictly inside coarse steps.
  double error_augmented = 0.0;
  double std_error_augmented = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceLevel> levels;  // decreasing Δ
  FitResult fit;
  double p = 2.0;
  std::uint64_t seed = 0;
  int fine_m = 0;
  std::string scenario_hash;
};

/// Coupled coarse/fine strong-error study. Every coarse m must divide
/// fine_m and fine_m >= 8 * max(coarse m).
ConvergenceReport coupled_strong_error(const Scenario& scenario, int fine_m,
                                       std::vector<int> coarse_m, double p,
                                       const McOptions& options);

struct ReferenceErrorLevel {
  int m = 0;
  double delta = 0.0;
  double error = 0.0;
};

/// Split-system flow for g ≡ 0 and constant f on [0, b]:
/// p(t) = e^{F t} 1, X_i(t) = φ_i(0) e^{f_ii t}, returned as p ⊙ X.
Vector deterministic_reference(const Scenario& scenario, double t);

/// Sup-node error of the scheme on [0, min(T, b)] against deterministic_reference.
std::vector<ReferenceErrorLevel> deterministic_reference_error(const Scenario& scenario,
                                                               std::span<const int> m_list);

struct PositivityBreachRecord {
  std::size_t path_index = 0;
  std::string message;

  friend bool operator==(const PositivityBreachRecord&, const PositivityBreachRecord&) = default;
};

struct MinimaSummary {
  double min = 0.0;
  double p05 = 0.0;
  double median = 0.0;
  double p95 = 0.0;
  double max = 0.0;
  double mean = 0.0;

  friend bool operator==(const MinimaSummary&, const MinimaSummary&) = default;
};

struct AuditRecord {
  std::size_t n_paths = 0;
  int m = 0;
  std::size_t nodes = 0;
  std::size_t components = 0;
  std::size_t entries = 0;  // node-component values inspected
  std::size_t negative_count = 0;
  std::size_t nonpositive_count = 0;
  double min_value = 0.0;
  MinimaSummary path_minima;
  std::size_t breached_paths = 0;
  std::optional<PositivityBreachRecord> first_breach;
  std::uint64_t seed = 0;
  std::string scenario_hash;

  bool clean() const { return negative_count == 0 && breached_paths == 0; }
  friend bool operator==(const AuditRecord&, const AuditRecord&) = default;
};

AuditRecord positivity_audit(const Scenario& scenario, const Grid& grid,
                             const McOptions& options);

struct MomentLevel {
  int m = 0;
  double delta = 0.0;
  double q = 0.0;
  double estimate = 0.0;  // E[max_i sup_k |X_i(t_k)|^q]
  double std_error = 0.0;
  std::size_t n_paths = 0;
};

struct MomentReport {
  std::vector<MomentLevel> levels;
  double q = 0.0;
  std::uint64_t seed = 0;

  double max_min_ratio() const;
};

MomentReport moment_study(const Scenario& scenario, std::vector<int> m_list, double q,
                          const McOptions& options);

struct IncrementLevel {
  int m = 0;
  double delta = 0.0;
  std::size_t n_paths = 0;
  /// max_k E|S(t_{k+1}) - S(t_k)|^p, the fitted quantity
  double sup_step_moment = 0.0;
  double std_error = 0.0;
  double mean_step_moment = 0.0;  // average over k of E|ΔS_k|^p
  double expected_max = 0.0;      // E max_k |ΔS_k|^p (diagnostic)
};

struct IncrementReport {
  std::vector<IncrementLevel> levels;
  FitResult fit;
  double p = 2.0;
  std::uint64_t seed = 0;
};

IncrementReport increment_scaling(const Scenario& scenario, std::vector<int> m_list, double p,
                                  const McOptions& options);

nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const ConvergenceReport& report);
/// Columns delta,n_paths,p,error,stderr.
std::string to_csv(const ConvergenceReport& report);
nlohmann::json to_json(const AuditRecord& record);
AuditRecord audit_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MomentReport& report);
nlohmann::json to_json(const IncrementReport& report);

}  // namespace logem
