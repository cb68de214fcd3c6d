#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "logem/scenario.hpp"

namespace logem {

struct EntryConstants {
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  double lower = 0.0;
  double upper = 0.0;
  double lipschitz = 0.0;
};

struct MomentBound {
  double q = 0.0;
  double rho_q = 0.0;  // max over components of ∫ (1 + |z|)^q ν_j(dz)
  std::vector<double> per_component;
};

/// Quantitative checks of the regularity hypotheses behind positivity and
/// the strong rate. Flags are true only when the check holds.
struct AssumptionReport {
  // initial path: Hölder data and φ(0) > 0
  double holder_exponent = 0.5;
  double holder_constant = 0.0;
  double min_phi0 = 0.0;
  bool a1_pass = false;

  // coefficients: bounds and Lipschitz constants
  std::vector<EntryConstants> f_entries;
  std::vector<EntryConstants> g_entries;
  double rho = 0.0;  // max of |bounds| of f and Lipschitz constants of f, g
  bool a2_pass = false;

  // jump positivity: min over entries, g-range and mark support of 1 + z g
  double g_lower = 0.0;
  double g_upper = 0.0;
  double r = 0.0;  // R with mark space [-R, inf)
  double positivity_margin = 1.0;
  bool a3_pass = false;

  std::vector<MomentBound> moments;
  bool a4_pass = false;

  // positivity-mode hypotheses: off-diagonal f >= 0, φ(0) >= 0, margin > 0
  bool positivity_mode = false;
  double min_offdiag_f = 0.0;
  bool positivity_pass = true;

  bool all_pass() const {
    return a1_pass && a2_pass && a3_pass && a4_pass && positivity_pass;
  }
  /// Names of failed checks, e.g. {"A3", "positivity"}.
  std::vector<std::string> failures() const;
};

AssumptionReport validate_assumptions(const Scenario& scenario, const std::vector<double>& q_list);

nlohmann::json to_json(const AssumptionReport& report);

}  // namespace logem
