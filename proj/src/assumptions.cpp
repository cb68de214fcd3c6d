#include "logem/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "logem/errors.hpp"

namespace logem {
namespace {

// 1 + z g at a corner of the (z, g) box; z may be +inf.
double corner(double z, double g) {
  if (g == 0.0) return 1.0;
  if (std::isinf(z)) return g > 0.0 ? std::numeric_limits<double>::infinity()
                                    : -std::numeric_limits<double>::infinity();
  return 1.0 + z * g;
}

EntryConstants constants_of(const ScalarField& s, Eigen::Index i, Eigen::Index j) {
  EntryConstants c{i, j, s.lower_bound(), s.upper_bound(), s.lipschitz()};
  if (!std::isfinite(c.lower) || !std::isfinite(c.upper) || !std::isfinite(c.lipschitz)) {
    fail(ErrorKind::ValidationUnsupported,
         "no closed-form bound/Lipschitz constants for entry (" + std::to_string(i) + ", " +
             std::to_string(j) + ")");
  }
  return c;
}

}  // namespace

std::vector<std::string> AssumptionReport::failures() const {
  std::vector<std::string> out;
  if (!a1_pass) out.emplace_back("A1");
  if (!a2_pass) out.emplace_back("A2");
  if (!a3_pass) out.emplace_back("A3");
  if (!a4_pass) out.emplace_back("A4");
  if (!positivity_pass) out.emplace_back("positivity");
  return out;
}

AssumptionReport validate_assumptions(const Scenario& scenario, const std::vector<double>& q_list) {
  scenario.validate();
  AssumptionReport rep;
  const Eigen::Index d = scenario.dim();
  const auto& field = scenario.field;

  rep.holder_exponent = 1.0;
  rep.min_phi0 = std::numeric_limits<double>::infinity();
  for (const auto& phi : scenario.phi) {
    rep.holder_exponent = std::min(rep.holder_exponent, phi.holder_exponent());
    rep.holder_constant = std::max(rep.holder_constant, phi.holder_constant());
    rep.min_phi0 = std::min(rep.min_phi0, phi.at_zero());
  }
  rep.a1_pass = rep.min_phi0 > 0.0 && rep.holder_exponent >= 0.5 && rep.holder_exponent < 1.0 &&
                std::isfinite(rep.holder_constant);

  rep.g_lower = std::numeric_limits<double>::infinity();
  rep.g_upper = -std::numeric_limits<double>::infinity();
  rep.min_offdiag_f = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto fc = constants_of(field.f(i, j), i, j);
      const auto gc = constants_of(field.g(i, j), i, j);
      rep.rho = std::max({rep.rho, std::abs(fc.lower), std::abs(fc.upper), fc.lipschitz,
                          gc.lipschitz});
      rep.g_lower = std::min(rep.g_lower, gc.lower);
      rep.g_upper = std::max(rep.g_upper, gc.upper);
      if (i != j) rep.min_offdiag_f = std::min(rep.min_offdiag_f, fc.lower);
      rep.f_entries.push_back(fc);
      rep.g_entries.push_back(gc);
    }
  }
  if (d == 1) rep.min_offdiag_f = 0.0;
  rep.a2_pass = std::isfinite(rep.rho);

  // Only components that can jump constrain the margin. 1 + z g is bilinear
  // in (z, g), so its minimum over the box is attained at a corner.
  rep.positivity_margin = 1.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto& spec = scenario.levy[static_cast<std::size_t>(j)];
    rep.r = std::max(rep.r, -spec.law.r_neg());
    if (spec.rate == 0.0) continue;
    const double zlo = spec.law.support_min();
    const double zhi = spec.law.support_max();
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto& g = field.g(i, j);
      for (double z : {zlo, zhi}) {
        for (double gv : {g.lower_bound(), g.upper_bound()}) {
          rep.positivity_margin = std::min(rep.positivity_margin, corner(z, gv));
        }
      }
    }
  }
  rep.a3_pass = rep.positivity_margin > 0.0;

  rep.a4_pass = true;
  for (double q : q_list) {
    MomentBound mb{q, 0.0, {}};
    for (const auto& spec : scenario.levy) {
      const double v = moment_integral(spec.law, spec.rate, q);
      mb.per_component.push_back(v);
      mb.rho_q = std::max(mb.rho_q, v);
    }
    rep.a4_pass = rep.a4_pass && std::isfinite(mb.rho_q);
    rep.moments.push_back(std::move(mb));
  }

  rep.positivity_mode = scenario.positivity_mode;
  rep.positivity_pass = !scenario.positivity_mode ||
                        (rep.min_offdiag_f >= 0.0 && rep.min_phi0 >= 0.0 && rep.a3_pass);
  return rep;
}

nlohmann::json to_json(const AssumptionReport& r) {
  auto entries = [](const std::vector<EntryConstants>& v) {
    auto out = nlohmann::json::array();
    for (const auto& e : v) {
      out.push_back({{"i", e.i}, {"j", e.j}, {"lower", e.lower}, {"upper", e.upper},
                     {"lipschitz", e.lipschitz}});
    }
    return out;
  };
  auto moments = nlohmann::json::array();
  for (const auto& m : r.moments) {
    moments.push_back({{"q", m.q}, {"rho_q", m.rho_q}, {"per_component", m.per_component}});
  }
  return {
      {"A1", {{"pass", r.a1_pass}, {"holder_exponent", r.holder_exponent},
              {"holder_constant", r.holder_constant}, {"min_phi0", r.min_phi0}}},
      {"A2", {{"pass", r.a2_pass}, {"rho", r.rho}, {"f", entries(r.f_entries)},
              {"g", entries(r.g_entries)}}},
      {"A3", {{"pass", r.a3_pass}, {"g_lower", r.g_lower}, {"g_upper", r.g_upper},
              {"R", r.r}, {"positivity_margin", r.positivity_margin}}},
      {"A4", {{"pass", r.a4_pass}, {"moments", moments}}},
      {"positivity", {{"mode", r.positivity_mode}, {"pass", r.positivity_pass},
                      {"min_offdiag_f", r.min_offdiag_f}}},
      {"pass", r.all_pass()},
      {"failures", r.failures()},
  };
}

}  // namespace logem
