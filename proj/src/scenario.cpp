#include "logem/scenario.hpp"

#include <cmath>
#include <string>

#include "logem/errors.hpp"

namespace logem {

InitialPath::InitialPath(Family family) : family_(family) {
  if (const auto* c = std::get_if<ConstantPhi>(&family_)) {
    if (!std::isfinite(c->c)) fail(ErrorKind::Configuration, "constant.c must be finite");
    return;
  }
  const auto& h = std::get<HolderPolyPhi>(family_);
  if (!std::isfinite(h.c0) || !std::isfinite(h.c1)) {
    fail(ErrorKind::Configuration, "holder_poly.c0 and holder_poly.c1 must be finite");
  }
  if (!(h.exponent >= 0.5 && h.exponent < 1.0)) {
    fail(ErrorKind::Configuration, "holder_poly.exponent must lie in [0.5, 1)");
  }
}

double InitialPath::operator()(double t) const {
  if (const auto* c = std::get_if<ConstantPhi>(&family_)) return c->c;
  const auto& h = std::get<HolderPolyPhi>(family_);
  return h.c0 + h.c1 * std::pow(std::abs(t), h.exponent);
}

double InitialPath::holder_exponent() const {
  if (const auto* h = std::get_if<HolderPolyPhi>(&family_)) return h->exponent;
  return 0.5;  // constants are Hölder for every exponent
}

double InitialPath::holder_constant() const {
  if (const auto* h = std::get_if<HolderPolyPhi>(&family_)) return std::abs(h->c1);
  return 0.0;
}

Vector Scenario::phi_at(double t) const {
  Vector v(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) v(i) = phi[static_cast<std::size_t>(i)](t);
  return v;
}

void Scenario::validate() const {
  if (!(b > 0.0) || !std::isfinite(b)) fail(ErrorKind::Configuration, "b must be finite and > 0");
  if (!(T > 0.0) || !std::isfinite(T)) fail(ErrorKind::Configuration, "T must be finite and > 0");
  const auto d = static_cast<std::size_t>(dim());
  if (d < 1) fail(ErrorKind::Configuration, "d must be >= 1");
  if (phi.size() != d) {
    fail(ErrorKind::Configuration, "phi must have d = " + std::to_string(d) + " entries");
  }
  if (levy.size() != d) {
    fail(ErrorKind::Configuration, "levy must have d = " + std::to_string(d) + " entries");
  }
  for (std::size_t j = 0; j < d; ++j) {
    try {
      levy[j].validate();
    } catch (const Error& e) {
      throw e.with_context("levy[" + std::to_string(j) + "]");
    }
  }
  if (positivity_mode) {
    for (std::size_t i = 0; i < d; ++i) {
      if (!(phi[i].at_zero() > 0.0)) {
        fail(ErrorKind::Configuration,
             "phi[" + std::to_string(i) + "](0) must be > 0 in positivity mode");
      }
    }
  }
}

}  // namespace logem
