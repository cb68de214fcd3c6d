#pragma once

#include <variant>
#include <vector>

#include "logem/coefficients.hpp"
#include "logem/levy.hpp"

namespace logem {

struct ConstantPhi {
  double c = 1.0;
};

/// c0 + c1 * |t|^exponent on [-b, 0]; Hölder with constant |c1|.
struct HolderPolyPhi {
  double c0 = 1.0;
  double c1 = 0.0;
  double exponent = 0.5;
};

/// Initial path of one component on [-b, 0].
class InitialPath {
 public:
  using Family = std::variant<ConstantPhi, HolderPolyPhi>;

  InitialPath() = default;
  /// Throws ErrorKind::Configuration; the exponent must lie in [1/2, 1).
  explicit InitialPath(Family family);

  const Family& family() const noexcept { return family_; }
  double operator()(double t) const;
  double at_zero() const { return (*this)(0.0); }
  double holder_exponent() const;
  double holder_constant() const;

 private:
  Family family_ = ConstantPhi{1.0};
};

/// A full problem instance: dS_i = Σ_j f_ij(S(t-b)) S_j dt
///                                + S_i(t-) Σ_j g_ij(S(t-b)) dZ_j(t).
struct Scenario {
  double b = 1.0;  // delay
  double T = 1.0;  // horizon
  CoefficientField field;
  std::vector<InitialPath> phi;
  std::vector<LevyComponentSpec> levy;
  bool positivity_mode = true;

  Eigen::Index dim() const noexcept { return field.dim(); }
  Vector phi_at(double t) const;

  /// Structural invariants (b > 0, T > 0, sizes match d, and φ(0) > 0 in
  /// positivity mode). Throws ErrorKind::Configuration.
  void validate() const;
};

}  // namespace logem
