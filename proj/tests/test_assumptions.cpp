#include <doctest.h>

#include <algorithm>

#include "logem/assumptions.hpp"
#include "logem/errors.hpp"

using namespace logem;

namespace {

Scenario pair_with(const Matrix& f, const Matrix& g, JumpLaw law) {
  Scenario s;
  s.b = 1.0;
  s.T = 2.0;
  s.field = CoefficientField::constant(f, g);
  s.phi = {InitialPath(ConstantPhi{1.0}), InitialPath(HolderPolyPhi{2.0, 0.5, 0.75})};
  s.levy = {{1.0, law}, {1.0, law}};
  return s;
}

}  // namespace

TEST_CASE("zero g passes A3 with margin 1") {
  const auto rep = validate_assumptions(
      pair_with(Matrix::Zero(2, 2), Matrix::Zero(2, 2), JumpLaw(UniformLaw{-5.0, 5.0})), {2.0});
  CHECK(rep.a3_pass);
  CHECK(rep.positivity_margin == 1.0);
  CHECK(rep.all_pass());
}

TEST_CASE("interval arithmetic margin") {
  const auto rep = validate_assumptions(
      pair_with(Matrix::Zero(2, 2), Matrix::Constant(2, 2, 0.1), JumpLaw(UniformLaw{-0.5, 0.5})),
      {2.0});
  CHECK(rep.positivity_margin == doctest::Approx(0.95));
  CHECK(rep.a3_pass);
  CHECK(rep.r == 0.5);
}

TEST_CASE("state-dependent g uses its range") {
  Scenario s = pair_with(Matrix::Zero(2, 2), Matrix::Zero(2, 2), JumpLaw(UniformLaw{-0.5, 1.0}));
  const ScalarField sig(SigmoidField{-0.4, 0.8, Vector::Constant(2, 1.0)}, 2);
  const ScalarField zero(ConstantField{0.0}, 2);
  s.field = CoefficientField(2, {zero, zero, zero, zero}, {sig, zero, zero, zero});
  const auto rep = validate_assumptions(s, {2.0});
  CHECK(rep.g_lower == doctest::Approx(-0.4));
  CHECK(rep.g_upper == doctest::Approx(0.4));
  // worst corner: g = -0.4 at z = 1
  CHECK(rep.positivity_margin == doctest::Approx(0.6));
  CHECK(rep.rho == doctest::Approx(0.25 * 0.8 * std::sqrt(2.0)));
}

TEST_CASE("margin failure and unbounded marks") {
  const auto crossing = validate_assumptions(
      pair_with(Matrix::Zero(2, 2), Matrix::Constant(2, 2, 2.5), JumpLaw(UniformLaw{-0.5, 0.5})),
      {2.0});
  CHECK_FALSE(crossing.a3_pass);
  CHECK(crossing.positivity_margin == doctest::Approx(-0.25));
  const auto fails = crossing.failures();
  CHECK(std::find(fails.begin(), fails.end(), "A3") != fails.end());

  // negative g against unbounded positive marks can always cross zero
  const auto tail = validate_assumptions(
      pair_with(Matrix::Zero(2, 2), Matrix::Constant(2, 2, -0.1),
                JumpLaw(ShiftedExponentialLaw{1.0, 0.0})),
      {2.0});
  CHECK_FALSE(tail.a3_pass);
}

TEST_CASE("negative off-diagonal f fails in positivity mode only") {
  Scenario s = pair_with(Matrix::Zero(2, 2), Matrix::Zero(2, 2), JumpLaw(UniformLaw{-0.5, 0.5}));
  const ScalarField zero(ConstantField{0.0}, 2);
  const ScalarField off(BoundedAffineField{0.0, 1.0, -1.0, 1.0, Vector::Constant(2, 1.0)}, 2);
  s.field = CoefficientField(2, {zero, off, zero, zero}, {zero, zero, zero, zero});
  const auto rep = validate_assumptions(s, {2.0});
  CHECK(rep.min_offdiag_f == -1.0);
  CHECK_FALSE(rep.positivity_pass);
  CHECK(rep.failures() == std::vector<std::string>{"positivity"});

  s.positivity_mode = false;
  CHECK(validate_assumptions(s, {2.0}).all_pass());
}

TEST_CASE("moment bounds and Hölder data") {
  const auto rep = validate_assumptions(
      pair_with(Matrix::Zero(2, 2), Matrix::Zero(2, 2), JumpLaw(UniformLaw{-0.5, 0.5})),
      {2.0, 4.0});
  REQUIRE(rep.moments.size() == 2);
  CHECK(rep.moments[0].rho_q == doctest::Approx(19.0 / 12.0));
  CHECK(rep.moments[1].per_component.size() == 2);
  CHECK(rep.holder_exponent == 0.5);
  CHECK(rep.holder_constant == 0.5);
  CHECK(rep.min_phi0 == 1.0);
  const auto j = to_json(rep);
  CHECK(j["pass"] == true);
  CHECK(j["A3"]["positivity_margin"] == 1.0);
}
