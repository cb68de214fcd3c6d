#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "logem/coefficients.hpp"
#include "logem/errors.hpp"

using namespace logem;

namespace {

Vector e1(Eigen::Index d) {
  Vector w = Vector::Zero(d);
  w(0) = 1.0;
  return w;
}

CoefficientField uniform_field(Eigen::Index d, const ScalarField& f, const ScalarField& g) {
  return CoefficientField(d, std::vector<ScalarField>(d * d, f), std::vector<ScalarField>(d * d, g));
}

// largest singular value via power iteration on A^T A
double power_norm(const Matrix& a) {
  Vector v = Vector::Ones(a.cols()).normalized();
  double sigma = 0.0;
  for (int it = 0; it < 500; ++it) {
    Vector w = a.transpose() * (a * v);
    const double n = w.norm();
    if (n == 0.0) return 0.0;
    v = w / n;
    sigma = std::sqrt(n);
  }
  return sigma;
}

}  // namespace

TEST_CASE("evaluation examples") {
  const auto d = 3;
  const Vector x = Vector::Constant(d, 0.7);

  CHECK(evaluate_f(uniform_field(d, ScalarField(ConstantField{0.0}, d), ScalarField(ConstantField{0.0}, d)), x)
            .isZero(0.0));

  const ScalarField ones(BoundedAffineField{1.0, 0.0, -5.0, 5.0, e1(d)}, d);
  CHECK(evaluate_f(uniform_field(d, ones, ones), x).isApprox(Matrix::Ones(d, d)));

  const ScalarField sig(SigmoidField{0.0, 2.0, e1(d)}, d);
  const Matrix f = evaluate_f(uniform_field(d, sig, sig), Vector::Zero(d));
  CHECK(f(1, 2) == 1.0);

  const auto scalar = CoefficientField::constant(Matrix::Constant(1, 1, 0.3), Matrix::Constant(1, 1, 0.1));
  CHECK(evaluate_g(scalar, Vector::Constant(1, 5.0))(0, 0) == 0.1);

  // unclipped 0.1 + 0.5 * 1.6 = 0.9, clipped to 0.4
  const ScalarField clipped(BoundedAffineField{0.1, 0.5, -0.2, 0.4, e1(2)}, 2);
  CHECK(clipped(Vector::Constant(2, 1.6)) == 0.4);
}

TEST_CASE("off-diagonal matrix zeroes the diagonal") {
  Matrix fm(2, 2);
  fm << -0.5, 0.2, 0.1, -0.3;
  const auto field = CoefficientField::constant(fm, Matrix::Zero(2, 2));
  const Matrix off = off_diagonal_matrix(field, Vector::Ones(2));
  CHECK(off(0, 0) == 0.0);
  CHECK(off(1, 1) == 0.0);
  CHECK(off(0, 1) == 0.2);
  CHECK(off(1, 0) == 0.1);
  CHECK(field.g_is_zero());
  REQUIRE(field.constant_f());
  CHECK(field.constant_f()->isApprox(fm));
}

TEST_CASE("input errors") {
  const auto field = CoefficientField::constant(Matrix::Zero(2, 2), Matrix::Zero(2, 2));
  Vector bad = Vector::Zero(2);
  bad(1) = std::numeric_limits<double>::quiet_NaN();
  try {
    evaluate_f(field, bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NumericInput);
  }
  CHECK_THROWS_AS(evaluate_g(field, Vector::Zero(3)), Error);
  CHECK_THROWS_AS(ScalarField(BoundedAffineField{0.0, 1.0, 1.0, 0.0, e1(2)}, 2), Error);
  CHECK_THROWS_AS(ScalarField(SigmoidField{0.0, 1.0, e1(3)}, 2), Error);
  CHECK_THROWS_AS(operator_norm_bound(Matrix::Constant(2, 2, std::nan(""))), Error);
}

TEST_CASE("declared constants") {
  const ScalarField sig(SigmoidField{0.1, -0.4, Vector::Constant(2, 3.0)}, 2);
  CHECK(sig.lower_bound() == doctest::Approx(-0.3));
  CHECK(sig.upper_bound() == doctest::Approx(0.1));
  CHECK(sig.lipschitz() == doctest::Approx(0.25 * 0.4 * std::sqrt(18.0)));
  CHECK_FALSE(sig.constant_value());

  const ScalarField aff(BoundedAffineField{0.0, -2.0, -1.0, 0.5, Vector::Constant(2, 1.0)}, 2);
  CHECK(aff.lipschitz() == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(aff.lower_bound() == -1.0);

  const ScalarField flat(SigmoidField{0.2, 0.6, Vector::Zero(2)}, 2);
  REQUIRE(flat.constant_value());
  CHECK(*flat.constant_value() == doctest::Approx(0.5));
  CHECK(flat.lipschitz() == 0.0);
}

TEST_CASE("property: values respect bounds and Lipschitz constants") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::Index d = 1 + trial % 4;
    Vector w(d);
    for (auto& v : w) v = n01(gen);
    const double lo = coef(gen);
    const ScalarField fields[] = {
        ScalarField(BoundedAffineField{coef(gen), coef(gen), lo, lo + std::abs(coef(gen)), w}, d),
        ScalarField(SigmoidField{coef(gen), coef(gen), w}, d),
    };
    for (const auto& s : fields) {
      Vector x(d), y(d);
      for (auto& v : x) v = 3.0 * n01(gen);
      for (auto& v : y) v = 3.0 * n01(gen);
      const double fx = s(x);
      CHECK(fx >= s.lower_bound() - 1e-12);
      CHECK(fx <= s.upper_bound() + 1e-12);
      CHECK(std::abs(fx - s(y)) <= s.lipschitz() * (x - y).norm() + 1e-12);
    }
  }
}

TEST_CASE("property: norm bound dominates |I + M|") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> n01;
  for (Eigen::Index d = 1; d <= 6; ++d) {
    for (int trial = 0; trial < 100; ++trial) {
      Matrix m(d, d);
      for (auto& v : m.reshaped()) v = n01(gen);
      const Matrix a = Matrix::Identity(d, d) + m;
      CHECK(operator_norm_bound(m) + 1e-9 >= power_norm(a));
    }
  }
  CHECK(operator_norm_bound(Matrix::Zero(3, 3)) == 1.0);
}
