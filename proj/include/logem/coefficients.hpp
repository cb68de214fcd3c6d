#pragma once

#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace logem {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct ConstantField {
  double c = 0.0;
};

/// clamp(c0 + c1 * <w, x>, clip_lo, clip_hi)
struct BoundedAffineField {
  double c0 = 0.0;
  double c1 = 0.0;
  double clip_lo = 0.0;
  double clip_hi = 0.0;
  Vector w;
};

/// c0 + amplitude * logistic(<w, x>)
struct SigmoidField {
  double c0 = 0.0;
  double amplitude = 0.0;
  Vector w;
};

/// One scalar entry f_ij or g_ij : R^d -> R.
class ScalarField {
 public:
  using Family = std::variant<ConstantField, BoundedAffineField, SigmoidField>;

  ScalarField() = default;
  /// Validates parameters against dimension d; throws ErrorKind::Configuration.
  ScalarField(Family family, Eigen::Index d);

  const Family& family() const noexcept { return family_; }

  double operator()(const Vector& x) const;

  /// Closed-form range [lo, hi] over all of R^d.
  double lower_bound() const;
  double upper_bound() const;
  /// Global Lipschitz constant w.r.t. the Euclidean norm.
  double lipschitz() const;
  /// The value when the entry does not depend on x.
  std::optional<double> constant_value() const;

 private:
  Family family_ = ConstantField{0.0};
};

/// Coefficient fields f, g : R^d -> R^{d×d}, entries stored row-major.
class CoefficientField {
 public:
  CoefficientField() = default;
  CoefficientField(Eigen::Index d, std::vector<ScalarField> f, std::vector<ScalarField> g);

  /// All-constant field with the given matrices.
  static CoefficientField constant(const Matrix& f, const Matrix& g);

  Eigen::Index dim() const noexcept { return d_; }
  const ScalarField& f(Eigen::Index i, Eigen::Index j) const { return f_[index(i, j)]; }
  const ScalarField& g(Eigen::Index i, Eigen::Index j) const { return g_[index(i, j)]; }

  bool g_is_zero() const;
  /// Constant f (resp. g) matrix, or nullopt if any entry depends on x.
  std::optional<Matrix> constant_f() const;
  std::optional<Matrix> constant_g() const;

 private:
  std::size_t index(Eigen::Index i, Eigen::Index j) const {
    return static_cast<std::size_t>(i * d_ + j);
  }

  Eigen::Index d_ = 0;
  std::vector<ScalarField> f_;
  std::vector<ScalarField> g_;
};

Matrix evaluate_f(const CoefficientField& field, const Vector& x);
Matrix evaluate_g(const CoefficientField& field, const Vector& x);

/// F(x): off-diagonal part of f(x), zero diagonal.
Matrix off_diagonal_matrix(const CoefficientField& field, const Vector& x);

/// 1 + ||M||_F, an upper bound on the spectral norm |I + M|.
double operator_norm_bound(const Matrix& m);

}  // namespace logem
