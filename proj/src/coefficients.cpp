#include "logem/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "logem/errors.hpp"

namespace logem {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(double v, const char* field) {
  if (!std::isfinite(v)) {
    fail(ErrorKind::Configuration, std::string(field) + " must be finite");
  }
}

void require_weights(const Vector& w, Eigen::Index d, const char* family) {
  if (w.size() != d) {
    fail(ErrorKind::Configuration, std::string(family) + ".w must have " +
                                       std::to_string(d) + " entries");
  }
  if (!w.allFinite()) fail(ErrorKind::Configuration, std::string(family) + ".w must be finite");
}

double logistic(double s) {
  return s >= 0.0 ? 1.0 / (1.0 + std::exp(-s)) : std::exp(s) / (1.0 + std::exp(s));
}

void check_input(const Vector& x, Eigen::Index d) {
  if (x.size() != d) {
    fail(ErrorKind::Usage, "state has " + std::to_string(x.size()) + " entries, expected " +
                               std::to_string(d));
  }
  if (!x.allFinite()) fail(ErrorKind::NumericInput, "coefficient argument is not finite");
}

}  // namespace

ScalarField::ScalarField(Family family, Eigen::Index d) : family_(std::move(family)) {
  std::visit(overloaded{
                 [](const ConstantField& c) { require_finite(c.c, "constant.c"); },
                 [d](const BoundedAffineField& a) {
                   require_finite(a.c0, "bounded_affine.c0");
                   require_finite(a.c1, "bounded_affine.c1");
                   require_finite(a.clip_lo, "bounded_affine.clip_lo");
                   require_finite(a.clip_hi, "bounded_affine.clip_hi");
                   if (a.clip_lo > a.clip_hi) {
                     fail(ErrorKind::Configuration,
                          "bounded_affine.clip_lo must not exceed clip_hi");
                   }
                   require_weights(a.w, d, "bounded_affine");
                 },
                 [d](const SigmoidField& s) {
                   require_finite(s.c0, "sigmoid.c0");
                   require_finite(s.amplitude, "sigmoid.amplitude");
                   require_weights(s.w, d, "sigmoid");
                 },
             },
             family_);
}

double ScalarField::operator()(const Vector& x) const {
  return std::visit(overloaded{
                        [](const ConstantField& c) { return c.c; },
                        [&x](const BoundedAffineField& a) {
                          return std::clamp(a.c0 + a.c1 * a.w.dot(x), a.clip_lo, a.clip_hi);
                        },
                        [&x](const SigmoidField& s) {
                          return s.c0 + s.amplitude * logistic(s.w.dot(x));
                        },
                    },
                    family_);
}

std::optional<double> ScalarField::constant_value() const {
  return std::visit(overloaded{
                        [](const ConstantField& c) -> std::optional<double> { return c.c; },
                        [](const BoundedAffineField& a) -> std::optional<double> {
                          if (a.c1 == 0.0 || a.w.isZero(0.0)) {
                            return std::clamp(a.c0, a.clip_lo, a.clip_hi);
                          }
                          return std::nullopt;
                        },
                        [](const SigmoidField& s) -> std::optional<double> {
                          if (s.amplitude == 0.0) return s.c0;
                          if (s.w.isZero(0.0)) return s.c0 + 0.5 * s.amplitude;
                          return std::nullopt;
                        },
                    },
                    family_);
}

double ScalarField::lower_bound() const {
  if (auto c = constant_value()) return *c;
  return std::visit(overloaded{
                        [](const ConstantField& c) { return c.c; },
                        [](const BoundedAffineField& a) { return a.clip_lo; },
                        [](const SigmoidField& s) { return s.c0 + std::min(0.0, s.amplitude); },
                    },
                    family_);
}

double ScalarField::upper_bound() const {
  if (auto c = constant_value()) return *c;
  return std::visit(overloaded{
                        [](const ConstantField& c) { return c.c; },
                        [](const BoundedAffineField& a) { return a.clip_hi; },
                        [](const SigmoidField& s) { return s.c0 + std::max(0.0, s.amplitude); },
                    },
                    family_);
}

double ScalarField::lipschitz() const {
  if (constant_value()) return 0.0;
  return std::visit(overloaded{
                        [](const ConstantField&) { return 0.0; },
                        // clamp is 1-Lipschitz
                        [](const BoundedAffineField& a) { return std::abs(a.c1) * a.w.norm(); },
                        // max |logistic'| = 1/4
                        [](const SigmoidField& s) { return 0.25 * std::abs(s.amplitude) * s.w.norm(); },
                    },
                    family_);
}

CoefficientField::CoefficientField(Eigen::Index d, std::vector<ScalarField> f,
                                   std::vector<ScalarField> g)
    : d_(d), f_(std::move(f)), g_(std::move(g)) {
  if (d < 1) fail(ErrorKind::Configuration, "dimension d must be >= 1");
  const auto n = static_cast<std::size_t>(d * d);
  if (f_.size() != n || g_.size() != n) {
    fail(ErrorKind::Configuration, "f and g must each have d*d entries");
  }
}

CoefficientField CoefficientField::constant(const Matrix& f, const Matrix& g) {
  const Eigen::Index d = f.rows();
  if (f.cols() != d || g.rows() != d || g.cols() != d) {
    fail(ErrorKind::Configuration, "f and g must be square matrices of equal size");
  }
  std::vector<ScalarField> fs, gs;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      fs.emplace_back(ConstantField{f(i, j)}, d);
      gs.emplace_back(ConstantField{g(i, j)}, d);
    }
  }
  return CoefficientField(d, std::move(fs), std::move(gs));
}

bool CoefficientField::g_is_zero() const {
  return std::all_of(g_.begin(), g_.end(), [](const ScalarField& s) {
    auto c = s.constant_value();
    return c && *c == 0.0;
  });
}

namespace {

std::optional<Matrix> constant_matrix(const std::vector<ScalarField>& entries, Eigen::Index d) {
  Matrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      auto c = entries[static_cast<std::size_t>(i * d + j)].constant_value();
      if (!c) return std::nullopt;
      m(i, j) = *c;
    }
  }
  return m;
}

}  // namespace

std::optional<Matrix> CoefficientField::constant_f() const { return constant_matrix(f_, d_); }
std::optional<Matrix> CoefficientField::constant_g() const { return constant_matrix(g_, d_); }

Matrix evaluate_f(const CoefficientField& field, const Vector& x) {
  Matrix m(field.dim(), field.dim());
  check_input(x, field.dim());
  for (Eigen::Index i = 0; i < field.dim(); ++i) {
    for (Eigen::Index j = 0; j < field.dim(); ++j) m(i, j) = field.f(i, j)(x);
  }
  return m;
}

Matrix evaluate_g(const CoefficientField& field, const Vector& x) {
  Matrix m(field.dim(), field.dim());
  check_input(x, field.dim());
  for (Eigen::Index i = 0; i < field.dim(); ++i) {
    for (Eigen::Index j = 0; j < field.dim(); ++j) m(i, j) = field.g(i, j)(x);
  }
  return m;
}

Matrix off_diagonal_matrix(const CoefficientField& field, const Vector& x) {
  Matrix m = evaluate_f(field, x);
  m.diagonal().setZero();
  return m;
}

double operator_norm_bound(const Matrix& m) {
  if (!m.allFinite()) fail(ErrorKind::NumericInput, "matrix has non-finite entries");
  return 1.0 + m.norm();
}

}  // namespace logem
