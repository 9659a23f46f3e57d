#pragma once

// Elementary functions: generalized quadratics q(x) = x'Ax + u'x + c on R^n,
// the families they are drawn from, and linear maps between the spaces.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "abconv/config.hpp"

namespace abconv {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(want) +
                         ", got " + std::to_string(got));
  }
}

/// q(x) = x'Ax + u'x + c with A symmetric. A is stored unhalved, so the
/// isotropic member a||x||^2 + <u,x> + c has A = aI.
class GeneralizedQuadratic {
 public:
  GeneralizedQuadratic(Matrix A, Vector u, double c) : A_(std::move(A)), u_(std::move(u)), c_(c) {
    if (A_.rows() != A_.cols()) throw DimensionError("GeneralizedQuadratic: A must be square");
    if (A_.rows() < 1) throw DimensionError("GeneralizedQuadratic: dimension must be positive");
    require_dim(u_.size(), A_.rows(), "GeneralizedQuadratic: linear term");
    const double scale = std::max(1.0, A_.cwiseAbs().maxCoeff());
    if ((A_ - A_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw std::invalid_argument("GeneralizedQuadratic: A is not symmetric");
    }
    // Store the exactly symmetric part so that later algebra cannot drift.
    A_ = (0.5 * (A_ + A_.transpose())).eval();
    if (!A_.allFinite() || !u_.allFinite() || !std::isfinite(c_)) {
      throw std::invalid_argument("GeneralizedQuadratic: coefficients must be finite");
    }
  }

  static GeneralizedQuadratic zero(int dim) {
    return {Matrix::Zero(dim, dim), Vector::Zero(dim), 0.0};
  }
  static GeneralizedQuadratic affine(Vector u, double c = 0.0) {
    const auto n = u.size();
    return {Matrix::Zero(n, n), std::move(u), c};
  }
  static GeneralizedQuadratic isotropic(double a, Vector u, double c = 0.0) {
    const auto n = u.size();
    return {a * Matrix::Identity(n, n), std::move(u), c};
  }
  static GeneralizedQuadratic constant(int dim, double c) {
    return {Matrix::Zero(dim, dim), Vector::Zero(dim), c};
  }

  int dim() const { return static_cast<int>(A_.rows()); }
  const Matrix& A() const { return A_; }
  const Vector& u() const { return u_; }
  double c() const { return c_; }

  double operator()(const Vector& x) const {
    require_dim(x.size(), A_.rows(), "evaluate");
    return x.dot(A_ * x) + u_.dot(x) + c_;
  }

  bool is_zero(double tol) const {
    return A_.cwiseAbs().maxCoeff() <= tol && (u_.size() == 0 || u_.cwiseAbs().maxCoeff() <= tol) &&
           std::abs(c_) <= tol;
  }

 private:
  Matrix A_;
  Vector u_;
  double c_;
};

inline double evaluate(const GeneralizedQuadratic& q, const Vector& x) { return q(x); }

/// s1*q1 + s2*q2, componentwise on (A, u, c).
inline GeneralizedQuadratic combine(const GeneralizedQuadratic& q1, const GeneralizedQuadratic& q2,
                                    double s1, double s2) {
  require_dim(q2.dim(), q1.dim(), "combine");
  return {s1 * q1.A() + s2 * q2.A(), s1 * q1.u() + s2 * q2.u(), s1 * q1.c() + s2 * q2.c()};
}

inline GeneralizedQuadratic operator+(const GeneralizedQuadratic& a, const GeneralizedQuadratic& b) {
  return combine(a, b, 1.0, 1.0);
}
inline GeneralizedQuadratic operator-(const GeneralizedQuadratic& a, const GeneralizedQuadratic& b) {
  return combine(a, b, 1.0, -1.0);
}
inline GeneralizedQuadratic operator-(const GeneralizedQuadratic& a) {
  return {-a.A(), -a.u(), -a.c()};
}
inline GeneralizedQuadratic operator*(double s, const GeneralizedQuadratic& a) {
  return {s * a.A(), s * a.u(), s * a.c()};
}

/// x -> q(x + y).
inline GeneralizedQuadratic shift(const GeneralizedQuadratic& q, const Vector& y) {
  require_dim(y.size(), q.dim(), "shift");
  return {q.A(), q.u() + 2.0 * (q.A() * y), q(y)};
}

/// A linear operator L : R^n -> R^m stored as an m x n matrix.
class LinearMap {
 public:
  explicit LinearMap(Matrix M) : M_(std::move(M)) {
    if (M_.rows() < 1 || M_.cols() < 1) throw DimensionError("LinearMap: empty matrix");
    if (!M_.allFinite()) throw std::invalid_argument("LinearMap: entries must be finite");
  }
  static LinearMap identity(int n) { return LinearMap(Matrix::Identity(n, n)); }

  int rows() const { return static_cast<int>(M_.rows()); }
  int cols() const { return static_cast<int>(M_.cols()); }
  const Matrix& matrix() const { return M_; }

  Vector operator()(const Vector& x) const {
    require_dim(x.size(), M_.cols(), "LinearMap");
    return M_ * x;
  }

  /// Largest singular value.
  double norm() const {
    Eigen::JacobiSVD<Matrix> svd(M_);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  }

 private:
  Matrix M_;
};

/// psi o L as a quadratic on the domain of L: A = L'A_psi L, u = L'u_psi, c = c_psi.
inline GeneralizedQuadratic pullback(const GeneralizedQuadratic& psi, const LinearMap& L) {
  require_dim(psi.dim(), L.rows(), "pullback");
  const Matrix& M = L.matrix();
  Matrix A = M.transpose() * psi.A() * M;
  A = (0.5 * (A + A.transpose())).eval();
  return {std::move(A), M.transpose() * psi.u(), psi.c()};
}

/// Admissible curvature a for members a||x||^2 + <u,x> + c of a family.
struct CurvatureSpec {
  enum class Kind { Zero, NonNegative, NonPositive, Fixed, Any };

  Kind kind = Kind::Zero;
  double a = 0.0;  // only meaningful for Fixed

  static CurvatureSpec zero() { return {Kind::Zero, 0.0}; }
  static CurvatureSpec nonnegative() { return {Kind::NonNegative, 0.0}; }
  static CurvatureSpec nonpositive() { return {Kind::NonPositive, 0.0}; }
  static CurvatureSpec fixed(double a) { return {Kind::Fixed, a}; }
  static CurvatureSpec any() { return {Kind::Any, 0.0}; }

  double lower() const {
    switch (kind) {
      case Kind::Zero: return 0.0;
      case Kind::NonNegative: return 0.0;
      case Kind::NonPositive: return -kInf;
      case Kind::Fixed: return a;
      case Kind::Any: return -kInf;
    }
    return 0.0;
  }
  double upper() const {
    switch (kind) {
      case Kind::Zero: return 0.0;
      case Kind::NonNegative: return kInf;
      case Kind::NonPositive: return 0.0;
      case Kind::Fixed: return a;
      case Kind::Any: return kInf;
    }
    return 0.0;
  }
  bool is_point() const { return kind == Kind::Zero || kind == Kind::Fixed; }

  bool operator==(const CurvatureSpec& o) const {
    return kind == o.kind && (kind != Kind::Fixed || a == o.a);
  }
};

/// A family of elementary functions {a||x||^2 + <u,x> + c} on R^dim.
/// The zero function is always a member.
struct Family {
  int dim = 1;
  CurvatureSpec curvature = CurvatureSpec::zero();
  bool includes_constants = true;

  static Family affine(int dim, bool constants = true) {
    return {dim, CurvatureSpec::zero(), constants};
  }
  static Family nonpositive_quadratic(int dim, bool constants = true) {
    return {dim, CurvatureSpec::nonpositive(), constants};
  }

  /// Closed under differences (Phi - Phi inside Phi).
  bool closed_under_differences() const {
    return curvature.kind == CurvatureSpec::Kind::Zero || curvature.kind == CurvatureSpec::Kind::Any ||
           (curvature.kind == CurvatureSpec::Kind::Fixed && curvature.a == 0.0);
  }

  /// Build the member with curvature a, slope u and constant c.
  GeneralizedQuadratic member(double a, const Vector& u, double c = 0.0) const {
    require_dim(u.size(), dim, "Family::member");
    return GeneralizedQuadratic::isotropic(a, u, includes_constants ? c : 0.0);
  }
};

/// Max-entry distance from A to the nearest aI with a in [lo, hi].
/// The diagonal optimum is the midrange of the diagonal, clamped to the range.
inline double isotropic_deviation(const Matrix& A, double lo, double hi, double* best_a = nullptr) {
  const Eigen::Index n = A.rows();
  double off = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) off = std::max(off, std::abs(A(i, j)));
  const Vector d = A.diagonal();
  const double mid = 0.5 * (d.maxCoeff() + d.minCoeff());
  const double a = std::clamp(mid, lo, hi);
  if (best_a != nullptr) *best_a = a;
  return std::max(off, (d.array() - a).abs().maxCoeff());
}

inline bool family_contains(const Family& F, const GeneralizedQuadratic& q, double tol) {
  require_dim(q.dim(), F.dim, "family_contains");
  if (q.is_zero(tol)) return true;
  if (!F.includes_constants && std::abs(q.c()) > tol) return false;
  return isotropic_deviation(q.A(), F.curvature.lower(), F.curvature.upper()) <= tol;
}

inline bool family_contains(const Family& F, const GeneralizedQuadratic& q) {
  return family_contains(F, q, tolerance());
}

}  // namespace abconv
