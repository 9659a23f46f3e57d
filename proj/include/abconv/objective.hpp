#pragma once

// Extended-valued objectives f : R^n -> (-inf, +inf] and their weak-convexity moduli.

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <variant>

#include <Eigen/Eigenvalues>

#include "abconv/elementary.hpp"

namespace abconv {

/// Axis-aligned box; bounds may be infinite.
struct Box {
  Vector lower;
  Vector upper;

  Box() = default;
  Box(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
    require_dim(upper.size(), lower.size(), "Box");
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
      if (std::isnan(lower(i)) || std::isnan(upper(i)) || lower(i) > upper(i)) {
        throw std::invalid_argument("Box: lower bound exceeds upper bound");
      }
    }
  }
  static Box cube(int dim, double lo, double hi) {
    return {Vector::Constant(dim, lo), Vector::Constant(dim, hi)};
  }

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Vector& x) const {
    for (Eigen::Index i = 0; i < lower.size(); ++i)
      if (x(i) < lower(i) || x(i) > upper(i)) return false;
    return true;
  }
  bool bounded() const { return lower.allFinite() && upper.allFinite(); }
  Vector center() const { return 0.5 * (lower + upper); }

  /// Intersection; nullopt when empty.
  std::optional<Box> intersect(const Box& o) const {
    require_dim(o.dim(), dim(), "Box::intersect");
    Vector lo = lower.cwiseMax(o.lower), hi = upper.cwiseMin(o.upper);
    for (Eigen::Index i = 0; i < lo.size(); ++i)
      if (lo(i) > hi(i)) return std::nullopt;
    return Box(std::move(lo), std::move(hi));
  }
};

/// A pure, reentrant evaluator. +inf marks points outside the effective domain.
using Evaluator = std::function<double(const Vector&)>;

struct BlackBox {
  Evaluator eval;
};

class Objective {
 public:
  using Body = std::variant<GeneralizedQuadratic, BlackBox>;

  explicit Objective(GeneralizedQuadratic q, std::optional<Box> domain = std::nullopt)
      : dim_(q.dim()), body_(std::move(q)), domain_(std::move(domain)) {
    check_domain();
  }

  /// Properness is checked by sampling `probe` (or the domain box) for a finite value.
  Objective(int dim, Evaluator eval, std::optional<Box> domain = std::nullopt,
            std::optional<Box> probe = std::nullopt)
      : dim_(dim), body_(BlackBox{std::move(eval)}), domain_(std::move(domain)) {
    if (dim_ < 1) throw DimensionError("Objective: dimension must be positive");
    if (!std::get<BlackBox>(body_).eval) throw std::invalid_argument("Objective: empty evaluator");
    check_domain();
    check_proper_by_sampling(probe);
  }

  /// Black box without the properness probe (derived objectives such as f + g o L,
  /// whose domain may legitimately be empty).
  static Objective unchecked(int dim, Evaluator eval, std::optional<Box> domain = std::nullopt) {
    return Objective(dim, std::move(eval), std::move(domain), UncheckedTag{});
  }

  int dim() const { return dim_; }
  const Body& body() const { return body_; }
  const std::optional<Box>& domain_box() const { return domain_; }

  const GeneralizedQuadratic* quadratic() const { return std::get_if<GeneralizedQuadratic>(&body_); }

  /// Quadratic body with no domain restriction: closed-form engines apply.
  const GeneralizedQuadratic* full_space_quadratic() const {
    return domain_ ? nullptr : quadratic();
  }

  double operator()(const Vector& x) const {
    require_dim(x.size(), dim_, "eval_extended");
    if (domain_ && !domain_->contains(x)) return kInf;
    double v;
    if (const auto* q = quadratic()) {
      v = (*q)(x);
    } else {
      v = std::get<BlackBox>(body_).eval(x);
    }
    if (std::isnan(v) || v == -kInf) {
      throw std::domain_error("objective evaluated to -inf or NaN; codomain is (-inf, +inf]");
    }
    return v;
  }

 private:
  struct UncheckedTag {};
  Objective(int dim, Evaluator eval, std::optional<Box> domain, UncheckedTag)
      : dim_(dim), body_(BlackBox{std::move(eval)}), domain_(std::move(domain)) {
    check_domain();
  }

  void check_domain() const {
    if (domain_) require_dim(domain_->dim(), dim_, "Objective domain box");
  }

  void check_proper_by_sampling(const std::optional<Box>& probe) const {
    Box region = probe ? *probe : (domain_ ? *domain_ : Box::cube(dim_, -10.0, 10.0));
    require_dim(region.dim(), dim_, "Objective probe box");
    // Clip infinite bounds so that sampling stays finite.
    Vector lo = region.lower.cwiseMax(Vector::Constant(dim_, -1e6));
    Vector hi = region.upper.cwiseMin(Vector::Constant(dim_, 1e6));
    if ((*this)(0.5 * (lo + hi)) < kInf) return;
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector x(dim_);
    for (int s = 0; s < 4096; ++s) {
      for (int i = 0; i < dim_; ++i) x(i) = lo(i) + unit(rng) * (hi(i) - lo(i));
      if ((*this)(x) < kInf) return;
    }
    throw std::invalid_argument("Objective: no finite value found by sampling; not proper");
  }

  int dim_;
  Body body_;
  std::optional<Box> domain_;
};

inline double eval_extended(const Objective& f, const Vector& x) { return f(x); }

/// x -> f(x) + q(x), keeping the domain box.
inline Objective add_quadratic(const Objective& f, const GeneralizedQuadratic& q) {
  require_dim(q.dim(), f.dim(), "add_quadratic");
  if (const auto* fq = f.quadratic()) return Objective(*fq + q, f.domain_box());
  Evaluator base = std::get<BlackBox>(f.body()).eval;
  return Objective::unchecked(
      f.dim(), [base, q](const Vector& x) { return base(x) + q(x); }, f.domain_box());
}

/// x -> f(x) + g(Lx).
inline Objective compose_sum(const Objective& f, const Objective& g, const LinearMap& L) {
  require_dim(L.cols(), f.dim(), "compose_sum: L columns");
  require_dim(L.rows(), g.dim(), "compose_sum: L rows");
  if (const auto* gq = g.full_space_quadratic()) return add_quadratic(f, pullback(*gq, L));
  return Objective::unchecked(f.dim(), [f, g, L](const Vector& x) {
    const double fx = f(x);
    if (fx == kInf) return kInf;
    return fx + g(L(x));
  });
}

/// x -> g(Lx).
inline Objective compose(const Objective& g, const LinearMap& L) {
  require_dim(L.rows(), g.dim(), "compose");
  if (const auto* gq = g.full_space_quadratic()) return Objective(pullback(*gq, L));
  return Objective::unchecked(L.cols(), [g, L](const Vector& x) { return g(L(x)); });
}

struct WeakConvexityReport {
  enum class Method { Analytic, Sampled };
  double modulus = 0.0;
  bool certified = false;
  Method method = Method::Analytic;
};

inline double min_eigenvalue(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Smallest rho >= 0 with f + rho||.||^2 convex. Exact for quadratic bodies;
/// black boxes get a sampled midpoint estimate over `region` (uncertified).
inline WeakConvexityReport weak_convexity_modulus(const Objective& f,
                                                  std::optional<Box> region = std::nullopt,
                                                  int samples = 1000) {
  if (const auto* q = f.quadratic()) {
    return {std::max(0.0, -min_eigenvalue(2.0 * q->A())) / 2.0, true,
            WeakConvexityReport::Method::Analytic};
  }
  const int n = f.dim();
  Box box = region ? *region : (f.domain_box() ? *f.domain_box() : Box::cube(n, -1.0, 1.0));
  Vector lo = box.lower.cwiseMax(Vector::Constant(n, -1e3));
  Vector hi = box.upper.cwiseMin(Vector::Constant(n, 1e3));
  std::mt19937_64 rng(0xc0ffee);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double rho = 0.0;
  Vector x1(n), x2(n);
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i) {
      x1(i) = lo(i) + unit(rng) * (hi(i) - lo(i));
      x2(i) = lo(i) + unit(rng) * (hi(i) - lo(i));
    }
    const double lam = unit(rng);
    const double dist2 = (x1 - x2).squaredNorm();
    const double weight = lam * (1.0 - lam) * dist2;
    if (weight < 1e-14) continue;
    const double f1 = f(x1), f2 = f(x2);
    if (f1 == kInf || f2 == kInf) continue;
    const double fm = f(lam * x1 + (1.0 - lam) * x2);
    rho = std::max(rho, (fm - lam * f1 - (1.0 - lam) * f2) / weight);
  }
  return {rho, false, WeakConvexityReport::Method::Sampled};
}

/// Modulus bound a + b||L||^2 for x -> f(x) - b||Lx||^2, given f with certified modulus a.
inline double shifted_modulus(const WeakConvexityReport& f_report, double b, const LinearMap& L) {
  if (b < 0.0) throw std::invalid_argument("shifted_modulus: b must be nonnegative");
  if (!f_report.certified) throw std::invalid_argument("shifted_modulus: modulus is not certified");
  const double n = L.norm();
  return f_report.modulus + b * n * n;
}

inline double shifted_modulus(const Objective& f, double b, const LinearMap& L) {
  return shifted_modulus(weak_convexity_modulus(f), b, L);
}

}  // namespace abconv
