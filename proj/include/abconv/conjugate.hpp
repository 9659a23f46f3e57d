#pragma once

// Phi-conjugates f*(phi) = sup_x phi(x) - f(x), biconjugates, and
// epsilon-subdifferential membership. Quadratic data goes through an exact
// eigen-decomposition; everything else through the grid oracle.

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Eigenvalues>

#include "abconv/search.hpp"

namespace abconv {

struct QuadraticExtremum {
  double value = 0.0;
  std::optional<Vector> point;  // attaining point when the value is finite
};

/// sup_x x'Dx + v'x + k, exactly. D must be symmetric.
inline QuadraticExtremum quadratic_sup(const Matrix& D, const Vector& v, double k) {
  require_dim(D.rows(), D.cols(), "quadratic_sup: square matrix");
  require_dim(v.size(), D.rows(), "quadratic_sup: linear term");
  Eigen::SelfAdjointEigenSolver<Matrix> es(D);
  const Vector& lam = es.eigenvalues();
  const Matrix& W = es.eigenvectors();
  const double norm = lam.cwiseAbs().maxCoeff();
  const double tol = 1e-9 * std::max(1.0, norm);
  if (lam.maxCoeff() > tol) return {kInf, std::nullopt};

  const Vector proj = W.transpose() * v;  // coordinates of v in the eigenbasis
  const double vtol = 1e-9 * std::max(1.0, v.cwiseAbs().maxCoeff());
  double value = k;
  Vector x = Vector::Zero(v.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) >= -tol) {
      // Kernel direction: any linear component makes the sup infinite.
      if (std::abs(proj(i)) > vtol) return {kInf, std::nullopt};
      continue;
    }
    value -= 0.25 * proj(i) * proj(i) / lam(i);
    x -= 0.5 * (proj(i) / lam(i)) * W.col(i);
  }
  return {value, x};
}

inline QuadraticExtremum quadratic_sup(const GeneralizedQuadratic& q) {
  return quadratic_sup(q.A(), q.u(), q.c());
}

/// inf_x q(x), exactly (-inf when unbounded below).
inline QuadraticExtremum quadratic_inf(const GeneralizedQuadratic& q) {
  QuadraticExtremum r = quadratic_sup(-q.A(), -q.u(), -q.c());
  r.value = -r.value;
  return r;
}

struct ConjugateValue {
  enum class Engine { ClosedForm, Grid };
  double value = 0.0;
  std::optional<Vector> maximizer;
  Engine engine = Engine::ClosedForm;
  bool grid_truncated = false;   // grid value: a lower bound only
  bool improper_window = false;  // no finite point of f inside the grid box
  bool on_boundary = false;      // grid maximizer on the box edge (sup may lie outside)
};

inline ConjugateValue conjugate_closed_form(const GeneralizedQuadratic& f, const GeneralizedQuadratic& phi) {
  require_dim(phi.dim(), f.dim(), "conjugate_closed_form");
  const QuadraticExtremum r = quadratic_sup(phi.A() - f.A(), phi.u() - f.u(), phi.c() - f.c());
  return {r.value, r.point, ConjugateValue::Engine::ClosedForm, false, false, false};
}

inline ConjugateValue conjugate_grid(const Objective& f, const GeneralizedQuadratic& phi, const GridSpec& grid,
                                     const std::vector<Vector>& seeds = {}) {
  require_dim(phi.dim(), f.dim(), "conjugate_grid");
  require_dim(grid.box.dim(), f.dim(), "conjugate_grid: box");
  const GridResult r = grid_maximize(
      [&](const Vector& x) {
        const double fx = f(x);
        return fx == kInf ? -kInf : phi(x) - fx;
      },
      grid, {}, seeds);
  ConjugateValue out;
  out.engine = ConjugateValue::Engine::Grid;
  out.grid_truncated = true;
  out.value = r.value;
  out.on_boundary = r.on_boundary;
  if (r.value == -kInf) {
    out.improper_window = true;
  } else {
    out.maximizer = r.argmax;
  }
  return out;
}

/// Search window for a black-box conjugate: the domain box clipped to the fallback.
inline std::optional<GridSpec> conjugate_window(const Objective& f, const GridSpec& fallback) {
  if (!f.domain_box()) return fallback;
  auto box = f.domain_box()->intersect(fallback.box);
  if (!box) return std::nullopt;
  // Degenerate axes (a point domain) get a hair of width so the grid is valid.
  for (int i = 0; i < box->dim(); ++i) {
    if (!(box->lower(i) < box->upper(i))) {
      box->lower(i) -= 1e-12;
      box->upper(i) += 1e-12;
    }
  }
  return GridSpec(*box, fallback.points_per_axis, fallback.refine_rounds);
}

/// Closed form for full-space quadratics, grid over domain box and fallback otherwise.
inline ConjugateValue conjugate(const Objective& f, const GeneralizedQuadratic& phi, const GridSpec& fallback,
                                const std::vector<Vector>& seeds = {}) {
  if (const auto* q = f.full_space_quadratic()) return conjugate_closed_form(*q, phi);
  const auto window = conjugate_window(f, fallback);
  if (!window) {
    ConjugateValue out;
    out.engine = ConjugateValue::Engine::Grid;
    out.value = -kInf;
    out.grid_truncated = out.improper_window = true;
    return out;
  }
  return conjugate_grid(f, phi, *window, seeds);
}

inline GridSpec default_window(int dim) { return GridSpec(Box::cube(dim, -10.0, 10.0), 201, 2); }

struct BiconjugateValue {
  double value = -kInf;
  std::optional<GeneralizedQuadratic> member;  // attaining elementary function
  bool grid_truncated = false;
  bool on_boundary = false;
};

/// f**(x) over a parameter grid of F: a lower bound on the true value.
inline BiconjugateValue biconjugate_at(const Objective& f, const Family& F, const Vector& x,
                                       const ParameterSearch& search, const GridSpec& window) {
  require_dim(F.dim, f.dim(), "biconjugate_at: family");
  require_dim(x.size(), f.dim(), "biconjugate_at: point");
  // Seeding the conjugate with x keeps phi(x) - f*(phi) <= f(x) on the grid.
  const std::vector<Vector> seeds{x};
  const FamilyResult r = family_maximize(F, search, [&](const GeneralizedQuadratic& phi) {
    const double fs = conjugate(f, phi, window, seeds).value;
    if (fs == kInf || fs == -kInf) return -kInf;
    return phi(x) - fs;
  });
  return {r.value, r.member, true, r.on_boundary};
}

inline BiconjugateValue biconjugate_at(const Objective& f, const Family& F, const Vector& x,
                                       const ParameterSearch& search = {}) {
  return biconjugate_at(f, F, x, search, default_window(f.dim()));
}

/// Exact f**(x) for f(x) = x'Gx + w'x + k over an isotropic family. If some
/// admissible curvature a <= lambda_min(G), a member touches f at x and
/// f** = f. Otherwise every non-constant member has f*(phi) = +inf, leaving
/// the zero function: f** = -f*(0) = inf f.
inline BiconjugateValue biconjugate_closed_form(const GeneralizedQuadratic& f, const Family& F, const Vector& x) {
  require_dim(F.dim, f.dim(), "biconjugate_closed_form");
  require_dim(x.size(), f.dim(), "biconjugate_closed_form: point");
  Eigen::SelfAdjointEigenSolver<Matrix> es(f.A(), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  const double tol = 1e-9 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  const double lo = F.curvature.lower();
  if (lo <= lmin + tol) {
    const double a = std::min(F.curvature.upper(), std::max(lo, lmin));
    // Tangent member: f - phi has zero gradient at x, with phi(x) = f(x).
    const Vector grad = 2.0 * (f.A() * x) + f.u();
    const Vector u = grad - 2.0 * a * x;
    GeneralizedQuadratic phi = GeneralizedQuadratic::isotropic(a, u, 0.0);
    if (F.includes_constants) phi = GeneralizedQuadratic::isotropic(a, u, f(x) - phi(x));
    return {f(x), phi, false, false};
  }
  const QuadraticExtremum m = quadratic_inf(f);
  return {m.value, GeneralizedQuadratic::zero(F.dim), false, false};
}

/// Exact when f is a full-space quadratic, grid otherwise.
inline BiconjugateValue biconjugate(const Objective& f, const Family& F, const Vector& x,
                                    const ParameterSearch& search = {}) {
  if (const auto* q = f.full_space_quadratic()) return biconjugate_closed_form(*q, F, x);
  return biconjugate_at(f, F, x, search);
}

inline bool is_phi_convex_at(const Objective& f, const Family& F, const Vector& x, double tol,
                             const ParameterSearch& search = {}) {
  const double fx = f(x);
  if (fx == kInf) throw std::invalid_argument("is_phi_convex_at: x is outside dom f");
  const double b = biconjugate(f, F, x, search).value;
  return b != -kInf && std::abs(b - fx) <= tol;
}

/// Grid-only variant (the definition-level oracle).
inline bool is_phi_convex_at_grid(const Objective& f, const Family& F, const Vector& x, double tol,
                                  const ParameterSearch& search = {}) {
  const double fx = f(x);
  if (fx == kInf) throw std::invalid_argument("is_phi_convex_at: x is outside dom f");
  const double b = biconjugate_at(f, F, x, search).value;
  return b != -kInf && std::abs(b - fx) <= tol;
}

enum class Engine { Auto, ClosedForm, Grid };

inline ConjugateValue conjugate_with(const Objective& f, const GeneralizedQuadratic& phi, Engine engine,
                                     const GridSpec& window, const std::vector<Vector>& seeds = {}) {
  switch (engine) {
    case Engine::ClosedForm: {
      const auto* q = f.full_space_quadratic();
      if (q == nullptr) throw std::invalid_argument("closed-form engine needs a full-space quadratic");
      return conjugate_closed_form(*q, phi);
    }
    case Engine::Grid: {
      const auto w = conjugate_window(f, window);
      if (!w) return conjugate(f, phi, window, seeds);
      return conjugate_grid(f, phi, *w, seeds);
    }
    case Engine::Auto: break;
  }
  return conjugate(f, phi, window, seeds);
}

/// phi in the eps-subdifferential of f at x: f(x) + f*(phi) <= phi(x) + eps (plus 1e-9 slack).
inline bool eps_subdiff_contains(const Objective& f, const GeneralizedQuadratic& phi, const Vector& x, double eps,
                                 Engine engine = Engine::Auto, const std::optional<GridSpec>& window = std::nullopt) {
  if (!(eps >= 0.0)) throw std::invalid_argument("eps_subdiff_contains: eps must be >= 0");
  require_dim(phi.dim(), f.dim(), "eps_subdiff_contains");
  const double fx = f(x);
  if (fx == kInf) throw std::invalid_argument("eps_subdiff_contains: x is not in dom f");
  // Seeding with x keeps the grid value >= phi(x) - f(x).
  const ConjugateValue fs = conjugate_with(f, phi, engine, window ? *window : default_window(f.dim()), {x});
  if (fs.value == kInf) return false;
  return fx + fs.value <= phi(x) + eps + 1e-9;
}

/// Candidates phi that lie in the eps-subdifferential at some sampled point,
/// for every eps in the list: an inner approximation of dom f*.
inline std::vector<GeneralizedQuadratic> dom_conjugate_probe(const Objective& f, const Family& F,
                                                             const std::vector<double>& eps_list,
                                                             const std::vector<Vector>& samples,
                                                             const std::vector<GeneralizedQuadratic>& candidates,
                                                             Engine engine = Engine::Auto,
                                                             const std::optional<GridSpec>& window = std::nullopt) {
  if (eps_list.empty()) throw std::invalid_argument("dom_conjugate_probe: empty eps list");
  for (size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw std::invalid_argument("dom_conjugate_probe: eps must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw std::invalid_argument("dom_conjugate_probe: eps list must be decreasing");
  }
  std::vector<Vector> pts;
  for (const auto& x : samples)
    if (f(x) < kInf) pts.push_back(x);

  std::vector<GeneralizedQuadratic> out;
  for (const auto& phi : candidates) {
    require_dim(phi.dim(), F.dim, "dom_conjugate_probe: candidate");
    bool all = true;
    for (double eps : eps_list) {
      bool found = false;
      for (const auto& x : pts) {
        if (eps_subdiff_contains(f, phi, x, eps, engine, window)) {
          found = true;
          break;
        }
      }
      if (!found) {
        all = false;
        break;
      }
    }
    if (all) out.push_back(phi);
  }
  return out;
}

}  // namespace abconv
