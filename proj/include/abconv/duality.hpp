#pragma once

// The composite problem inf f(x) + g(Lx), its conjugate dual, weak duality,
// epsilon-certificates of zero gap, and epigraph-based strong duality checks.

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "abconv/conjugate.hpp"

namespace abconv {

/// Problem data plus the search configuration every truncated sup/inf uses.
struct ProblemInstance {
  std::string name;
  Objective f;
  Objective g;
  LinearMap L;
  Family Phi;
  Family Psi;
  ParameterSearch psi_search;
  GridSpec x_search;         // primal grid and black-box conjugates on X
  GridSpec y_window;         // black-box conjugates on Y
  std::vector<std::string> warnings;

  ProblemInstance(Objective f_, Objective g_, LinearMap L_, Family Phi_, Family Psi_,
                  ParameterSearch psi_search_ = {}, std::optional<GridSpec> x_search_ = std::nullopt,
                  std::optional<GridSpec> y_window_ = std::nullopt, std::string name_ = "")
      : name(std::move(name_)),
        f(std::move(f_)),
        g(std::move(g_)),
        L(std::move(L_)),
        Phi(Phi_),
        Psi(Psi_),
        psi_search(psi_search_),
        x_search(x_search_ ? *x_search_ : default_window(f.dim())),
        y_window(y_window_ ? *y_window_ : default_window(g.dim())) {
    require_dim(L.cols(), f.dim(), "ProblemInstance: L columns vs dim f");
    require_dim(L.rows(), g.dim(), "ProblemInstance: L rows vs dim g");
    require_dim(Phi.dim, f.dim(), "ProblemInstance: Phi");
    require_dim(Psi.dim, g.dim(), "ProblemInstance: Psi");
    require_dim(x_search.box.dim(), n(), "ProblemInstance: x_search");
    require_dim(y_window.box.dim(), m(), "ProblemInstance: y_window");
    psi_search.validate();
    x_search.validate();
    y_window.validate();
    if (!domains_meet()) warnings.push_back("dom g and L(dom f) look disjoint on the sampled region");
  }

  int n() const { return f.dim(); }
  int m() const { return g.dim(); }

  /// Sampled check that dom g meets L(dom f).
  bool domains_meet(int samples = 4096) const {
    const Box& b = x_search.box;
    if (f(b.center()) < kInf && g(L(b.center())) < kInf) return true;
    std::mt19937_64 rng(0xd0d0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector x(n());
    for (int s = 0; s < samples; ++s) {
      for (int i = 0; i < n(); ++i) x(i) = b.lower(i) + unit(rng) * (b.upper(i) - b.lower(i));
      if (f(x) < kInf && g(L(x)) < kInf) return true;
    }
    return false;
  }
};

/// phi(x) + psi(Lx + y) - psi(Lx).
inline double coupling_value(const GeneralizedQuadratic& phi, const GeneralizedQuadratic& psi, const Vector& x,
                             const Vector& y, const LinearMap& L) {
  require_dim(phi.dim(), L.cols(), "coupling_value: phi");
  require_dim(psi.dim(), L.rows(), "coupling_value: psi");
  require_dim(y.size(), L.rows(), "coupling_value: y");
  const Vector Lx = L(x);
  return phi(x) + psi(Lx + y) - psi(Lx);
}

/// (f + psi o L)*(phi).
inline ConjugateValue composite_conjugate(const ProblemInstance& P, const GeneralizedQuadratic& psi,
                                          const GeneralizedQuadratic& phi) {
  require_dim(psi.dim(), P.m(), "composite_conjugate: psi");
  require_dim(phi.dim(), P.n(), "composite_conjugate: phi");
  return conjugate(add_quadratic(P.f, pullback(psi, P.L)), phi, P.x_search);
}

inline ConjugateValue g_conjugate(const ProblemInstance& P, const GeneralizedQuadratic& psi) {
  return conjugate(P.g, psi, P.y_window);
}

inline double extended_sum(double a, double b) {
  if (a == kInf || b == kInf) return kInf;
  return a + b;
}

/// beta^c(0, psi) = sup_x {-psi(Lx) - f(x)} + g*(psi).
inline double beta_conjugate_zero(const ProblemInstance& P, const GeneralizedQuadratic& psi) {
  const double s = composite_conjugate(P, psi, GeneralizedQuadratic::zero(P.n())).value;
  if (s == kInf) return kInf;
  return extended_sum(s, g_conjugate(P, psi).value);
}

struct PrimalValue {
  double value = kInf;
  std::optional<Vector> argmin;
  bool closed_form = false;
  bool grid_truncated = false;
  bool unbounded_suspected = false;
};

/// inf_x f(x) + g(Lx): exact when the sum is a full-space quadratic.
inline PrimalValue primal_value(const ProblemInstance& P) {
  const Objective s = compose_sum(P.f, P.g, P.L);
  PrimalValue out;
  if (const auto* q = s.full_space_quadratic()) {
    const QuadraticExtremum m = quadratic_inf(*q);
    out.value = m.value;
    out.argmin = m.point;
    out.closed_form = true;
    out.unbounded_suspected = m.value == -kInf;
    return out;
  }
  const GridResult r = grid_minimize([&](const Vector& x) { return s(x); }, P.x_search);
  out.value = r.value;
  if (r.argmax.size() == P.n()) out.argmin = r.argmax;
  out.grid_truncated = true;
  out.unbounded_suspected = r.on_boundary && !s.domain_box();
  return out;
}

struct DualityFlags {
  bool grid_truncated = false;
  bool unbounded_suspected = false;
};

struct DualityReport {
  double primal = kInf;
  double dual_conjugate = -kInf;
  double gap = kInf;
  std::optional<GeneralizedQuadratic> attaining_psi;
  std::optional<Vector> primal_argmin;
  DualityFlags flags;
  bool weak_duality_holds = true;
  std::int64_t evaluations = 0;
};

inline double extended_gap(double primal, double dual) {
  if (std::isinf(primal) && std::isinf(dual) && (primal > 0) == (dual > 0)) return 0.0;
  return primal - dual;
}

inline bool weakly_below(double lower, double upper, double tol = 1e-6) {
  if (lower == -kInf || upper == kInf) return true;
  if (upper == -kInf || lower == kInf) return false;
  return lower <= upper + tol * std::max(1.0, std::abs(upper));
}

/// sup over psi_search of -beta^c(0, psi).
inline DualityReport dcp_value(const ProblemInstance& P) {
  DualityReport rep;
  const PrimalValue pv = primal_value(P);
  rep.primal = pv.value;
  rep.primal_argmin = pv.argmin;
  const FamilyResult r = family_maximize(P.Psi, P.psi_search, [&](const GeneralizedQuadratic& psi) {
    const double b = beta_conjugate_zero(P, psi);
    return b == kInf ? -kInf : -b;
  });
  rep.dual_conjugate = r.value;
  if (r.value > -kInf) rep.attaining_psi = r.member;
  rep.evaluations = r.evaluations;
  rep.gap = extended_gap(rep.primal, rep.dual_conjugate);
  rep.flags.grid_truncated = true;  // the sup over Psi is always truncated
  rep.flags.unbounded_suspected = pv.unbounded_suspected || r.on_boundary;
  rep.weak_duality_holds = weakly_below(rep.dual_conjugate, rep.primal);
  return rep;
}

struct WeakDualityCheck {
  double left = 0.0;   // (f + g o L)*(phi)
  double right = 0.0;  // inf_psi (f + psi o L)*(phi) + g*(psi), truncated
  bool holds = true;
};

inline WeakDualityCheck weak_duality_check(const ProblemInstance& P, const GeneralizedQuadratic& phi) {
  WeakDualityCheck out;
  out.left = conjugate(compose_sum(P.f, P.g, P.L), phi, P.x_search).value;
  const FamilyResult r = family_maximize(P.Psi, P.psi_search, [&](const GeneralizedQuadratic& psi) {
    const double v = extended_sum(composite_conjugate(P, psi, phi).value, g_conjugate(P, psi).value);
    return v == kInf ? -kInf : -v;
  });
  out.right = -r.value;
  out.holds = weakly_below(out.left, out.right);
  return out;
}

// ---------------------------------------------------------------------------
// Certificates

struct GapCertificate {
  enum class Kind { Thm42, Thm43, Thm44 };
  double eps = 0.0;
  Vector x;
  GeneralizedQuadratic phi = GeneralizedQuadratic::zero(1);
  GeneralizedQuadratic psi = GeneralizedQuadratic::zero(1);
  Kind kind = Kind::Thm43;
};

inline bool globally_nonnegative(const GeneralizedQuadratic& q, double tol) {
  return quadratic_inf(q).value >= -tol;
}

struct Thm42Verdict {
  bool psi_in_subdiff = false;
  bool inequality = false;
  double lhs = 0.0;  // (f + psi o L)*(0)
  double rhs = 0.0;  // -f(x) - psi(Lx) + eps
  bool ok() const { return psi_in_subdiff && inequality; }
  explicit operator bool() const { return ok(); }
};

inline Thm42Verdict verify_certificate_thm42(const ProblemInstance& P, const GapCertificate& c) {
  if (c.kind != GapCertificate::Kind::Thm42) throw std::invalid_argument("verify_certificate_thm42: wrong kind");
  if (!(c.eps > 0.0)) throw std::invalid_argument("certificate eps must be positive");
  require_dim(c.x.size(), P.n(), "certificate x");
  const double fx = P.f(c.x);
  if (fx == kInf) throw std::invalid_argument("verify_certificate_thm42: x is not in dom f");
  Thm42Verdict v;
  const Vector Lx = P.L(c.x);
  v.psi_in_subdiff = P.g(Lx) < kInf && eps_subdiff_contains(P.g, c.psi, Lx, c.eps, Engine::Auto, P.y_window);
  v.lhs = composite_conjugate(P, c.psi, GeneralizedQuadratic::zero(P.n())).value;
  v.rhs = -fx - c.psi(Lx) + c.eps;
  v.inequality = v.lhs <= v.rhs + 1e-9;
  return v;
}

struct Thm43Verdict {
  bool phi_in_family = false;
  bool psi_in_family = false;
  bool a_phi_in_subdiff = false;
  bool b_psi_in_subdiff = false;
  bool c_lower_bound = false;  // phi + psi o L >= -eps everywhere
  bool d_upper_bound = false;  // phi(x) + psi(Lx) <= eps
  bool exact_zero = false;     // phi + psi o L == 0 identically
  double min_sum = 0.0;
  bool ok() const {
    return phi_in_family && psi_in_family && a_phi_in_subdiff && b_psi_in_subdiff && c_lower_bound && d_upper_bound;
  }
  explicit operator bool() const { return ok(); }
};

inline Thm43Verdict verify_certificate_thm43(const ProblemInstance& P, const GapCertificate& c) {
  if (c.kind == GapCertificate::Kind::Thm42) throw std::invalid_argument("verify_certificate_thm43: wrong kind");
  if (!(c.eps > 0.0)) throw std::invalid_argument("certificate eps must be positive");
  require_dim(c.x.size(), P.n(), "certificate x");
  require_dim(c.phi.dim(), P.n(), "certificate phi");
  require_dim(c.psi.dim(), P.m(), "certificate psi");
  Thm43Verdict v;
  const double tol = tolerance();
  v.phi_in_family = family_contains(P.Phi, c.phi, tol);
  v.psi_in_family = family_contains(P.Psi, c.psi, tol);
  const Vector Lx = P.L(c.x);
  v.a_phi_in_subdiff = P.f(c.x) < kInf && eps_subdiff_contains(P.f, c.phi, c.x, c.eps, Engine::Auto, P.x_search);
  v.b_psi_in_subdiff = P.g(Lx) < kInf && eps_subdiff_contains(P.g, c.psi, Lx, c.eps, Engine::Auto, P.y_window);
  const GeneralizedQuadratic sum = c.phi + pullback(c.psi, P.L);
  v.min_sum = quadratic_inf(sum).value;
  v.c_lower_bound = v.min_sum >= -c.eps - 1e-9;
  v.d_upper_bound = sum(c.x) <= c.eps + 1e-9;
  v.exact_zero = sum.is_zero(tol);
  return v;
}

inline std::vector<double> default_eps_ladder() { return {1, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}; }

struct Thm44Verdict {
  std::vector<Thm43Verdict> per_eps;
  bool all_certificates = false;
  bool value_matches = false;
  double primal = 0.0;
  double value_at_x = 0.0;
  bool ok() const { return all_certificates && value_matches; }
  explicit operator bool() const { return ok(); }
};

inline Thm44Verdict verify_optimality_thm44(const ProblemInstance& P, const Vector& x,
                                            const std::vector<GapCertificate>& family, double tol = 1e-6) {
  if (family.empty()) throw std::invalid_argument("verify_optimality_thm44: empty certificate family");
  for (size_t i = 0; i < family.size(); ++i) {
    if (family[i].x.size() != x.size() || family[i].x != x)
      throw std::invalid_argument("verify_optimality_thm44: certificates must share the point x");
    if (i > 0 && !(family[i].eps < family[i - 1].eps))
      throw std::invalid_argument("verify_optimality_thm44: eps must be strictly decreasing");
  }
  Thm44Verdict v;
  v.all_certificates = true;
  for (const auto& c : family) {
    v.per_eps.push_back(verify_certificate_thm43(P, c));
    v.all_certificates = v.all_certificates && v.per_eps.back().ok();
  }
  v.primal = primal_value(P).value;
  v.value_at_x = P.f(x) + P.g(P.L(x));
  v.value_matches = std::isfinite(v.primal) && std::abs(v.primal - v.value_at_x) <= tol;
  return v;
}

/// Side conditions for decomposing the composite conjugate: phi - psi o L in Phi
/// (or phi + psi o L in Phi).
inline bool cond_cp1(const ProblemInstance& P, const GeneralizedQuadratic& phi, const GeneralizedQuadratic& psi) {
  return family_contains(P.Phi, phi - pullback(psi, P.L), tolerance());
}
inline bool cond_cp(const ProblemInstance& P, const GeneralizedQuadratic& phi, const GeneralizedQuadratic& psi) {
  return family_contains(P.Phi, phi + pullback(psi, P.L), tolerance());
}

// ---------------------------------------------------------------------------
// Epigraphs

struct EpiPoint {
  GeneralizedQuadratic phi;
  double r = 0.0;
};

enum class EpiTarget { FStar, GStar, GLStar, SumStar };

inline double target_conjugate(const ProblemInstance& P, EpiTarget t, const GeneralizedQuadratic& phi) {
  switch (t) {
    case EpiTarget::FStar: return conjugate(P.f, phi, P.x_search).value;
    case EpiTarget::GStar: return conjugate(P.g, phi, P.y_window).value;
    case EpiTarget::GLStar: return conjugate(compose(P.g, P.L), phi, P.x_search).value;
    case EpiTarget::SumStar: return conjugate(compose_sum(P.f, P.g, P.L), phi, P.x_search).value;
  }
  return kInf;
}

inline bool epi_contains(EpiTarget t, const EpiPoint& p, const ProblemInstance& P) {
  const double v = target_conjugate(P, t, p.phi);
  return v < kInf && v <= p.r + 1e-9;
}

struct EpiDecomposition {
  std::optional<std::pair<EpiPoint, EpiPoint>> parts;  // (in epi f*, in epi g*)
  std::optional<GeneralizedQuadratic> psi;
  bool inconclusive = false;  // search failed; not a proof that no split exists
  explicit operator bool() const { return parts.has_value(); }
};

/// Split p in epi (f + g o L)* as (phi - psi o L, r - g*(psi)) + (psi, g*(psi)).
inline EpiDecomposition epi_decompose(const ProblemInstance& P, const EpiPoint& p) {
  if (!epi_contains(EpiTarget::SumStar, p, P))
    throw std::invalid_argument("epi_decompose: point is not in the composite epigraph");

  // J(psi) = f*(phi - psi o L) + g*(psi); a split exists at psi iff J(psi) <= r.
  auto J = [&](const GeneralizedQuadratic& psi) -> double {
    const GeneralizedQuadratic rest = p.phi - pullback(psi, P.L);
    if (!family_contains(P.Phi, rest, tolerance())) return kInf;
    const double gs = g_conjugate(P, psi).value;
    if (gs == kInf) return kInf;
    return extended_sum(conjugate(P.f, rest, P.x_search).value, gs);
  };
  auto build = [&](const GeneralizedQuadratic& psi) -> std::optional<std::pair<EpiPoint, EpiPoint>> {
    const GeneralizedQuadratic rest = p.phi - pullback(psi, P.L);
    if (!family_contains(P.Phi, rest, tolerance())) return std::nullopt;
    const double gs = g_conjugate(P, psi).value;
    if (!std::isfinite(gs)) return std::nullopt;
    EpiPoint pf{rest, p.r - gs}, pg{psi, gs};
    if (!epi_contains(EpiTarget::FStar, pf, P) || !epi_contains(EpiTarget::GStar, pg, P)) return std::nullopt;
    return std::make_pair(pf, pg);
  };

  EpiDecomposition out;
  const GeneralizedQuadratic zero = GeneralizedQuadratic::zero(P.m());
  if (auto parts = build(zero)) {
    out.parts = parts;
    out.psi = zero;
    return out;
  }
  const FamilyResult r = family_maximize(P.Psi, P.psi_search, [&](const GeneralizedQuadratic& psi) {
    const double j = J(psi);
    return j == kInf ? -kInf : -j;
  });
  if (r.value > -kInf && r.member) {
    if (auto parts = build(*r.member)) {
      out.parts = parts;
      out.psi = r.member;
      return out;
    }
  }
  out.inconclusive = true;
  return out;
}

struct Cor53Witness {
  std::optional<EpiPoint> point;
  std::optional<GeneralizedQuadratic> psi;
  std::optional<GeneralizedQuadratic> phi1;
  std::optional<GeneralizedQuadratic> phi2;
  std::optional<GeneralizedQuadratic> phi_eps;
  std::optional<Vector> x_eps;
  double eps1 = 0.0;
  double eps2 = 0.0;
};

struct Cor53Result {
  bool holds = false;
  std::string reason;
  explicit operator bool() const { return holds; }
};

namespace detail {

// inf_x h(x) for h = psi o L - g o L: exact for quadratic g, grid otherwise.
inline double inf_psi_minus_g(const ProblemInstance& P, const GeneralizedQuadratic& psi) {
  if (const auto* gq = P.g.full_space_quadratic()) return quadratic_inf(pullback(psi - *gq, P.L)).value;
  const Objective gl = compose(P.g, P.L);
  return grid_minimize(
             [&](const Vector& x) {
               const double v = gl(x);
               return v == kInf ? kInf : pullback(psi, P.L)(x) - v;
             },
             P.x_search)
      .value;
}

}  // namespace detail

/// Witness-level check of the side conditions (a)-(d) for decomposing epigraphs.
inline Cor53Result cor53_condition_check(const ProblemInstance& P, char which, const Cor53Witness& w) {
  const double tol = tolerance();
  auto fail = [](std::string why) { return Cor53Result{false, std::move(why)}; };
  switch (which) {
    case 'a': {
      if (!w.point || !w.psi) throw std::invalid_argument("cor53 (a): needs point and psi");
      if (!epi_contains(EpiTarget::GLStar, *w.point, P)) return fail("point is not in epi (g o L)*");
      if (!family_contains(P.Psi, *w.psi, tol)) return fail("psi is not in Psi");
      if (!globally_nonnegative(pullback(*w.psi, P.L) - w.point->phi, tol)) return fail("phi <= psi o L fails");
      if (!(g_conjugate(P, *w.psi).value <= w.point->r + 1e-9)) return fail("g*(psi) > r");
      return {true, "ok"};
    }
    case 'b': {
      if (!w.psi) throw std::invalid_argument("cor53 (b): needs psi");
      if (!family_contains(P.Psi, *w.psi, tol)) return fail("psi is not in Psi");
      if (!(g_conjugate(P, *w.psi).value <= 1e-9)) return fail("g*(psi) > 0");
      if (detail::inf_psi_minus_g(P, *w.psi) < -tol) return fail("g o L <= psi o L fails");
      return {true, "ok"};
    }
    case 'c': {
      if (!w.point || !w.psi || !w.phi1 || !w.phi2) throw std::invalid_argument("cor53 (c): needs point, psi, phi1, phi2");
      if (!epi_contains(EpiTarget::SumStar, *w.point, P)) return fail("point is not in epi (f + g o L)*");
      if (!family_contains(P.Phi, *w.phi1, tol) || !family_contains(P.Phi, *w.phi2, tol))
        return fail("phi1 or phi2 is not in Phi");
      const GeneralizedQuadratic psiL = pullback(*w.psi, P.L);
      if (!globally_nonnegative(w.point->phi - psiL - *w.phi1, tol)) return fail("phi - psi o L >= phi1 fails");
      if (!globally_nonnegative(psiL - *w.phi2, tol)) return fail("psi o L >= phi2 fails");
      return {true, "ok"};
    }
    case 'd': {
      if (!w.psi || !w.phi_eps || !w.x_eps) throw std::invalid_argument("cor53 (d): needs psi, phi_eps, x_eps");
      if (!(w.eps1 > 0.0 && w.eps2 > 0.0)) throw std::invalid_argument("cor53 (d): eps1, eps2 must be positive");
      if (!P.Phi.closed_under_differences()) return fail("Phi - Phi is not contained in Phi");
      const Objective gl = compose(P.g, P.L);
      if (gl(*w.x_eps) == kInf) return fail("x_eps is outside dom (g o L)");
      if (!eps_subdiff_contains(gl, *w.phi_eps, *w.x_eps, w.eps2, Engine::Auto, P.x_search))
        return fail("phi_eps is not in the eps2-subdifferential of g o L");
      const GeneralizedQuadratic diff = pullback(*w.psi, P.L) - *w.phi_eps;
      const double sup = quadratic_sup(diff).value;
      if (!(diff(*w.x_eps) + w.eps1 > sup)) return fail("strict sup inequality fails");
      return {true, "ok"};
    }
    default: throw std::invalid_argument("cor53_condition_check: condition must be one of a, b, c, d");
  }
}

}  // namespace abconv
