#pragma once

// Lagrangian L(x, psi) = f(x) + psi(Lx) - g*(psi), its primal/dual values,
// the intersection property, and the perturbation value function V.

#include <atomic>
#include <map>
#include <mutex>
#include <random>
#include <vector>

#include "abconv/duality.hpp"

namespace abconv {

/// Instance plus a write-once memo of g*(psi), safe for concurrent sweeps.
class LagrangianContext {
 public:
  explicit LagrangianContext(ProblemInstance inst) : inst_(std::move(inst)), psi_search_(inst_.psi_search) {}
  LagrangianContext(ProblemInstance inst, ParameterSearch psi_search)
      : inst_(std::move(inst)), psi_search_(psi_search) {
    psi_search_.validate();
  }

  const ProblemInstance& instance() const { return inst_; }
  const ParameterSearch& psi_search() const { return psi_search_; }

  double gstar(const GeneralizedQuadratic& psi) const {
    std::vector<double> key = key_of(psi);
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    const double v = g_conjugate(inst_, psi).value;
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.emplace(std::move(key), v).first->second;  // first writer wins
  }

  size_t cache_size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return cache_.size();
  }

 private:
  static std::vector<double> key_of(const GeneralizedQuadratic& q) {
    std::vector<double> k(q.A().data(), q.A().data() + q.A().size());
    k.insert(k.end(), q.u().data(), q.u().data() + q.u().size());
    k.push_back(q.c());
    return k;
  }

  ProblemInstance inst_;
  ParameterSearch psi_search_;
  mutable std::mutex mu_;
  mutable std::map<std::vector<double>, double> cache_;
};

/// f(x) + psi(Lx) - g*(psi); +inf off dom f, -inf when g*(psi) = +inf.
inline double lagrangian_value(const LagrangianContext& ctx, const Vector& x, const GeneralizedQuadratic& psi) {
  const ProblemInstance& P = ctx.instance();
  require_dim(psi.dim(), P.m(), "lagrangian_value: psi");
  const double fx = P.f(x);
  if (fx == kInf) return kInf;
  const double gs = ctx.gstar(psi);
  if (gs == kInf) return -kInf;
  return fx + psi(P.L(x)) - gs;
}

/// inf_x f(x) + psi(Lx): exact for quadratic f, grid otherwise.
inline double inf_f_plus_psi(const ProblemInstance& P, const GeneralizedQuadratic& psi) {
  const Objective h = add_quadratic(P.f, pullback(psi, P.L));
  if (const auto* q = h.full_space_quadratic()) return quadratic_inf(*q).value;
  return -conjugate(h, GeneralizedQuadratic::zero(P.n()), P.x_search).value;
}

struct LagrangeValue {
  double value = 0.0;
  std::optional<GeneralizedQuadratic> attaining_psi;
  std::optional<Vector> argmin;
  bool grid_truncated = false;
  bool closed_form = false;
  std::int64_t excluded = 0;  // psi with g*(psi) = +inf, left out of the sup
};

/// sup_psi inf_x L(x, psi) over the context's psi grid.
inline LagrangeValue ld_value(const LagrangianContext& ctx) {
  const ProblemInstance& P = ctx.instance();
  std::atomic<std::int64_t> excluded{0};
  const FamilyResult r = family_maximize(P.Psi, ctx.psi_search(), [&](const GeneralizedQuadratic& psi) {
    const double gs = ctx.gstar(psi);
    if (gs == kInf) {
      excluded.fetch_add(1, std::memory_order_relaxed);
      return -kInf;
    }
    const double inner = inf_f_plus_psi(P, psi);
    if (inner == -kInf) return -kInf;
    return inner - gs;
  });
  LagrangeValue out;
  out.value = r.value;
  if (r.value > -kInf) out.attaining_psi = r.member;
  out.grid_truncated = true;
  out.excluded = excluded.load();
  return out;
}

/// g**(y) with the cached conjugate: exact for quadratic g, grid otherwise.
inline double g_biconjugate(const LagrangianContext& ctx, const Vector& y) {
  const ProblemInstance& P = ctx.instance();
  if (const auto* gq = P.g.full_space_quadratic()) return biconjugate_closed_form(*gq, P.Psi, y).value;
  return family_maximize(P.Psi, ctx.psi_search(), [&](const GeneralizedQuadratic& psi) {
           const double gs = ctx.gstar(psi);
           if (gs == kInf || gs == -kInf) return -kInf;
           return psi(y) - gs;
         })
      .value;
}

namespace detail {

// inf_x f(x) + c for a constant c (possibly -inf).
inline LagrangeValue inf_f_plus_constant(const ProblemInstance& P, double c) {
  LagrangeValue out;
  out.closed_form = true;
  if (c == -kInf) {
    out.value = -kInf;
    return out;
  }
  if (const auto* q = P.f.full_space_quadratic()) {
    const QuadraticExtremum m = quadratic_inf(*q);
    out.value = m.value == -kInf ? -kInf : m.value + c;
    out.argmin = m.point;
    return out;
  }
  const GridResult r = grid_minimize([&](const Vector& x) { return P.f(x); }, P.x_search);
  out.value = r.value + c;
  out.grid_truncated = true;
  out.closed_form = false;
  return out;
}

}  // namespace detail

/// inf_x sup_psi L(x, psi) = inf_x f(x) + g**(Lx).
inline LagrangeValue lp_value(const LagrangianContext& ctx) {
  const ProblemInstance& P = ctx.instance();
  if (const auto* gq = P.g.full_space_quadratic()) {
    // g** is g itself or the constant inf g (see biconjugate_closed_form).
    Eigen::SelfAdjointEigenSolver<Matrix> es(gq->A(), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    const double tol = 1e-9 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (P.Psi.curvature.lower() <= lmin + tol) {
      const PrimalValue pv = primal_value(P);
      LagrangeValue out;
      out.value = pv.value;
      out.argmin = pv.argmin;
      out.closed_form = pv.closed_form;
      out.grid_truncated = pv.grid_truncated;
      return out;
    }
    return detail::inf_f_plus_constant(P, quadratic_inf(*gq).value);
  }
  const GridResult r = grid_minimize(
      [&](const Vector& x) {
        const double fx = P.f(x);
        if (fx == kInf) return kInf;
        const double b = g_biconjugate(ctx, P.L(x));
        return b == -kInf ? -kInf : fx + b;
      },
      P.x_search);
  LagrangeValue out;
  out.value = r.value;
  if (r.argmax.size() == P.n()) out.argmin = r.argmax;
  out.grid_truncated = true;
  return out;
}

struct CondCpLp {
  double lp = 0.0;
  double primal = 0.0;
  bool holds = false;
  bool grid_truncated = false;
  explicit operator bool() const { return holds; }
};

/// inf f + g**(L.) == inf f + g(L.) within tol.
inline CondCpLp check_cond_cp_lp(const LagrangianContext& ctx, double tol = 1e-6) {
  const LagrangeValue lp = lp_value(ctx);
  const PrimalValue pv = primal_value(ctx.instance());
  CondCpLp out;
  out.lp = lp.value;
  out.primal = pv.value;
  out.grid_truncated = lp.grid_truncated || pv.grid_truncated;
  if (std::isinf(lp.value) || std::isinf(pv.value))
    out.holds = lp.value == pv.value;
  else
    out.holds = std::abs(lp.value - pv.value) <= tol * std::max(1.0, std::abs(pv.value));
  return out;
}

/// Whether g is Psi-convex at Lx0, for x0 (near-)optimal in the primal problem.
inline bool psi_convexity_at_optimum(const LagrangianContext& ctx, const Vector& x0, double tol = 1e-6) {
  const ProblemInstance& P = ctx.instance();
  const double primal = primal_value(P).value;
  const double at = P.f(x0) + P.g(P.L(x0));
  if (!std::isfinite(primal) || !std::isfinite(at) || std::abs(at - primal) > tol * std::max(1.0, std::abs(primal)))
    throw std::invalid_argument("psi_convexity_at_optimum: x0 is not near-optimal");
  const Vector y = P.L(x0);
  const double gy = P.g(y);
  const double b = g_biconjugate(ctx, y);
  return b != -kInf && std::abs(b - gy) <= tol * std::max(1.0, std::abs(gy));
}

// ---------------------------------------------------------------------------
// Intersection property

struct IntersectionWitness {
  double t0 = 0.0;
  double alpha = 0.0;
  double min_value = -kInf;  // inf_x t0 phi1 + (1 - t0) phi2
};

/// m(t) = inf_x t phi1(x) + (1 - t) phi2(x), exactly.
inline double intersection_m(const GeneralizedQuadratic& p1, const GeneralizedQuadratic& p2, double t) {
  return quadratic_inf(combine(p1, p2, t, 1.0 - t)).value;
}

namespace detail {

inline double min_eig(const Matrix& A) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Golden-section maximization of a concave h on [a, b]; ties go to smaller t.
template <class H>
double golden_max(H h, double a, double b, double tol = 1e-10) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double hc = h(c), hd = h(d);
  while (b - a > tol) {
    if (hc >= hd) {
      b = d;
      d = c;
      hd = hc;
      c = b - r * (b - a);
      hc = h(c);
    } else {
      a = c;
      c = d;
      hc = hd;
      d = a + r * (b - a);
      hd = h(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

struct IntersectionSearch {
  std::optional<IntersectionWitness> witness;
  double best_t = 0.0;
  double best_m = -kInf;  // max_t m(t)
};

/// Exact max of the concave m over [0, 1]. A(t) = t A1 + (1-t) A2 must be PSD
/// for m(t) > -inf; lambda_min(A(t)) is concave, so the PSD set is an interval.
/// Inside it, ker A(t) = ker A1 cap ker A2 and finiteness is linear in t.
inline IntersectionSearch intersection_search(const GeneralizedQuadratic& p1, const GeneralizedQuadratic& p2,
                                              double alpha) {
  require_dim(p2.dim(), p1.dim(), "intersection_property");
  const Matrix& A1 = p1.A();
  const Matrix& A2 = p2.A();
  const double scale = std::max({1.0, A1.cwiseAbs().maxCoeff(), A2.cwiseAbs().maxCoeff()});
  const double eig_tol = 1e-9 * scale;
  auto lam = [&](double t) { return detail::min_eig(t * A1 + (1.0 - t) * A2); };

  IntersectionSearch out;
  std::vector<double> cands;
  const double tpeak = detail::golden_max(lam, 0.0, 1.0);
  double best_lam = lam(tpeak);
  for (double t : {0.0, 1.0}) best_lam = std::max(best_lam, lam(t));
  if (best_lam >= -eig_tol) {
    double peak = tpeak;
    if (lam(0.0) >= -eig_tol) peak = 0.0;
    else if (lam(1.0) >= -eig_tol && lam(peak) < -eig_tol) peak = 1.0;
    // Bisect for the ends of the PSD interval around peak.
    auto edge = [&](double inside, double outside) {
      if (lam(outside) >= -eig_tol) return outside;
      for (int i = 0; i < 200 && std::abs(outside - inside) > 1e-15; ++i) {
        const double mid = 0.5 * (inside + outside);
        (lam(mid) >= -eig_tol ? inside : outside) = mid;
      }
      return inside;
    };
    const double tl = edge(peak, 0.0), tr = edge(peak, 1.0);
    cands = {tl, tr};
    if (tr - tl > 1e-12) {
      // Kernel shared by the interior: ker A1 cap ker A2 = ker (A1'A1 + A2'A2).
      Eigen::SelfAdjointEigenSolver<Matrix> es(A1.transpose() * A1 + A2.transpose() * A2);
      std::vector<int> kidx;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) <= eig_tol * scale) kidx.push_back(static_cast<int>(i));
      Vector p(kidx.size()), q(kidx.size());  // P u(t) = p + t q
      for (size_t j = 0; j < kidx.size(); ++j) {
        const Vector w = es.eigenvectors().col(kidx[j]);
        p(j) = w.dot(p2.u());
        q(j) = w.dot(p1.u() - p2.u());
      }
      const double utol = 1e-9 * std::max({1.0, p1.u().cwiseAbs().maxCoeff(), p2.u().cwiseAbs().maxCoeff()});
      if (kidx.empty() || (p.cwiseAbs().maxCoeff() <= utol && q.cwiseAbs().maxCoeff() <= utol)) {
        cands.push_back(detail::golden_max(
            [&](double t) {
              const double v = intersection_m(p1, p2, t);
              return v == -kInf ? -1e300 : v;
            },
            tl, tr));
      } else if (q.cwiseAbs().maxCoeff() > utol) {
        const double ts = -p.dot(q) / q.squaredNorm();
        if ((p + ts * q).cwiseAbs().maxCoeff() <= utol && ts >= tl && ts <= tr) cands.push_back(ts);
      }
    }
    std::sort(cands.begin(), cands.end());
    for (double t : cands) {
      const double v = intersection_m(p1, p2, t);
      if (v > out.best_m) {
        out.best_m = v;
        out.best_t = t;
      }
    }
  }
  if (out.best_m >= alpha - 1e-9) out.witness = IntersectionWitness{out.best_t, alpha, out.best_m};
  return out;
}

inline std::optional<IntersectionWitness> intersection_property(const GeneralizedQuadratic& p1,
                                                                const GeneralizedQuadratic& p2, double alpha) {
  return intersection_search(p1, p2, alpha).witness;
}

/// Definition-level check on a finite x grid (no refinement) and a t grid:
/// for every t, [t phi1 + (1-t) phi2 < alpha] misses [phi1 < alpha] or [phi2 < alpha].
inline bool intersection_property_bruteforce(const GeneralizedQuadratic& p1, const GeneralizedQuadratic& p2,
                                             double alpha, const GridSpec& grid, int t_points = 1001) {
  require_dim(p2.dim(), p1.dim(), "intersection_property_bruteforce");
  require_dim(grid.box.dim(), p1.dim(), "intersection_property_bruteforce: grid");
  grid.validate();
  if (t_points < 2) throw std::invalid_argument("intersection_property_bruteforce: need >= 2 t points");
  const int d = p1.dim();
  const int P = grid.points_per_axis;
  std::int64_t total = 1;
  for (int k = 0; k < d; ++k) total *= P;
  std::vector<double> v1(static_cast<size_t>(total)), v2(static_cast<size_t>(total));
  Vector x(d);
  for (std::int64_t i = 0; i < total; ++i) {
    std::int64_t idx = i;
    for (int k = d - 1; k >= 0; --k) {
      const int j = static_cast<int>(idx % P);
      idx /= P;
      x(k) = grid.box.lower(k) + (grid.box.upper(k) - grid.box.lower(k)) * j / (P - 1);
    }
    v1[static_cast<size_t>(i)] = p1(x);
    v2[static_cast<size_t>(i)] = p2(x);
  }
  for (int k = 0; k < t_points; ++k) {
    const double t = static_cast<double>(k) / (t_points - 1);
    bool meets1 = false, meets2 = false;
    for (size_t i = 0; i < v1.size() && !(meets1 && meets2); ++i) {
      if (t * v1[i] + (1.0 - t) * v2[i] < alpha) {
        meets1 = meets1 || v1[i] < alpha;
        meets2 = meets2 || v2[i] < alpha;
      }
    }
    if (meets1 && meets2) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Value function and Prop-style support checks

/// V(y) = inf_x f(x) + g(Lx + y).
inline PrimalValue value_function(const LagrangianContext& ctx, const Vector& y) {
  const ProblemInstance& P = ctx.instance();
  require_dim(y.size(), P.m(), "value_function: y");
  if (y.isZero(0.0)) return primal_value(P);
  std::optional<Objective> gy;
  if (const auto* gq = P.g.full_space_quadratic()) {
    gy.emplace(shift(*gq, y));
  } else {
    std::optional<Box> dom;
    if (P.g.domain_box()) dom = Box(P.g.domain_box()->lower - y, P.g.domain_box()->upper - y);
    const Objective g = P.g;
    gy.emplace(Objective::unchecked(P.m(), [g, y](const Vector& z) { return g(z + y); }, dom));
  }
  ProblemInstance shifted(P.f, *gy, P.L, P.Phi, P.Psi, P.psi_search, P.x_search, P.y_window, P.name);
  return primal_value(shifted);
}

struct ValueFunctionProbe {
  std::vector<double> radius_ladder = {1, 1e-1, 1e-2, 1e-3, 1e-4};
  int samples_per_radius = 32;
  double eps = 1e-3;

  void validate() const {
    if (radius_ladder.empty()) throw std::invalid_argument("ValueFunctionProbe: empty ladder");
    for (size_t i = 0; i < radius_ladder.size(); ++i) {
      if (!(radius_ladder[i] > 0.0)) throw std::invalid_argument("ValueFunctionProbe: radii must be positive");
      if (i > 0 && !(radius_ladder[i] < radius_ladder[i - 1]))
        throw std::invalid_argument("ValueFunctionProbe: radii must be strictly decreasing");
    }
    if (samples_per_radius < 8) throw std::invalid_argument("ValueFunctionProbe: need >= 8 samples per radius");
    if (!(eps > 0.0)) throw std::invalid_argument("ValueFunctionProbe: eps must be positive");
  }
};

struct LscReport {
  bool lsc = false;                 // no violation at the smallest radius
  double v0 = 0.0;
  std::vector<int> violations;      // per radius
  bool sampled = true;
};

/// Sampled lower-semicontinuity test of V at 0.
inline LscReport lsc_probe_at_zero(const LagrangianContext& ctx, const ValueFunctionProbe& probe = {}) {
  probe.validate();
  const int m = ctx.instance().m();
  LscReport out;
  out.v0 = value_function(ctx, Vector::Zero(m)).value;
  if (!std::isfinite(out.v0)) throw std::invalid_argument("lsc_probe_at_zero: V(0) is not finite");
  std::mt19937_64 rng(0x15c);
  std::normal_distribution<double> N(0.0, 1.0);
  for (double r : probe.radius_ladder) {
    std::vector<Vector> ys;
    for (int i = 0; i < m && static_cast<int>(ys.size()) < probe.samples_per_radius; ++i) {
      for (double s : {1.0, -1.0}) {
        Vector y = Vector::Zero(m);
        y(i) = s * r;
        ys.push_back(y);
      }
    }
    while (static_cast<int>(ys.size()) < probe.samples_per_radius) {
      Vector y(m);
      for (int i = 0; i < m; ++i) y(i) = N(rng);
      if (y.norm() == 0.0) continue;
      ys.push_back(y.normalized() * r);  // uniform on the sphere of radius r
    }
    int bad = 0;
    for (const auto& y : ys)
      if (!(value_function(ctx, y).value > out.v0 - probe.eps)) ++bad;
    out.violations.push_back(bad);
  }
  out.lsc = out.violations.back() == 0;
  return out;
}

struct Prop69Result {
  bool psi_in_family = false;
  bool a_support = false;      // psi <= g everywhere
  bool b_alpha_below = false;  // alpha <= inf f + psi o L
  bool c_sandwich = false;     // f(x0) <= alpha <= psi(Lx0)
  bool d_in_A = false;         // g**(Lx0) <= 0 over the psi grid
  bool d_alternative = false;  // g(Lx0) <= 0
  double inf_f_psi = 0.0;
  bool holds() const {
    return psi_in_family && a_support && b_alpha_below && c_sandwich && (d_in_A || d_alternative);
  }
  explicit operator bool() const { return holds(); }
};

inline Prop69Result prop69_check(const LagrangianContext& ctx, const GeneralizedQuadratic& psi, const Vector& x0,
                                 double alpha) {
  const ProblemInstance& P = ctx.instance();
  require_dim(psi.dim(), P.m(), "prop69_check: psi");
  require_dim(x0.size(), P.n(), "prop69_check: x0");
  const double tol = tolerance();
  Prop69Result out;
  out.psi_in_family = family_contains(P.Psi, psi, tol);
  if (const auto* gq = P.g.full_space_quadratic()) {
    out.a_support = quadratic_inf(*gq - psi).value >= -tol;
  } else {
    const GridResult r = grid_minimize(
        [&](const Vector& y) {
          const double gy = P.g(y);
          return gy == kInf ? kInf : gy - psi(y);
        },
        P.y_window);
    out.a_support = r.value >= -tol;
  }
  out.inf_f_psi = inf_f_plus_psi(P, psi);
  out.b_alpha_below = alpha <= out.inf_f_psi + tol;
  const Vector y0 = P.L(x0);
  out.c_sandwich = P.f(x0) <= alpha + tol && alpha <= psi(y0) + tol;
  out.d_in_A = g_biconjugate(ctx, y0) <= tol;
  out.d_alternative = P.g(y0) <= tol;
  return out;
}

}  // namespace abconv
