#pragma once

// Brute-force grid search with refinement, and the parameter sweep over an
// elementary family. Everything here is a truncated search: callers surface that.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "abconv/objective.hpp"

namespace abconv {

struct GridSpec {
  Box box;
  int points_per_axis = 201;
  int refine_rounds = 2;  // each round shrinks the box 10x around the incumbent

  GridSpec() = default;
  GridSpec(Box b, int points = 201, int rounds = 2)
      : box(std::move(b)), points_per_axis(points), refine_rounds(rounds) {
    validate();
  }

  void validate() const {
    if (points_per_axis < 3) throw std::invalid_argument("GridSpec: points_per_axis must be >= 3");
    if (refine_rounds < 0) throw std::invalid_argument("GridSpec: refine_rounds must be >= 0");
    if (box.dim() < 1) throw std::invalid_argument("GridSpec: empty box");
    if (!box.bounded()) throw std::invalid_argument("GridSpec: box must be bounded");
    for (int i = 0; i < box.dim(); ++i)
      if (!(box.lower(i) < box.upper(i)))
        throw std::invalid_argument("GridSpec: box lower must be < upper on every axis");
  }
};

struct GridResult {
  double value = -kInf;       // -inf when every point was excluded
  Vector argmax;              // empty when value == -inf
  bool on_boundary = false;   // argmax sits on the search box boundary
  std::int64_t evaluations = 0;
};

namespace detail {

struct Best {
  double value = -kInf;
  std::int64_t index = -1;
};

// Lattice along one axis: center + (i - (P-1)/2) * step, restricted to [lo, hi].
struct Axis {
  std::vector<double> pts;
};

inline Axis make_axis(double center, double step, int P, double lo, double hi) {
  Axis ax;
  ax.pts.reserve(static_cast<size_t>(P));
  const double mid = 0.5 * (P - 1);
  for (int i = 0; i < P; ++i) {
    const double x = center + (i - mid) * step;
    // Snap rounding noise at the ends back onto the box.
    const double slack = 1e-12 * std::max(1.0, std::abs(step) * P);
    if (x < lo - slack || x > hi + slack) continue;
    ax.pts.push_back(std::clamp(x, lo, hi));
  }
  return ax;
}

// Parallel argmax over the tensor product of axes. Chunks are reduced in order
// with strict comparison, so the first index wins ties and results do not
// depend on the thread count.
inline Best sweep(const std::vector<Axis>& axes, const std::function<double(const Vector&)>& fn,
                  std::int64_t& evals) {
  const int d = static_cast<int>(axes.size());
  std::int64_t total = 1;
  for (const auto& ax : axes) total *= static_cast<std::int64_t>(ax.pts.size());
  if (total == 0) return {};
  evals += total;

  auto point_at = [&](std::int64_t idx, Vector& x) {
    for (int k = d - 1; k >= 0; --k) {
      const auto sz = static_cast<std::int64_t>(axes[k].pts.size());
      x(k) = axes[k].pts[static_cast<size_t>(idx % sz)];
      idx /= sz;
    }
  };
  auto run = [&](std::int64_t begin, std::int64_t end) {
    Best b;
    Vector x(d);
    for (std::int64_t i = begin; i < end; ++i) {
      point_at(i, x);
      const double v = fn(x);
      if (std::isnan(v)) continue;
      if (v > b.value) b = {v, i};
    }
    return b;
  };

  const unsigned threads =
      total < 4096 ? 1u : std::min<unsigned>(thread_limit(), static_cast<unsigned>(total / 1024));
  if (threads <= 1) return run(0, total);

  std::vector<Best> partial(threads);
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  const std::int64_t chunk = (total + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::int64_t b = std::min<std::int64_t>(total, t * chunk);
    const std::int64_t e = std::min<std::int64_t>(total, b + chunk);
    pool.emplace_back([&, t, b, e] {
      try {
        partial[t] = run(b, e);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
  Best best;
  for (const auto& p : partial)
    if (p.value > best.value) best = p;
  return best;
}

inline Vector decode(const std::vector<Axis>& axes, std::int64_t idx) {
  const int d = static_cast<int>(axes.size());
  Vector x(d);
  for (int k = d - 1; k >= 0; --k) {
    const auto sz = static_cast<std::int64_t>(axes[k].pts.size());
    x(k) = axes[k].pts[static_cast<size_t>(idx % sz)];
    idx /= sz;
  }
  return x;
}

}  // namespace detail

/// Maximize fn over the grid. `points` overrides points_per_axis per axis;
/// `seeds` are evaluated before the grid and win ties.
inline GridResult grid_maximize(const std::function<double(const Vector&)>& fn, const GridSpec& spec,
                                const std::vector<int>& points = {},
                                const std::vector<Vector>& seeds = {}) {
  spec.validate();
  const int d = spec.box.dim();
  std::vector<int> P(static_cast<size_t>(d), spec.points_per_axis);
  if (!points.empty()) {
    require_dim(static_cast<Eigen::Index>(points.size()), d, "grid_maximize: points per axis");
    for (int k = 0; k < d; ++k) {
      if (points[k] < 1) throw std::invalid_argument("grid_maximize: axis needs >= 1 point");
      P[k] = points[k];
    }
  }
  const Vector& lo = spec.box.lower;
  const Vector& hi = spec.box.upper;

  GridResult out;
  for (const auto& s : seeds) {
    require_dim(s.size(), d, "grid_maximize: seed");
    if (!spec.box.contains(s)) continue;
    ++out.evaluations;
    const double v = fn(s);
    if (!std::isnan(v) && v > out.value) {
      out.value = v;
      out.argmax = s;
    }
  }

  Vector step(d), center = spec.box.center();
  for (int k = 0; k < d; ++k) step(k) = P[k] > 1 ? (hi(k) - lo(k)) / (P[k] - 1) : 0.0;

  for (int round = 0; round <= spec.refine_rounds; ++round) {
    if (round > 0) {
      if (out.value == -kInf || out.value == kInf) break;
      center = out.argmax;
      step /= 10.0;
    }
    std::vector<detail::Axis> axes;
    axes.reserve(static_cast<size_t>(d));
    for (int k = 0; k < d; ++k) axes.push_back(detail::make_axis(center(k), step(k), P[k], lo(k), hi(k)));
    const detail::Best b = detail::sweep(axes, fn, out.evaluations);
    // Incumbent keeps ties: a grid point must be strictly better.
    if (b.index >= 0 && b.value > out.value) {
      out.value = b.value;
      out.argmax = detail::decode(axes, b.index);
    }
  }

  if (out.argmax.size() == d) {
    for (int k = 0; k < d; ++k) {
      const double eps = 1e-12 * std::max(1.0, hi(k) - lo(k));
      if (out.argmax(k) <= lo(k) + eps || out.argmax(k) >= hi(k) - eps) out.on_boundary = true;
    }
  }
  return out;
}

inline GridResult grid_minimize(const std::function<double(const Vector&)>& fn, const GridSpec& spec,
                                const std::vector<int>& points = {},
                                const std::vector<Vector>& seeds = {}) {
  GridResult r = grid_maximize([&](const Vector& x) { return -fn(x); }, spec, points, seeds);
  r.value = -r.value;
  return r;
}

/// Parameter grid over a family: curvature axis x slope box. Constant terms
/// are not searched (they cancel in every sup/inf this search feeds).
struct ParameterSearch {
  double curvature_clip = 10.0;  // admissible curvature range clipped to [-clip, clip]
  int curvature_points = 21;
  double slope_lower = -10.0;
  double slope_upper = 10.0;
  int slope_points = 21;
  int refine_rounds = 4;

  void validate() const {
    if (curvature_points < 3 || slope_points < 3)
      throw std::invalid_argument("ParameterSearch: at least 3 points per axis");
    if (!(slope_lower < slope_upper)) throw std::invalid_argument("ParameterSearch: empty slope box");
    if (!(curvature_clip > 0.0)) throw std::invalid_argument("ParameterSearch: curvature clip must be > 0");
    if (refine_rounds < 0) throw std::invalid_argument("ParameterSearch: refine_rounds must be >= 0");
  }
};

struct FamilyResult {
  double value = -kInf;
  std::optional<GeneralizedQuadratic> member;
  bool on_boundary = false;
  std::int64_t evaluations = 0;
};

/// Whether the family has a curvature axis to search.
inline bool has_curvature_axis(const Family& F) { return !F.curvature.is_point(); }

/// Decode a parameter vector (a?, u...) into a family member.
inline GeneralizedQuadratic family_member_from_params(const Family& F, const Vector& p) {
  if (has_curvature_axis(F)) return F.member(p(0), p.tail(F.dim), 0.0);
  const double a = F.curvature.kind == CurvatureSpec::Kind::Fixed ? F.curvature.a : 0.0;
  return F.member(a, p, 0.0);
}

/// Maximize fn over the truncated family. The zero function is evaluated first.
inline FamilyResult family_maximize(const Family& F, const ParameterSearch& S,
                                    const std::function<double(const GeneralizedQuadratic&)>& fn) {
  S.validate();
  const bool curv = has_curvature_axis(F);
  const int d = F.dim + (curv ? 1 : 0);
  Vector lo(d), hi(d);
  std::vector<int> pts(static_cast<size_t>(d), S.slope_points);
  int off = 0;
  if (curv) {
    lo(0) = std::max(F.curvature.lower(), -S.curvature_clip);
    hi(0) = std::min(F.curvature.upper(), S.curvature_clip);
    pts[0] = S.curvature_points;
    off = 1;
  }
  for (int i = 0; i < F.dim; ++i) {
    lo(off + i) = S.slope_lower;
    hi(off + i) = S.slope_upper;
  }

  FamilyResult out;
  const GeneralizedQuadratic zero = GeneralizedQuadratic::zero(F.dim);
  out.value = fn(zero);
  out.member = zero;
  out.evaluations = 1;

  GridSpec spec(Box(lo, hi), 3, S.refine_rounds);
  const GridResult r = grid_maximize(
      [&](const Vector& p) { return fn(family_member_from_params(F, p)); }, spec, pts);
  out.evaluations += r.evaluations;
  if (r.value > out.value) {
    out.value = r.value;
    out.member = family_member_from_params(F, r.argmax);
    // Only truncated sides count: a = 0 for a sign-constrained family is a true edge.
    for (int k = 0; k < d; ++k) {
      const bool natural_lo = curv && k == 0 && lo(0) == F.curvature.lower();
      const bool natural_hi = curv && k == 0 && hi(0) == F.curvature.upper();
      const double eps = 1e-12 * std::max(1.0, hi(k) - lo(k));
      if ((!natural_lo && r.argmax(k) <= lo(k) + eps) || (!natural_hi && r.argmax(k) >= hi(k) - eps))
        out.on_boundary = true;
    }
  }
  if (std::isnan(out.value)) out.value = -kInf;
  return out;
}

}  // namespace abconv
