#pragma once

// Machine-readable reports, human tables, and the worked-example reproductions.

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "abconv/harness.hpp"

namespace abconv {

inline std::string format_number(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  if (std::isnan(v)) return "nan";
  if (v == 0.0) v = 0.0;  // drop the sign of zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline json quadratic_json(const GeneralizedQuadratic& q) {
  return {{"A", detail::matrix_json(q.A())}, {"u", detail::vector_json(q.u())}, {"c", detail::number_json(q.c())}};
}

inline GeneralizedQuadratic quadratic_from_json(const json& j, const std::string& field, int dim) {
  using namespace detail;
  const Matrix A = read_matrix(require(j, "A", field), field + ".A", dim, dim);
  const Vector u = read_vector(require(j, "u", field), field + ".u", dim);
  const double c = j.contains("c") ? read_number(j["c"], field + ".c") : 0.0;
  try {
    return GeneralizedQuadratic(A, u, c);
  } catch (const std::invalid_argument& e) {
    throw ParseError(field, e.what());
  }
}

struct ReportOptions {
  std::vector<double> eps_ladder = default_eps_ladder();
};

struct RunReport {
  DualityReport dual;
  LagrangeValue ld;
  LagrangeValue lp;
  bool weak_duality_holds = true;
  json doc;
  std::string table;
};

inline RunReport run_report(const ProblemInstance& P, const ReportOptions& opt = {}) {
  RunReport R;
  R.dual = dcp_value(P);
  LagrangianContext ctx(P);
  R.ld = ld_value(ctx);
  R.lp = lp_value(ctx);
  R.weak_duality_holds = weakly_below(R.dual.dual_conjugate, R.dual.primal) && weakly_below(R.ld.value, R.lp.value);

  using detail::number_json;
  json& j = R.doc;
  j["instance"] = P.name;
  j["primal"] = number_json(R.dual.primal);
  j["dcp"] = number_json(R.dual.dual_conjugate);
  j["ld"] = number_json(R.ld.value);
  j["lp"] = number_json(R.lp.value);
  j["gap"] = number_json(R.dual.gap);
  j["flags"] = {{"grid_truncated", R.dual.flags.grid_truncated || R.ld.grid_truncated || R.lp.grid_truncated},
                {"unbounded_suspected", R.dual.flags.unbounded_suspected},
                {"weak_duality_holds", R.weak_duality_holds}};
  j["attaining_psi"] = R.dual.attaining_psi ? quadratic_json(*R.dual.attaining_psi) : json(nullptr);
  j["primal_argmin"] = R.dual.primal_argmin ? detail::vector_json(*R.dual.primal_argmin) : json(nullptr);
  j["warnings"] = P.warnings;

  // Certificate scan at (x^, -psi^ o L, psi^).
  json certs = json::array();
  if (R.dual.attaining_psi && R.dual.primal_argmin && P.f(*R.dual.primal_argmin) < kInf) {
    GapCertificate c;
    c.x = *R.dual.primal_argmin;
    c.psi = *R.dual.attaining_psi;
    c.phi = -1.0 * pullback(c.psi, P.L);
    for (double e : opt.eps_ladder) {
      c.eps = e;
      const Thm43Verdict v = verify_certificate_thm43(P, c);
      certs.push_back({{"eps", e},
                       {"ok", v.ok()},
                       {"phi_in_family", v.phi_in_family},
                       {"psi_in_family", v.psi_in_family},
                       {"a", v.a_phi_in_subdiff},
                       {"b", v.b_psi_in_subdiff},
                       {"c", v.c_lower_bound},
                       {"d", v.d_upper_bound}});
    }
  }
  j["certificates"] = certs;

  std::ostringstream t;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %18s\n", "quantity", "value");
  t << line << std::string(29, '-') << "\n";
  for (auto [k, v] : {std::pair{"primal", R.dual.primal}, std::pair{"dcp", R.dual.dual_conjugate},
                      std::pair{"ld", R.ld.value}, std::pair{"lp", R.lp.value}, std::pair{"gap", R.dual.gap}}) {
    std::snprintf(line, sizeof line, "%-10s %18s\n", k, format_number(v).c_str());
    t << line;
  }
  if (!R.weak_duality_holds) t << "WEAK DUALITY VIOLATED\n";
  for (const auto& w : P.warnings) t << "warning: " << w << "\n";
  R.table = t.str();
  return R;
}

// ---------------------------------------------------------------------------
// Reproductions of the catalog examples

struct ReproRow {
  std::string quantity;
  std::string expected;
  std::string computed;
  bool pass = false;
};

namespace detail {

inline ReproRow num_row(std::string q, double expected, double got, double tol) {
  bool ok;
  if (std::isinf(expected)) ok = got == expected;
  else ok = std::isfinite(got) && std::abs(got - expected) <= tol;
  return {std::move(q), format_number(expected), format_number(got), ok};
}

inline ReproRow bool_row(std::string q, bool expected, bool got) {
  return {std::move(q), expected ? "true" : "false", got ? "true" : "false", expected == got};
}

inline GeneralizedQuadratic q1(double a, double u, double c = 0.0) {
  return GeneralizedQuadratic::isotropic(a, Vector::Constant(1, u), c);
}

}  // namespace detail

inline std::vector<ReproRow> reproduce(const std::string& name) {
  using detail::bool_row;
  using detail::num_row;
  using detail::q1;
  const ProblemInstance P = catalog(name);  // throws UnknownCatalogName
  std::vector<ReproRow> rows;
  const DualityReport d = dcp_value(P);

  if (name == "ex4.7" || name == "ex4.7-reversed") {
    rows.push_back(num_row("primal", 0.8, d.primal, 1e-6));
    rows.push_back(num_row("dcp", 0.8, d.dual_conjugate, 1e-6));
    rows.push_back(num_row("|gap|", 0.0, std::abs(d.gap), 1e-6));
    if (name == "ex4.7") {
      GapCertificate c;
      c.kind = GapCertificate::Kind::Thm44;
      c.x = Vector::Constant(1, -0.2);
      c.phi = q1(0, 1.6);
      c.psi = q1(0, -1.6);
      std::vector<GapCertificate> fam;
      for (double e : default_eps_ladder()) {
        c.eps = e;
        fam.push_back(c);
      }
      rows.push_back(bool_row("optimality certificate at x=-0.2", true, verify_optimality_thm44(P, c.x, fam).ok()));
      for (auto& f : fam) f.x = Vector::Zero(1);
      rows.push_back(bool_row("optimality certificate at x=0", false, verify_optimality_thm44(P, Vector::Zero(1), fam).ok()));
    } else {
      rows.push_back(bool_row("phi - psi o L in Phi (phi=0, psi=-x^2)", false, cond_cp1(P, q1(0, 0), q1(-1, 0))));
    }
  } else if (name == "ex4.8") {
    const double gs_lt1 = g_conjugate(P, q1(-0.5, 1)).value;
    const double gs_eq1 = g_conjugate(P, q1(-1, 2)).value;
    const double gs_gt1 = g_conjugate(P, q1(-2, 3)).value;
    rows.push_back(num_row("g*(c=0.5, d=1)", kInf, gs_lt1, 0));
    rows.push_back(num_row("g*(c=1, d=2)", 1.0, gs_eq1, 1e-9));
    rows.push_back(num_row("g*(c=2, d=3)", 1.25, gs_gt1, 1e-9));
    GapCertificate c;
    c.kind = GapCertificate::Kind::Thm42;
    c.eps = 1e-3;
    c.x = (Vector(2) << -1.99, 3.0).finished();
    c.phi = GeneralizedQuadratic::zero(2);
    c.psi = q1(-1, 2);
    rows.push_back(bool_row("gap certificate psi=-x^2+2x, eps=1e-3", true, verify_certificate_thm42(P, c).ok()));
    rows.push_back(num_row("primal", -6.0, d.primal, 1e-6));
    rows.push_back(num_row("dcp", -6.0, d.dual_conjugate, 1e-3));
  } else if (name == "ex5.6") {
    const auto phi = GeneralizedQuadratic::isotropic(0.0, Vector::Ones(2), 0.0);
    rows.push_back(num_row("(f+g o L)*(a=0, b=(1,1))", 0.1, target_conjugate(P, EpiTarget::SumStar, phi), 1e-9));
    const EpiDecomposition dec = epi_decompose(P, {phi, 1.0});
    rows.push_back(bool_row("epigraph split at r=1", true, dec.parts.has_value()));
    rows.push_back(bool_row("split uses psi=0", true, dec.psi && dec.psi->is_zero(1e-12)));
    rows.push_back(bool_row("both parts verify", true,
                            dec.parts && epi_contains(EpiTarget::FStar, dec.parts->first, P) &&
                                epi_contains(EpiTarget::GStar, dec.parts->second, P)));
    rows.push_back(num_row("primal", 0.0, d.primal, 1e-9));
    rows.push_back(num_row("dcp", 0.0, d.dual_conjugate, 1e-6));
  } else if (name == "ex6.10") {
    LagrangianContext ctx(P);
    rows.push_back(num_row("primal", -19.0, d.primal, 1e-6));
    rows.push_back(num_row("ld", -19.0, ld_value(ctx).value, 1e-6));
    rows.push_back(num_row("lp", -19.0, lp_value(ctx).value, 1e-6));
    rows.push_back(num_row("inf f", -43.0 / 4.0, quadratic_inf(*P.f.quadratic()).value, 1e-12));
    bool any = false;
    for (double a = 2.25; a <= 6; a += 0.25)
      for (double b = -6; b <= 6; b += 0.5)
        for (double x0 = -4; x0 <= 4; x0 += 0.25) {
          const auto psi = q1(-a, b);
          const double alpha = inf_f_plus_psi(P, psi);
          if (std::isfinite(alpha) && prop69_check(ctx, psi, Vector::Constant(1, x0), alpha).holds()) any = true;
        }
    rows.push_back(bool_row("support witness with curvature > 2 exists", false, any));
  } else if (name == "ex6.11") {
    LagrangianContext ctx(P);
    rows.push_back(num_row("primal", -9.25, d.primal, 1e-6));
    rows.push_back(num_row("ld", -9.25, ld_value(ctx).value, 1e-6));
    rows.push_back(num_row("lp", -9.25, lp_value(ctx).value, 1e-6));
    // psi = 2x + b at b = 1, alpha = -21/2 + b; scan x0 for a point meeting every part.
    const auto psi = q1(0, 2, 1);
    const double alpha = -9.5;
    bool any = false;
    for (double x0 = -10; x0 <= 10 && !any; x0 += 0.01)
      any = prop69_check(ctx, psi, Vector::Constant(1, x0), alpha).holds();
    const Prop69Result r = prop69_check(ctx, psi, Vector::Constant(1, 1.5), alpha);
    rows.push_back(bool_row("psi=2x+1 supports g", true, r.a_support));
    rows.push_back(num_row("inf f + psi", -9.25, r.inf_f_psi, 1e-9));
    rows.push_back(bool_row("alpha=-9.5 below inf f + psi", true, r.b_alpha_below));
    rows.push_back(bool_row("f(x0) <= alpha <= psi(x0) at x0=1.5", true, r.c_sandwich));
    rows.push_back(bool_row("support test certifies zero gap for some x0", true, any));
  } else if (name == "zero") {
    LagrangianContext ctx(P);
    rows.push_back(num_row("primal", 0.0, d.primal, 0));
    rows.push_back(num_row("dcp", 0.0, d.dual_conjugate, 0));
    rows.push_back(num_row("ld", 0.0, ld_value(ctx).value, 0));
    rows.push_back(num_row("lp", 0.0, lp_value(ctx).value, 0));
  }
  return rows;
}

inline std::string repro_table(const std::vector<ReproRow>& rows) {
  std::ostringstream t;
  char line[256];
  std::snprintf(line, sizeof line, "%-46s %14s %14s  %s\n", "quantity", "expected", "computed", "status");
  t << line << std::string(84, '-') << "\n";
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-46s %14s %14s  %s\n", r.quantity.c_str(), r.expected.c_str(), r.computed.c_str(),
                  r.pass ? "PASS" : "FAIL");
    t << line;
  }
  return t.str();
}

}  // namespace abconv
