// abconv: command-line front end for conjugates, duality gaps, certificates,
// epigraph splits, Lagrange values and the catalog reproductions.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "abconv/abconv.hpp"

using namespace abconv;

namespace {

enum Exit { kOk = 0, kParse = 2, kWeakDuality = 3, kUnknownName = 4 };

// "<path>" or "@<catalog name>".
ProblemInstance load(const std::string& ref) {
  if (!ref.empty() && ref[0] == '@') return catalog(ref.substr(1));
  return load_instance(ref);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double parse_double(const std::string& s, const std::string& field) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ParseError(field, "bad number '" + s + "'");
  return v;
}

struct ElementarySpec {
  GeneralizedQuadratic q;
  std::optional<double> r;
};

// "a=<a>,u=<u1>:<u2>:...,c=<c>[,r=<r>]" -> a|x|^2 + u'x + c. A scalar u is broadcast.
ElementarySpec parse_elementary(const std::string& s, int dim, const std::string& field) {
  double a = 0.0, c = 0.0;
  Vector u = Vector::Zero(dim);
  std::optional<double> r;
  for (const auto& kv : split(s, ',')) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ParseError(field, "expected key=value, got '" + kv + "'");
    const std::string k = kv.substr(0, eq), v = kv.substr(eq + 1);
    if (k == "a") a = parse_double(v, field + ".a");
    else if (k == "c") c = parse_double(v, field + ".c");
    else if (k == "r") r = parse_double(v, field + ".r");
    else if (k == "u") {
      const auto parts = split(v, ':');
      if (parts.size() == 1) u.setConstant(parse_double(parts[0], field + ".u"));
      else if (static_cast<int>(parts.size()) == dim)
        for (int i = 0; i < dim; ++i) u(i) = parse_double(parts[static_cast<size_t>(i)], field + ".u");
      else throw ParseError(field + ".u", "expected " + std::to_string(dim) + " entries");
    } else {
      throw ParseError(field, "unknown key '" + k + "'");
    }
  }
  return {GeneralizedQuadratic::isotropic(a, u, c), r};
}

std::string describe(const GeneralizedQuadratic& q) {
  std::ostringstream os;
  os << "A=" << quadratic_json(q)["A"].dump() << " u=" << quadratic_json(q)["u"].dump() << " c=" << format_number(q.c());
  return os.str();
}

json read_json_file(const std::string& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path, e.what());
  }
}

GapCertificate::Kind parse_kind(const std::string& k) {
  if (k == "thm42") return GapCertificate::Kind::Thm42;
  if (k == "thm43") return GapCertificate::Kind::Thm43;
  if (k == "thm44") return GapCertificate::Kind::Thm44;
  throw ParseError("kind", "expected thm42|thm43|thm44");
}

GapCertificate parse_certificate(const json& j, const ProblemInstance& P, GapCertificate::Kind kind,
                                 const std::string& field) {
  using namespace detail;
  GapCertificate c;
  c.kind = kind;
  c.eps = read_number(require(j, "eps", field), field + ".eps");
  c.x = read_vector(require(j, "x", field), field + ".x", P.n());
  c.phi = j.contains("phi") ? quadratic_from_json(j["phi"], field + ".phi", P.n()) : GeneralizedQuadratic::zero(P.n());
  c.psi = quadratic_from_json(require(j, "psi", field), field + ".psi", P.m());
  return c;
}

const char* yes(bool b) { return b ? "yes" : "no"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"abconv: abstract-convexity conjugate and Lagrange duality toolkit"};
  app.require_subcommand(1);

  std::string inst;
  auto add_instance = [&](CLI::App* sub) {
    sub->add_option("instance", inst, "Instance JSON file, or @name for a catalog instance")->required();
  };

  auto* conj = app.add_subcommand("conjugate", "Evaluate a conjugate at one elementary function");
  add_instance(conj);
  std::string phi_s, engine_s = "auto", target_s = "f";
  conj->add_option("--phi", phi_s, "Elementary function a=<a>,u=<u1:u2:...>,c=<c>")->required();
  conj->add_option("--engine", engine_s, "auto|closed|grid")->check(CLI::IsMember({"auto", "closed", "grid"}));
  conj->add_option("--target", target_s, "f|g|gL|sum")->check(CLI::IsMember({"f", "g", "gL", "sum"}));

  auto* gap = app.add_subcommand("gap", "Primal, conjugate-dual, Lagrange values and the gap");
  add_instance(gap);
  std::string json_out;
  gap->add_option("--json", json_out, "Write the JSON report here");

  auto* certify = app.add_subcommand("certify", "Verify a gap certificate");
  add_instance(certify);
  std::string cert_path, kind_s = "thm43";
  certify->add_option("--cert", cert_path, "Certificate JSON file")->required();
  certify->add_option("--kind", kind_s, "thm42|thm43|thm44")->check(CLI::IsMember({"thm42", "thm43", "thm44"}));

  auto* strong = app.add_subcommand("strong", "Try to split a point of the composite conjugate epigraph");
  add_instance(strong);
  std::string epi_s;
  strong->add_option("--epi-point", epi_s, "a=<a>,u=<u>,c=<c>,r=<r>")->required();

  auto* lag = app.add_subcommand("lagrange", "Lagrange dual and primal values and related probes");
  add_instance(lag);
  bool lsc = false;
  std::string inter_s;
  lag->add_flag("--lsc-probe", lsc, "Probe lower semicontinuity of the value function at 0");
  lag->add_option("--intersection", inter_s, "phi1;phi2;alpha (or |-separated) with phi as a=..,u=..,c=..");

  auto* repro = app.add_subcommand("reproduce", "Print the expected-vs-computed table for a catalog instance");
  std::string repro_name;
  repro->add_option("name", repro_name, "Catalog name")->required();

  auto* rnd = app.add_subcommand("random", "Write a seeded random instance");
  std::uint64_t seed = 0;
  std::string spec_path, out_path;
  rnd->add_option("--seed", seed, "Seed (overrides the spec)");
  rnd->add_option("--spec", spec_path, "RandomSpec JSON file");
  rnd->add_option("-o,--output", out_path, "Output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  try {
    if (*conj) {
      const ProblemInstance P = load(inst);
      const bool on_y = target_s == "g";
      const ElementarySpec phi = parse_elementary(phi_s, on_y ? P.m() : P.n(), "--phi");
      Objective h = target_s == "f" ? P.f : target_s == "g" ? P.g : target_s == "gL" ? compose(P.g, P.L)
                                                                                      : compose_sum(P.f, P.g, P.L);
      const Engine eng = engine_s == "closed" ? Engine::ClosedForm : engine_s == "grid" ? Engine::Grid : Engine::Auto;
      const ConjugateValue v = conjugate_with(h, phi.q, eng, on_y ? P.y_window : P.x_search);
      std::cout << "conjugate " << format_number(v.value) << "\n";
      std::cout << "engine " << (v.engine == ConjugateValue::Engine::ClosedForm ? "closed" : "grid") << "\n";
      if (v.maximizer) std::cout << "maximizer " << detail::vector_json(*v.maximizer).dump() << "\n";
      if (v.on_boundary) std::cout << "note: maximizer on the search-box boundary\n";
      return kOk;
    }
    if (*gap) {
      const ProblemInstance P = load(inst);
      const RunReport R = run_report(P);
      std::cout << R.table;
      if (!json_out.empty()) {
        std::ofstream out(json_out);
        if (!out) throw std::runtime_error("cannot write " + json_out);
        out << R.doc.dump(2) << "\n";
      }
      return R.weak_duality_holds ? kOk : kWeakDuality;
    }
    if (*certify) {
      const ProblemInstance P = load(inst);
      const json j = read_json_file(cert_path);
      const auto kind = parse_kind(kind_s);
      if (kind == GapCertificate::Kind::Thm42) {
        const auto v = verify_certificate_thm42(P, parse_certificate(j, P, kind, "cert"));
        std::cout << "psi in eps-subdifferential: " << yes(v.psi_in_subdiff) << "\n"
                  << "conjugate inequality: " << format_number(v.lhs) << " <= " << format_number(v.rhs) << " : "
                  << yes(v.inequality) << "\n"
                  << "certificate " << (v.ok() ? "accepted" : "rejected") << "\n";
      } else if (kind == GapCertificate::Kind::Thm43) {
        const auto v = verify_certificate_thm43(P, parse_certificate(j, P, kind, "cert"));
        std::cout << "phi in Phi: " << yes(v.phi_in_family) << "\npsi in Psi: " << yes(v.psi_in_family)
                  << "\n(a) phi in eps-subdifferential of f: " << yes(v.a_phi_in_subdiff)
                  << "\n(b) psi in eps-subdifferential of g: " << yes(v.b_psi_in_subdiff)
                  << "\n(c) phi + psi o L >= -eps: " << yes(v.c_lower_bound) << " (min " << format_number(v.min_sum) << ")"
                  << "\n(d) phi(x) + psi(Lx) <= eps: " << yes(v.d_upper_bound) << "\ncertificate "
                  << (v.ok() ? "accepted" : "rejected") << "\n";
      } else {
        const Vector x = detail::read_vector(detail::require(j, "x", "cert"), "cert.x", P.n());
        const json& fam = detail::require(j, "family", "cert");
        if (!fam.is_array()) throw ParseError("cert.family", "expected an array");
        std::vector<GapCertificate> certs;
        for (size_t i = 0; i < fam.size(); ++i) {
          json e = fam[i];
          e["x"] = j["x"];
          certs.push_back(parse_certificate(e, P, kind, "cert.family[" + std::to_string(i) + "]"));
        }
        const auto v = verify_optimality_thm44(P, x, certs);
        for (size_t i = 0; i < certs.size(); ++i)
          std::cout << "eps " << format_number(certs[i].eps) << ": " << (v.per_eps[i].ok() ? "ok" : "fails") << "\n";
        std::cout << "value at x " << format_number(v.value_at_x) << ", primal " << format_number(v.primal) << "\n"
                  << "optimality " << (v.ok() ? "certified" : "not certified") << "\n";
      }
      return kOk;
    }
    if (*strong) {
      const ProblemInstance P = load(inst);
      const ElementarySpec e = parse_elementary(epi_s, P.n(), "--epi-point");
      if (!e.r) throw ParseError("--epi-point", "missing r");
      const EpiPoint p{e.q, *e.r};
      const double level = target_conjugate(P, EpiTarget::SumStar, p.phi);
      std::cout << "(f + g o L)*(phi) = " << format_number(level) << "\n";
      if (!epi_contains(EpiTarget::SumStar, p, P)) {
        std::cout << "point is not in the epigraph\n";
        return kOk;
      }
      const EpiDecomposition d = epi_decompose(P, p);
      if (!d) {
        std::cout << "no split found (inconclusive)\n";
        return kOk;
      }
      std::cout << "psi: " << describe(*d.psi) << "\n"
                << "part in epi f*: " << describe(d.parts->first.phi) << " r=" << format_number(d.parts->first.r) << "\n"
                << "part in epi g*: " << describe(d.parts->second.phi) << " r=" << format_number(d.parts->second.r) << "\n";
      return kOk;
    }
    if (*lag) {
      const ProblemInstance P = load(inst);
      LagrangianContext ctx(P);
      const LagrangeValue ld = ld_value(ctx), lp = lp_value(ctx);
      std::cout << "ld " << format_number(ld.value) << "\nlp " << format_number(lp.value) << "\n";
      if (ld.attaining_psi) std::cout << "attaining psi: " << describe(*ld.attaining_psi) << "\n";
      const CondCpLp cc = check_cond_cp_lp(ctx);
      std::cout << "inf f + g**(L.) == inf f + g(L.): " << yes(cc.holds) << "\n";
      if (lsc) {
        const LscReport r = lsc_probe_at_zero(ctx);
        std::cout << "V(0) " << format_number(r.v0) << "\nviolations per radius:";
        for (int v : r.violations) std::cout << " " << v;
        std::cout << "\nlower semicontinuous at 0 (sampled): " << yes(r.lsc) << "\n";
      }
      if (!inter_s.empty()) {
        std::string spec = inter_s;
        std::replace(spec.begin(), spec.end(), '|', ';');
        const auto parts = split(spec, ';');
        if (parts.size() != 3) throw ParseError("--intersection", "expected phi1;phi2;alpha");
        const auto p1 = parse_elementary(parts[0], P.n(), "--intersection.phi1").q;
        const auto p2 = parse_elementary(parts[1], P.n(), "--intersection.phi2").q;
        const double alpha = parse_double(parts[2], "--intersection.alpha");
        const IntersectionSearch s = intersection_search(p1, p2, alpha);
        std::cout << "max_t inf_x t phi1 + (1-t) phi2 = " << format_number(s.best_m) << " at t=" << format_number(s.best_t)
                  << "\nintersection property: " << yes(s.witness.has_value()) << "\n";
      }
      return weakly_below(ld.value, lp.value) ? kOk : kWeakDuality;
    }
    if (*repro) {
      const auto rows = reproduce(repro_name);
      std::cout << repro_name << "\n" << repro_table(rows);
      return kOk;
    }
    if (*rnd) {
      RandomSpec spec;
      if (!spec_path.empty()) spec = random_spec_from_json(read_json_file(spec_path));
      if (rnd->count("--seed")) spec.seed = seed;
      const InstanceFile F = random_instance_file(spec);
      if (out_path.empty()) std::cout << instance_to_json(F).dump(2) << "\n";
      else save_instance(out_path, F);
      return kOk;
    }
  } catch (const UnknownCatalogName& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnknownName;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
