#pragma once

// Instance files (JSON, schema "1"), the catalog of worked examples, and
// seeded random instances.

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "abconv/lagrange.hpp"

namespace abconv {

using json = nlohmann::json;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& field, const std::string& what)
      : std::runtime_error("parse error at '" + field + "': " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class UnknownCatalogName : public std::invalid_argument {
 public:
  explicit UnknownCatalogName(const std::string& name)
      : std::invalid_argument("unknown catalog instance '" + name + "'") {}
};

struct Monomial {
  double coef = 0.0;
  std::vector<int> powers;  // one exponent per coordinate
};

/// Objective descriptor. "blackbox-poly" evaluates x'Ax + u'x + c plus the
/// monomial terms through the black-box path (grid engines only).
struct ObjectiveSpec {
  enum class Kind { Quadratic, BlackboxPoly };
  Kind kind = Kind::Quadratic;
  Matrix A;
  Vector u;
  double c = 0.0;
  std::optional<Box> domain;
  std::vector<Monomial> terms;
};

struct FamilySpec {
  CurvatureSpec curvature = CurvatureSpec::zero();
  bool constants = true;
};

struct SearchSpec {
  double psi_slope_lower = -10.0;
  double psi_slope_upper = 10.0;
  int psi_curv_points = 21;
  int psi_slope_points = 21;
  int psi_refine_rounds = 4;
  double curvature_clip = 10.0;
  std::optional<Box> x_box;  // default [-10, 10]^n
  std::optional<Box> y_box;  // default [-10, 10]^m
  int points_per_axis = 201;
  int refine_rounds = 2;
};

struct InstanceFile {
  std::string name;
  int n = 1;
  int m = 1;
  Matrix L;
  ObjectiveSpec f;
  ObjectiveSpec g;
  FamilySpec phi;
  FamilySpec psi;
  SearchSpec search;
};

// ---------------------------------------------------------------------------
// Building instances

inline Objective make_objective(const ObjectiveSpec& s) {
  GeneralizedQuadratic q(s.A, s.u, s.c);
  if (s.kind == ObjectiveSpec::Kind::Quadratic) return Objective(q, s.domain);
  const int dim = q.dim();
  for (const auto& t : s.terms)
    if (static_cast<int>(t.powers.size()) != dim)
      throw DimensionError("blackbox-poly term: powers must have one entry per coordinate");
  auto terms = s.terms;
  return Objective(
      dim,
      [q, terms](const Vector& x) {
        double v = q(x);
        for (const auto& t : terms) {
          double p = t.coef;
          for (size_t i = 0; i < t.powers.size(); ++i) p *= std::pow(x(static_cast<Eigen::Index>(i)), t.powers[i]);
          v += p;
        }
        return v;
      },
      s.domain);
}

inline Family make_family(const FamilySpec& s, int dim) { return Family{dim, s.curvature, s.constants}; }

inline ProblemInstance build_instance(const InstanceFile& F) {
  require_dim(F.L.rows(), F.m, "instance L rows");
  require_dim(F.L.cols(), F.n, "instance L cols");
  require_dim(F.f.A.rows(), F.n, "instance f");
  require_dim(F.g.A.rows(), F.m, "instance g");
  ParameterSearch ps;
  ps.curvature_clip = F.search.curvature_clip;
  ps.curvature_points = F.search.psi_curv_points;
  ps.slope_lower = F.search.psi_slope_lower;
  ps.slope_upper = F.search.psi_slope_upper;
  ps.slope_points = F.search.psi_slope_points;
  ps.refine_rounds = F.search.psi_refine_rounds;
  const Box xb = F.search.x_box ? *F.search.x_box : Box::cube(F.n, -10, 10);
  const Box yb = F.search.y_box ? *F.search.y_box : Box::cube(F.m, -10, 10);
  return ProblemInstance(make_objective(F.f), make_objective(F.g), LinearMap(F.L), make_family(F.phi, F.n),
                         make_family(F.psi, F.m), ps, GridSpec(xb, F.search.points_per_axis, F.search.refine_rounds),
                         GridSpec(yb, F.search.points_per_axis, F.search.refine_rounds), F.name);
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline json number_json(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return 0.0;  // drop the sign of zero
  return v;
}

inline double read_number(const json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw ParseError(field, "expected a number");
}

inline int read_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) throw ParseError(field, "expected an integer");
  return j.get<int>();
}

inline const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(path + "." + key, "missing field");
  return *it;
}

inline Vector read_vector(const json& j, const std::string& field, int expected = -1) {
  if (!j.is_array()) throw ParseError(field, "expected an array");
  if (expected >= 0 && static_cast<int>(j.size()) != expected)
    throw ParseError(field, "expected " + std::to_string(expected) + " entries, got " + std::to_string(j.size()));
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = read_number(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

inline Matrix read_matrix(const json& j, const std::string& field, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw ParseError(field, "expected " + std::to_string(rows) + " rows");
  Matrix M(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const std::string rf = field + "[" + std::to_string(i) + "]";
    M.row(i) = read_vector(j[static_cast<size_t>(i)], rf, cols).transpose();
  }
  return M;
}

inline json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number_json(v(i)));
  return a;
}

inline json matrix_json(const Matrix& M) {
  json a = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) a.push_back(vector_json(M.row(i).transpose()));
  return a;
}

inline json box_json(const Box& b) { return {{"lower", vector_json(b.lower)}, {"upper", vector_json(b.upper)}}; }

inline Box read_box(const json& j, const std::string& field, int dim) {
  // Either {"lower": [...], "upper": [...]} or a [lo, hi] pair applied per axis.
  if (j.is_array()) {
    if (j.size() != 2) throw ParseError(field, "expected [lower, upper]");
    const double lo = read_number(j[0], field + "[0]"), hi = read_number(j[1], field + "[1]");
    if (!(lo <= hi)) throw ParseError(field, "lower exceeds upper");
    return Box::cube(dim, lo, hi);
  }
  Vector lo = read_vector(require(j, "lower", field), field + ".lower", dim);
  Vector hi = read_vector(require(j, "upper", field), field + ".upper", dim);
  try {
    return Box(lo, hi);
  } catch (const std::exception& e) {
    throw ParseError(field, e.what());
  }
}

inline std::string curvature_string(const CurvatureSpec& c) {
  using K = CurvatureSpec::Kind;
  switch (c.kind) {
    case K::Zero: return "zero";
    case K::NonNegative: return "nonneg";
    case K::NonPositive: return "nonpos";
    case K::Any: return "any";
    case K::Fixed: {
      std::ostringstream os;
      os.precision(17);
      os << "fixed:" << c.a;
      return os.str();
    }
  }
  return "zero";
}

inline CurvatureSpec parse_curvature(const std::string& s, const std::string& field) {
  if (s == "zero") return CurvatureSpec::zero();
  if (s == "nonneg") return CurvatureSpec::nonnegative();
  if (s == "nonpos") return CurvatureSpec::nonpositive();
  if (s == "any") return CurvatureSpec::any();
  if (s.rfind("fixed:", 0) == 0) {
    const std::string num = s.substr(6);
    char* end = nullptr;
    const double a = std::strtod(num.c_str(), &end);
    if (num.empty() || end != num.c_str() + num.size() || !std::isfinite(a))
      throw ParseError(field, "bad fixed curvature '" + s + "'");
    return CurvatureSpec::fixed(a);
  }
  throw ParseError(field, "unknown curvature '" + s + "' (zero|nonneg|nonpos|fixed:<a>|any)");
}

inline json objective_json(const ObjectiveSpec& s) {
  json j;
  j["kind"] = s.kind == ObjectiveSpec::Kind::Quadratic ? "quadratic" : "blackbox-poly";
  j["A"] = matrix_json(s.A);
  j["u"] = vector_json(s.u);
  j["c"] = number_json(s.c);
  if (s.domain) j["domain_box"] = box_json(*s.domain);
  if (!s.terms.empty()) {
    json t = json::array();
    for (const auto& m : s.terms) t.push_back({{"coef", number_json(m.coef)}, {"powers", m.powers}});
    j["terms"] = t;
  }
  return j;
}

inline ObjectiveSpec parse_objective(const json& j, const std::string& field, int dim) {
  ObjectiveSpec s;
  const json& kind = require(j, "kind", field);
  if (!kind.is_string()) throw ParseError(field + ".kind", "expected a string");
  const auto k = kind.get<std::string>();
  if (k == "quadratic") s.kind = ObjectiveSpec::Kind::Quadratic;
  else if (k == "blackbox-poly") s.kind = ObjectiveSpec::Kind::BlackboxPoly;
  else throw ParseError(field + ".kind", "expected quadratic or blackbox-poly");
  s.A = read_matrix(require(j, "A", field), field + ".A", dim, dim);
  const double scale = std::max(1.0, s.A.cwiseAbs().maxCoeff());
  if ((s.A - s.A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw ParseError(field + ".A", "matrix is not symmetric");
  s.u = read_vector(require(j, "u", field), field + ".u", dim);
  s.c = read_number(require(j, "c", field), field + ".c");
  if (auto it = j.find("domain_box"); it != j.end()) s.domain = read_box(*it, field + ".domain_box", dim);
  if (auto it = j.find("terms"); it != j.end()) {
    if (s.kind != ObjectiveSpec::Kind::BlackboxPoly) throw ParseError(field + ".terms", "only blackbox-poly takes terms");
    if (!it->is_array()) throw ParseError(field + ".terms", "expected an array");
    for (size_t i = 0; i < it->size(); ++i) {
      const std::string tf = field + ".terms[" + std::to_string(i) + "]";
      const json& t = (*it)[i];
      Monomial mono;
      mono.coef = read_number(require(t, "coef", tf), tf + ".coef");
      const json& p = require(t, "powers", tf);
      if (!p.is_array() || static_cast<int>(p.size()) != dim) throw ParseError(tf + ".powers", "one exponent per coordinate");
      for (size_t q = 0; q < p.size(); ++q) {
        const int e = read_int(p[q], tf + ".powers");
        if (e < 0) throw ParseError(tf + ".powers", "exponents must be nonnegative");
        mono.powers.push_back(e);
      }
      s.terms.push_back(mono);
    }
  }
  return s;
}

inline FamilySpec parse_family(const json& j, const std::string& field) {
  FamilySpec s;
  const json& c = require(j, "curvature", field);
  if (!c.is_string()) throw ParseError(field + ".curvature", "expected a string");
  s.curvature = parse_curvature(c.get<std::string>(), field + ".curvature");
  if (auto it = j.find("constants"); it != j.end()) {
    if (!it->is_boolean()) throw ParseError(field + ".constants", "expected a boolean");
    s.constants = it->get<bool>();
  }
  return s;
}

}  // namespace detail

inline json instance_to_json(const InstanceFile& F) {
  using namespace detail;
  json j;
  j["schema_version"] = "1";
  j["name"] = F.name;
  j["n"] = F.n;
  j["m"] = F.m;
  j["L"] = matrix_json(F.L);
  j["f"] = objective_json(F.f);
  j["g"] = objective_json(F.g);
  j["phi"] = {{"curvature", curvature_string(F.phi.curvature)}, {"constants", F.phi.constants}};
  j["psi"] = {{"curvature", curvature_string(F.psi.curvature)}, {"constants", F.psi.constants}};
  json s;
  s["psi_slope_box"] = {number_json(F.search.psi_slope_lower), number_json(F.search.psi_slope_upper)};
  s["psi_curv_grid"] = F.search.psi_curv_points;
  s["psi_slope_points"] = F.search.psi_slope_points;
  s["psi_refine_rounds"] = F.search.psi_refine_rounds;
  s["curvature_clip"] = number_json(F.search.curvature_clip);
  s["x_box"] = box_json(F.search.x_box ? *F.search.x_box : Box::cube(F.n, -10, 10));
  s["y_box"] = box_json(F.search.y_box ? *F.search.y_box : Box::cube(F.m, -10, 10));
  s["points_per_axis"] = F.search.points_per_axis;
  s["refine_rounds"] = F.search.refine_rounds;
  j["search"] = s;
  return j;
}

inline InstanceFile instance_from_json(const json& j) {
  using namespace detail;
  InstanceFile F;
  const json& ver = require(j, "schema_version", "$");
  if (!ver.is_string() || ver.get<std::string>() != "1") throw ParseError("schema_version", "expected \"1\"");
  if (auto it = j.find("name"); it != j.end() && it->is_string()) F.name = it->get<std::string>();
  F.n = read_int(require(j, "n", "$"), "n");
  F.m = read_int(require(j, "m", "$"), "m");
  if (F.n < 1) throw ParseError("n", "must be positive");
  if (F.m < 1) throw ParseError("m", "must be positive");
  F.L = read_matrix(require(j, "L", "$"), "L", F.m, F.n);
  F.f = parse_objective(require(j, "f", "$"), "f", F.n);
  F.g = parse_objective(require(j, "g", "$"), "g", F.m);
  F.phi = parse_family(require(j, "phi", "$"), "phi");
  F.psi = parse_family(require(j, "psi", "$"), "psi");
  if (auto it = j.find("search"); it != j.end()) {
    const json& s = *it;
    if (!s.is_object()) throw ParseError("search", "expected an object");
    if (auto b = s.find("psi_slope_box"); b != s.end()) {
      if (!b->is_array() || b->size() != 2) throw ParseError("search.psi_slope_box", "expected [lower, upper]");
      F.search.psi_slope_lower = read_number((*b)[0], "search.psi_slope_box[0]");
      F.search.psi_slope_upper = read_number((*b)[1], "search.psi_slope_box[1]");
    }
    auto opt_int = [&](const char* key, int& dst) {
      if (auto v = s.find(key); v != s.end()) dst = read_int(*v, std::string("search.") + key);
    };
    opt_int("psi_curv_grid", F.search.psi_curv_points);
    opt_int("psi_slope_points", F.search.psi_slope_points);
    opt_int("psi_refine_rounds", F.search.psi_refine_rounds);
    opt_int("points_per_axis", F.search.points_per_axis);
    opt_int("refine_rounds", F.search.refine_rounds);
    if (auto v = s.find("curvature_clip"); v != s.end())
      F.search.curvature_clip = read_number(*v, "search.curvature_clip");
    if (auto v = s.find("x_box"); v != s.end()) F.search.x_box = read_box(*v, "search.x_box", F.n);
    if (auto v = s.find("y_box"); v != s.end()) F.search.y_box = read_box(*v, "search.y_box", F.m);
  }
  return F;
}

inline InstanceFile parse_instance_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("$", e.what());
  }
  return instance_from_json(j);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline InstanceFile load_instance_file(const std::string& path) { return parse_instance_text(read_text_file(path)); }

/// Parse, validate and build. Domain warnings land in ProblemInstance::warnings.
inline ProblemInstance load_instance(const std::string& path) {
  const InstanceFile F = load_instance_file(path);
  try {
    return build_instance(F);
  } catch (const ParseError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, e.what());
  }
}

inline void save_instance(const std::string& path, const InstanceFile& F) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << instance_to_json(F).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Catalog

namespace detail {

inline Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (auto r : rows) {
    Eigen::Index k = 0;
    for (double v : r) M(i, k++) = v;
    ++i;
  }
  return M;
}

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline ObjectiveSpec quad(Matrix A, Vector u, double c) {
  ObjectiveSpec s;
  s.A = std::move(A);
  s.u = std::move(u);
  s.c = c;
  return s;
}

}  // namespace detail

inline std::vector<std::string> catalog_names() {
  return {"ex4.7", "ex4.7-reversed", "ex4.8", "ex5.6", "ex6.10", "ex6.11", "zero"};
}

inline InstanceFile catalog_file(const std::string& name) {
  using detail::mat;
  using detail::quad;
  using detail::vec;
  InstanceFile F;
  F.name = name;
  const FamilySpec affine_nc{CurvatureSpec::zero(), false};
  const FamilySpec concave_nc{CurvatureSpec::nonpositive(), false};
  if (name == "ex4.7" || name == "ex4.7-reversed") {
    // f(x) = (x+1)^2, g(x) = 4x^2, L = Id
    F.n = F.m = 1;
    F.L = mat({{1}});
    F.f = quad(mat({{1}}), vec({2}), 1);
    F.g = quad(mat({{4}}), vec({0}), 0);
    F.phi = name == "ex4.7" ? concave_nc : affine_nc;
    F.psi = name == "ex4.7" ? affine_nc : concave_nc;
  } else if (name == "ex4.8") {
    // f(x,y) = 3x^2 + 2y^2, g(t) = -(t-1)^2, L(x,y) = x - y
    F.n = 2;
    F.m = 1;
    F.L = mat({{1, -1}});
    F.f = quad(mat({{3, 0}, {0, 2}}), vec({0, 0}), 0);
    F.g = quad(mat({{-1}}), vec({2}), -1);
    F.phi = concave_nc;
    F.psi = concave_nc;
  } else if (name == "ex5.6") {
    // f(x,y) = x^2 + y^2, g(t) = 2t^2, L(x,y) = x + y
    F.n = 2;
    F.m = 1;
    F.L = mat({{1, 1}});
    F.f = quad(mat({{1, 0}, {0, 1}}), vec({0, 0}), 0);
    F.g = quad(mat({{2}}), vec({0}), 0);
    F.phi = concave_nc;
    F.psi = affine_nc;
  } else if (name == "ex6.10") {
    // f(x) = 3x^2 - 3x - 10, g(x) = -2x^2 + x - 8
    F.n = F.m = 1;
    F.L = mat({{1}});
    F.f = quad(mat({{3}}), vec({-3}), -10);
    F.g = quad(mat({{-2}}), vec({1}), -8);
    F.phi = F.psi = FamilySpec{CurvatureSpec::nonpositive(), true};
  } else if (name == "ex6.11") {
    // f(x) = x^2 - 3x - 10, g(x) = 2x + 1
    F.n = F.m = 1;
    F.L = mat({{1}});
    F.f = quad(mat({{1}}), vec({-3}), -10);
    F.g = quad(mat({{0}}), vec({2}), 1);
    F.phi = F.psi = FamilySpec{CurvatureSpec::zero(), true};
  } else if (name == "zero") {
    F.n = F.m = 1;
    F.L = mat({{1}});
    F.f = quad(mat({{0}}), vec({0}), 0);
    F.g = quad(mat({{0}}), vec({0}), 0);
    F.phi = F.psi = FamilySpec{CurvatureSpec::zero(), true};
  } else {
    throw UnknownCatalogName(name);
  }
  return F;
}

inline ProblemInstance catalog(const std::string& name) { return build_instance(catalog_file(name)); }

// ---------------------------------------------------------------------------
// Random instances

struct RandomSpec {
  int n = 2;
  int m = 2;
  double f_modulus_lo = 0.0;  // weak-convexity modulus range of f
  double f_modulus_hi = 1.0;
  double g_modulus_lo = 0.0;
  double g_modulus_hi = 1.0;
  double L_scale = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 1 || m < 1) throw std::invalid_argument("RandomSpec: dimensions must be positive");
    if (!(0.0 <= f_modulus_lo && f_modulus_lo <= f_modulus_hi)) throw std::invalid_argument("RandomSpec: bad f modulus range");
    if (!(0.0 <= g_modulus_lo && g_modulus_lo <= g_modulus_hi)) throw std::invalid_argument("RandomSpec: bad g modulus range");
    if (!(L_scale > 0.0)) throw std::invalid_argument("RandomSpec: L_scale must be positive");
  }
};

inline RandomSpec random_spec_from_json(const json& j) {
  using namespace detail;
  RandomSpec s;
  if (!j.is_object()) throw ParseError("$", "expected an object");
  auto opt_num = [&](const char* key, double& dst) {
    if (auto v = j.find(key); v != j.end()) dst = read_number(*v, key);
  };
  if (auto v = j.find("n"); v != j.end()) s.n = read_int(*v, "n");
  if (auto v = j.find("m"); v != j.end()) s.m = read_int(*v, "m");
  opt_num("L_scale", s.L_scale);
  auto range = [&](const char* key, double& lo, double& hi) {
    if (auto v = j.find(key); v != j.end()) {
      if (!v->is_array() || v->size() != 2) throw ParseError(key, "expected [lo, hi]");
      lo = read_number((*v)[0], key);
      hi = read_number((*v)[1], key);
    }
  };
  range("f_modulus", s.f_modulus_lo, s.f_modulus_hi);
  range("g_modulus", s.g_modulus_lo, s.g_modulus_hi);
  if (auto v = j.find("seed"); v != j.end()) {
    if (!v->is_number_unsigned() && !v->is_number_integer()) throw ParseError("seed", "expected an integer");
    s.seed = v->get<std::uint64_t>();
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError("$", e.what());
  }
  return s;
}

namespace detail {

// Symmetric matrix whose smallest eigenvalue is exactly -rho (so the weak
// convexity modulus is rho); the rest lie in [-rho, 3].
inline Matrix random_weakly_convex(std::mt19937_64& rng, int n, double rho) {
  std::uniform_real_distribution<double> U(-1.0, 1.0), E(0.0, 1.0);
  Matrix G(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) G(i, k) = U(rng);
  const Eigen::HouseholderQR<Matrix> qr(G);
  const Matrix Q = qr.householderQ();
  Vector lam(n);
  lam(0) = -rho;
  for (int i = 1; i < n; ++i) lam(i) = -rho + E(rng) * (3.0 + rho);
  Matrix A = Q * lam.asDiagonal() * Q.transpose();
  return (0.5 * (A + A.transpose())).eval();
}

}  // namespace detail

inline InstanceFile random_instance_file(const RandomSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0), E(0.0, 1.0);
  InstanceFile F;
  F.name = "random-" + std::to_string(spec.seed);
  F.n = spec.n;
  F.m = spec.m;
  F.L = Matrix(spec.m, spec.n);
  for (int i = 0; i < spec.m; ++i)
    for (int k = 0; k < spec.n; ++k) F.L(i, k) = spec.L_scale * U(rng);
  const double rf = spec.f_modulus_lo + E(rng) * (spec.f_modulus_hi - spec.f_modulus_lo);
  const double rg = spec.g_modulus_lo + E(rng) * (spec.g_modulus_hi - spec.g_modulus_lo);
  F.f = detail::quad(detail::random_weakly_convex(rng, spec.n, rf), Vector::NullaryExpr(spec.n, [&] { return 2 * U(rng); }),
                     U(rng));
  F.g = detail::quad(detail::random_weakly_convex(rng, spec.m, rg), Vector::NullaryExpr(spec.m, [&] { return 2 * U(rng); }),
                     U(rng));
  const CurvatureSpec kinds[] = {CurvatureSpec::zero(), CurvatureSpec::nonpositive(), CurvatureSpec::any(),
                                 CurvatureSpec::nonnegative()};
  F.phi = FamilySpec{kinds[rng() % 4], true};
  F.psi = FamilySpec{kinds[rng() % 4], true};
  // Small sweeps: random instances feed fuzz suites.
  F.search.psi_curv_points = 5;
  F.search.psi_slope_points = 5;
  F.search.psi_refine_rounds = 1;
  F.search.psi_slope_lower = -5;
  F.search.psi_slope_upper = 5;
  F.search.points_per_axis = 21;
  F.search.refine_rounds = 1;
  return F;
}

inline ProblemInstance random_instance(const RandomSpec& spec) { return build_instance(random_instance_file(spec)); }

}  // namespace abconv
