#include <cstdio>
#include <filesystem>

#include <gtest/gtest.h>

#include "abconv/report.hpp"

using namespace abconv;

namespace {

const std::string kData = ABCONV_DATA_DIR;
const std::string kFixtures = ABCONV_FIXTURE_DIR;

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("abconv_" + name)).string();
}

std::string dump_report(const ProblemInstance& P) { return run_report(P).doc.dump(); }

}  // namespace

TEST(Catalog, KnownNamesBuild) {
  for (const auto& n : catalog_names()) {
    const auto P = catalog(n);
    EXPECT_EQ(P.name, n);
    EXPECT_TRUE(P.warnings.empty()) << n;
  }
}

TEST(Catalog, UnknownNameThrows) { EXPECT_THROW(catalog("ex9.9"), UnknownCatalogName); }

TEST(Catalog, Ex47FamilyChoices) {
  const auto P = catalog("ex4.7");
  EXPECT_EQ(P.Phi.curvature.kind, CurvatureSpec::Kind::NonPositive);
  EXPECT_EQ(P.Psi.curvature.kind, CurvatureSpec::Kind::Zero);
  const auto R = catalog("ex4.7-reversed");
  EXPECT_EQ(R.Phi.curvature.kind, CurvatureSpec::Kind::Zero);
  EXPECT_EQ(R.Psi.curvature.kind, CurvatureSpec::Kind::NonPositive);
  const auto S = catalog("ex5.6");
  EXPECT_EQ(S.n(), 2);
  EXPECT_EQ(S.m(), 1);
  EXPECT_EQ(S.L.matrix(), Matrix::Ones(1, 2));
}

TEST(InstanceFile, BundledFileMatchesCatalog) {
  const auto P = load_instance(kData + "/example-4.7.json");
  const auto* f = P.f.quadratic();
  const auto* g = P.g.quadratic();
  ASSERT_TRUE(f && g);
  for (double x : {-2.0, 0.0, 1.5}) {
    Vector v = Vector::Constant(1, x);
    EXPECT_DOUBLE_EQ((*f)(v), (x + 1) * (x + 1));
    EXPECT_DOUBLE_EQ((*g)(v), 4 * x * x);
  }
  EXPECT_EQ(P.L.matrix(), Matrix::Identity(1, 1));
}

TEST(InstanceFile, ZeroInstanceLoadsToZeros) {
  const auto R = run_report(load_instance(kData + "/zero.json"));
  EXPECT_EQ(R.dual.primal, 0.0);
  EXPECT_EQ(R.dual.dual_conjugate, 0.0);
  EXPECT_EQ(R.ld.value, 0.0);
  EXPECT_EQ(R.lp.value, 0.0);
}

TEST(InstanceFile, AllBundledFilesLoad) {
  int count = 0;
  for (const auto& e : std::filesystem::directory_iterator(kData)) {
    const auto name = e.path().filename().string();
    if (name.rfind("example-", 0) == 0 || name == "zero.json" || name == "quartic-blackbox.json") {
      EXPECT_NO_THROW(load_instance(e.path().string())) << name;
      ++count;
    }
  }
  EXPECT_GE(count, 8);
}

TEST(InstanceFile, MalformedRowNamesField) {
  try {
    load_instance(kFixtures + "/malformed_row.json");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "f.A[1]");
  }
}

TEST(InstanceFile, ParseErrorsNameFields) {
  auto expect_field = [](const std::string& text, const std::string& field) {
    try {
      parse_instance_text(text);
      ADD_FAILURE() << "no error for " << field;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.field(), field) << e.what();
    }
  };
  json j = instance_to_json(catalog_file("ex4.7"));
  expect_field("{not json", "$");
  auto k = j;
  k["schema_version"] = "2";
  expect_field(k.dump(), "schema_version");
  k = j;
  k.erase("L");
  expect_field(k.dump(), "$.L");
  k = j;
  k["phi"]["curvature"] = "wiggly";
  expect_field(k.dump(), "phi.curvature");
  k = j;
  k["g"]["A"] = {{"x"}};
  expect_field(k.dump(), "g.A[0][0]");
  k = instance_to_json(catalog_file("ex4.8"));
  k["f"]["A"] = {{1.0, 2.0}, {0.0, 1.0}};
  expect_field(k.dump(), "f.A");
  k = j;
  k["f"]["kind"] = "cubic";
  expect_field(k.dump(), "f.kind");
  k = j;
  k["n"] = 0;
  expect_field(k.dump(), "n");
}

TEST(InstanceFile, CurvatureStrings) {
  for (const std::string s : {"zero", "nonneg", "nonpos", "any", "fixed:-2.5"}) {
    auto F = catalog_file("ex4.7");
    auto j = instance_to_json(F);
    j["psi"]["curvature"] = s;
    EXPECT_EQ(instance_to_json(instance_from_json(j))["psi"]["curvature"], s);
  }
  auto j = instance_to_json(catalog_file("ex4.7"));
  j["psi"]["curvature"] = "fixed:abc";
  EXPECT_THROW(instance_from_json(j), ParseError);
}

TEST(InstanceFile, RoundTripIsIdentity) {
  for (const auto& n : catalog_names()) {
    const auto F = catalog_file(n);
    const std::string path = temp_path(n + ".json");
    save_instance(path, F);
    const auto G = load_instance_file(path);
    EXPECT_EQ(instance_to_json(G), instance_to_json(F)) << n;
    EXPECT_EQ(dump_report(build_instance(G)), dump_report(build_instance(F))) << n;
    std::remove(path.c_str());
  }
}

TEST(InstanceFile, RoundTripKeepsDomainsAndTerms) {
  auto F = load_instance_file(kData + "/quartic-blackbox.json");
  F.g.domain = Box(Vector::Constant(1, -kInf), Vector::Constant(1, 0.0));
  const auto j = instance_to_json(F);
  const auto G = instance_from_json(j);
  EXPECT_EQ(instance_to_json(G), j);
  ASSERT_EQ(G.f.terms.size(), 1u);
  EXPECT_EQ(G.f.terms[0].powers, std::vector<int>{4});
  EXPECT_EQ(G.g.domain->lower(0), -kInf);
}

TEST(InstanceFile, BlackBoxPolyEvaluates) {
  const auto P = load_instance(kData + "/quartic-blackbox.json");
  EXPECT_EQ(P.f.quadratic(), nullptr);
  const Vector x = Vector::Constant(1, 2.0);
  EXPECT_DOUBLE_EQ(P.f(x), 9.0 + 1.6);
}

TEST(Random, SameSeedSameBytes) {
  RandomSpec s;
  s.n = 3;
  s.m = 2;
  s.seed = 42;
  EXPECT_EQ(instance_to_json(random_instance_file(s)).dump(), instance_to_json(random_instance_file(s)).dump());
  s.seed = 43;
  RandomSpec t = s;
  t.seed = 42;
  EXPECT_NE(instance_to_json(random_instance_file(s)).dump(), instance_to_json(random_instance_file(t)).dump());
}

TEST(Random, ModulusWithinRange) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    RandomSpec s;
    s.n = 1 + seed % 3;
    s.m = 1 + (seed / 3) % 3;
    s.f_modulus_lo = 0.2;
    s.f_modulus_hi = 0.7;
    s.g_modulus_lo = s.g_modulus_hi = 0.0;
    s.seed = seed;
    const auto F = random_instance_file(s);
    const double rf = -min_eigenvalue(F.f.A);
    EXPECT_GE(rf, 0.2 - 1e-9);
    EXPECT_LE(rf, 0.7 + 1e-9);
    EXPECT_GE(min_eigenvalue(F.g.A), -1e-9);  // modulus 0: convex
    EXPECT_EQ(F.L.rows(), s.m);
    EXPECT_EQ(F.L.cols(), s.n);
    EXPECT_NO_THROW(build_instance(F));
  }
}

TEST(Random, SpecParsing) {
  const auto s = random_spec_from_json(json::parse(R"({"n":2,"m":3,"f_modulus":[0,0.5],"L_scale":2,"seed":7})"));
  EXPECT_EQ(s.n, 2);
  EXPECT_EQ(s.m, 3);
  EXPECT_EQ(s.f_modulus_hi, 0.5);
  EXPECT_EQ(s.L_scale, 2.0);
  EXPECT_EQ(s.seed, 7u);
  EXPECT_THROW(random_spec_from_json(json::parse(R"({"n":0})")), ParseError);
  EXPECT_THROW(random_spec_from_json(json::parse(R"({"f_modulus":[1,0]})")), ParseError);
}

TEST(Report, Ex47) {
  const auto R = run_report(catalog("ex4.7"));
  EXPECT_NEAR(R.dual.primal, 0.8, 1e-9);
  EXPECT_NEAR(R.dual.dual_conjugate, 0.8, 1e-6);
  EXPECT_LE(std::abs(R.dual.gap), 1e-6);
  EXPECT_TRUE(R.weak_duality_holds);
  for (const char* k : {"primal", "dcp", "ld", "lp", "gap", "flags", "attaining_psi", "certificates"})
    EXPECT_TRUE(R.doc.contains(k)) << k;
  ASSERT_EQ(R.doc["certificates"].size(), default_eps_ladder().size());
  for (const auto& c : R.doc["certificates"]) EXPECT_TRUE(c["ok"].get<bool>());
  EXPECT_NE(R.table.find("primal"), std::string::npos);
}

TEST(Report, Ex611) {
  const auto R = run_report(catalog("ex6.11"));
  EXPECT_NEAR(R.dual.primal, -9.25, 1e-6);
  EXPECT_NEAR(R.ld.value, -9.25, 1e-6);
  EXPECT_NEAR(R.lp.value, -9.25, 1e-6);
}

TEST(Report, InfinitiesAreStrings) {
  auto F = catalog_file("zero");
  F.f.u = Vector::Constant(1, 1.0);  // unbounded below
  const auto R = run_report(build_instance(F));
  EXPECT_EQ(R.doc["primal"], "-inf");
}

TEST(Report, DeterministicBytes) {
  for (const auto& n : catalog_names()) EXPECT_EQ(dump_report(catalog(n)), dump_report(catalog(n))) << n;
}

TEST(Report, CatalogHasOnlyTruncationFlags) {
  for (const auto& n : catalog_names()) {
    const auto R = run_report(catalog(n));
    EXPECT_TRUE(R.weak_duality_holds) << n;
    EXPECT_FALSE(R.doc["flags"]["unbounded_suspected"].get<bool>()) << n;
  }
}

TEST(Reproduce, RowsPassExceptKnownSupportTest) {
  for (const auto& n : catalog_names()) {
    for (const auto& r : reproduce(n)) {
      if (n == "ex6.11" && r.quantity.find("support test") != std::string::npos) {
        EXPECT_FALSE(r.pass);  // no x0 meets every part; see README
        continue;
      }
      EXPECT_TRUE(r.pass) << n << ": " << r.quantity << " expected " << r.expected << " got " << r.computed;
    }
  }
  EXPECT_THROW(reproduce("nope"), UnknownCatalogName);
}
