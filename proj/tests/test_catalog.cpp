#include <doctest.h>

#include "liesym/catalog.hpp"
#include "liesym/eval.hpp"
#include "liesym/parse.hpp"

using namespace liesym;

namespace {

Expr P(const char* s) { return parse(s); }

std::size_t find(const BracketTable& t, const std::string& label) {
  for (std::size_t i = 0; i < t.labels.size(); ++i)
    if (t.labels[i] == label) return i;
  FAIL("missing label " << label);
  return 0;
}

}  // namespace

TEST_CASE("catalog triples for the reduced-symmetry models") {
  for (auto id : {ModelId::StochVolGeneric, ModelId::HestonTransformed, ModelId::SteinStein, ModelId::HestonRaw}) {
    auto entries = catalog(id);
    REQUIRE(entries.size() == 3);
    CHECK(entries[0].label == "X1");
    CHECK(entries[1].label == "X2");
    CHECK(entries[2].label == "Xu");
    for (const auto& e : entries) {
      CHECK(e.printed_passes);
      CHECK(e.verified);
    }
    CHECK(catalog_diffs(entries).entries.empty());
  }
}

TEST_CASE("constant volatility generators") {
  auto entries = catalog(ModelId::StochVolConst);
  REQUIRE(entries.size() == 6);
  for (const auto& e : entries) {
    CAPTURE(e.label);
    CHECK(e.verified);
    bool expect_printed = e.label != "Xbar4" && e.label != "Xbar5";
    CHECK(e.printed_passes == expect_printed);
  }
  auto diffs = catalog_diffs(entries);
  CHECK(diffs.entries.size() == 2);
  for (const auto& d : diffs.entries) CHECK(d.derived_verified);
  CHECK(to_json(diffs).size() == 2);
  CHECK(to_text(diffs).find("Xbar4") != std::string::npos);
}

TEST_CASE("BSM and heat catalogs verify") {
  for (auto id : {ModelId::BSM, ModelId::Heat}) {
    auto entries = catalog(id);
    CHECK(entries.size() == 6);
    for (const auto& e : entries) {
      CAPTURE(e.label);
      CHECK(e.printed_passes);
    }
  }
}

TEST_CASE("constant volatility bracket table") {
  auto model = build_model(ModelId::StochVolConst);
  auto t = bracket_table(catalog(model), model.params);
  auto x1 = find(t, "Xbar1"), x2 = find(t, "Xbar2"), x3 = find(t, "Xbar3"), x4 = find(t, "Xbar4"),
       x5 = find(t, "Xbar5"), xu = find(t, "Xu");
  CHECK(t.antisymmetric());
  CHECK(t.closed());
  CHECK(t.cell_string(x1, x3) == to_string(P("-alpha*Xbar3")));
  CHECK(t.cell_string(x2, x4) == to_string(P("2*Xu")));
  CHECK(t.cell_string(x3, x5) == to_string(P("2*alpha*f0*Xu")));
  CHECK(t.cell_string(x1, x5) == to_string(P("alpha*Xbar5")));
  CHECK(t.cell_string(x1, x4) == to_string(P("2*f0^2*Xbar2 + (f0^2 - 2*r)*Xu")));
  for (std::size_t j = 0; j < t.labels.size(); ++j) {
    CHECK(t.cell_string(xu, j) == "0");
    CHECK(t.cell_string(j, j) == "0");
  }
  // Only the sign of [Xbar4, Xbar2] disagrees with the published table.
  REQUIRE(t.diffs.entries.size() == 1);
  CHECK(t.diffs.entries[0].location == "bracket [Xbar4, Xbar2]");
  CHECK(t.diffs.entries[0].derived == to_string(P("-2*Xu")));
  CHECK(to_json(t)["closed"] == true);
}

TEST_CASE("printed Xbar5 does not close under the time translation") {
  auto entries = catalog(ModelId::StochVolConst);
  std::vector<VectorField> basis;
  for (const auto& e : entries) basis.push_back(e.label == "Xbar5" ? e.printed : e.field);
  auto d = decompose_in_basis(lie_bracket(basis[0], basis[4]), basis);
  CHECK_FALSE(d.exact);
}

TEST_CASE("structure constants satisfy Jacobi at numeric parameters") {
  ModelParams p;
  p.r = P("1/20");
  p.mu = P("1/10");
  p.alpha = P("3/2");
  p.m = P("2/5");
  p.beta = P("7/10");
  p.rho = P("-1/3");
  p.f0 = P("1/5");
  auto model = build_stochvol(p, FSpec::Constant);
  auto t = bracket_table(catalog(model), model.params);
  CHECK(t.closed());
  CHECK(t.diffs.entries.size() == 1);
  const std::size_t n = t.labels.size();
  auto C = [&](std::size_t i, std::size_t j, std::size_t k) { return t.cells[i][j][k]; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          Expr s;
          for (std::size_t m = 0; m < n; ++m)
            s = s + C(i, j, m) * C(m, k, l) + C(j, k, m) * C(m, i, l) + C(k, i, m) * C(m, j, l);
          CHECK(s.is_zero());
        }
}

TEST_CASE("classification dimensions and catalog spans") {
  struct Case {
    ModelId id;
    std::size_t dim;
  };
  for (auto [id, dim] : {Case{ModelId::StochVolGeneric, 3}, Case{ModelId::StochVolConst, 6}, Case{ModelId::BSM, 6},
                         Case{ModelId::HestonTransformed, 3}, Case{ModelId::SteinStein, 3}, Case{ModelId::Heat, 6}}) {
    auto model = build_model(id);
    CAPTURE(model.pde.label);
    auto c = classify(model);
    CHECK(c.diagnostics.empty());
    CHECK(c.dimension == dim);
    for (const auto& e : catalog(model)) CHECK(decompose_in_basis(e.field, c.basis).exact);
  }
}

TEST_CASE("published table parsing") {
  std::vector<std::string> labels{"Xbar1", "Xbar2", "Xbar3", "Xbar4", "Xbar5", "Xu"};
  auto c = parse_combination("2*f0^2*Xbar2 + (f0^2-2*r)*Xu", labels);
  CHECK(c[1] == P("2*f0^2"));
  CHECK(c[5] == P("f0^2 - 2*r"));
  CHECK_THROWS(parse_combination("Xbar1^2", labels));
  CHECK(published_const_vol_table().size() == 6);
}
