#include <doctest.h>

#include <cmath>
#include <random>

#include "liesym/eval.hpp"
#include "liesym/models.hpp"
#include "liesym/parse.hpp"

using namespace liesym;

namespace {

Expr P(const char* s) { return parse(s); }

ModelParams numeric_params(std::initializer_list<std::pair<const char*, const char*>> kv) {
  ModelParams p;
  for (const auto& [k, v] : kv) p.field(k) = P(v);
  return p;
}

std::vector<PDEModel> all_models() {
  ModelParams s = ModelParams{}.with_symbolic_defaults();
  ModelParams stein = s;
  stein.rho = Expr(0);
  return {build_bsm(s),        build_stochvol(s, FSpec::Opaque), build_stochvol(s, FSpec::Constant),
          build_heston_raw(s), build_heston_transformed(s),      build_steinstein(stein),
          build_heat()};
}

}  // namespace

TEST_CASE("BSM builder") {
  auto m = build_bsm(numeric_params({{"f0", "1"}, {"r", "0"}}));
  CHECK(m.pde.equation == P("1/2*S^2*u_SS + u_t"));
  auto sym = build_bsm(ModelParams{}.with_symbolic_defaults());
  CHECK(parse(to_string(sym.pde.equation)) == sym.pde.equation);
  CHECK_THROWS_AS(build_bsm(numeric_params({{"r", "1"}})), std::invalid_argument);
}

TEST_CASE("stochastic volatility builder") {
  ModelParams s = ModelParams{}.with_symbolic_defaults();
  auto generic = build_stochvol(s, FSpec::Opaque);
  CHECK(contains_function(generic.pde.equation, "f"));
  CHECK(diff(generic.pde.equation, "u_SS") == P("1/2*S^2*f(y)^2"));

  ModelParams missing;
  missing.r = Expr(1);
  CHECK_THROWS_AS(build_stochvol(missing, FSpec::Constant), std::invalid_argument);

  // With no volatility process the equation is the BSM one.
  ModelParams flat = s;
  flat.rho = Expr(0);
  flat.beta = Expr(0);
  flat.alpha = Expr(0);
  CHECK(build_stochvol(flat, FSpec::Constant).pde.equation == build_bsm(s).pde.equation);
}

TEST_CASE("constant volatility equation agrees with direct arithmetic") {
  ModelParams one;
  for (const auto& n : ModelParams::field_names()) one.field(n) = Expr(1);
  auto m = build_stochvol(one, FSpec::Constant);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(0.5, 1.5);
  for (int k = 0; k < 10; ++k) {
    std::map<std::string, double> pt;
    for (const auto& s : {"t", "S", "y", "u", "u_t", "u_S", "u_y", "u_SS", "u_Sy", "u_yy"}) pt[s] = d(rng);
    double S = pt["S"], y = pt["y"];
    double direct = 0.5 * S * S * pt["u_SS"] + S * pt["u_Sy"] + 0.5 * pt["u_yy"] + S * pt["u_S"] + (1 - y) * pt["u_y"] -
                    pt["u"] + pt["u_t"];
    CHECK(evaluate(m.pde.equation, pt) == doctest::Approx(direct).epsilon(1e-13));
  }
}

TEST_CASE("Heston builders") {
  ModelParams s = ModelParams{}.with_symbolic_defaults();
  s.beta.reset();
  s.c1.reset();
  s.c2.reset();
  auto [raw, tr] = build_heston(s);
  auto k = heston_constants(s);
  CHECK(k.beta == P("delta/2"));
  CHECK(diff(tr.pde.equation, "u_y") == Expr(Rational(1, 2)) * (k.c1 * P("y") + k.c2 / P("y")));

  // Chain rule for Y = y^2 applied to the variance form reproduces the
  // transformed equation exactly.
  std::vector<SubstitutionRule> chain{
      SubstitutionRule::symbol("u_Y", P("u_y/(2*y)")),
      SubstitutionRule::symbol("u_YY", P("(u_yy - u_y/y)/(4*y^2)")),
      SubstitutionRule::symbol("u_SY", P("u_Sy/(2*y)")),
      SubstitutionRule::symbol("Y", P("y^2")),
  };
  CHECK(is_zero(substitute(raw.pde.equation, chain) - tr.pde.equation));

  ModelParams flat = s;
  flat.delta = Expr(0);
  CHECK_THROWS_AS(build_heston_transformed(flat), std::invalid_argument);
}

TEST_CASE("Heston matches the identity-volatility family after absorbing the premium") {
  ModelParams h = ModelParams{}.with_symbolic_defaults();
  auto tr = build_heston_transformed(h);
  ModelParams sv = h;
  sv.alpha = -*h.c1 / Expr(2);
  sv.m = Expr(0);
  sv.mu = *h.r - *h.c2 / (Expr(2) * *h.beta * *h.rho);
  auto gen = build_stochvol(sv, FSpec::Identity);
  CHECK(diff(gen.pde.equation, "u_y") == diff(tr.pde.equation, "u_y"));
  CHECK(is_zero(gen.pde.equation - tr.pde.equation));
}

TEST_CASE("Stein-Stein builder") {
  ModelParams s = ModelParams{}.with_symbolic_defaults();
  s.rho = Expr(0);
  auto m = build_steinstein(s);
  CHECK_FALSE(depends_on(m.pde.equation, "u_Sy"));
  CHECK(diff(m.pde.equation, "u_y") == P("alpha*(m - y) - beta*gamma0"));
  ModelParams bad = s;
  bad.rho = P("1/2");
  CHECK_THROWS_AS(build_steinstein(bad), std::invalid_argument);

  auto js = m.pde.space;
  CHECK(check_symmetry(translation(js, "t"), m.pde).passed);
  VectorField x2(js);
  x2.set("S", P("S"));
  CHECK(check_symmetry(x2, m.pde).passed);
  CHECK(check_symmetry(scaling_u(js), m.pde).passed);
  VectorField x3(js);
  x3.set("y", P("exp(-alpha*t)"));
  CHECK_FALSE(check_symmetry(x3, m.pde).passed);
}

TEST_CASE("every builder yields a linear evolution equation") {
  for (const auto& m : all_models()) {
    CAPTURE(m.pde.label);
    CHECK(is_linear_homogeneous(m.pde));
    CHECK(diff(m.pde.equation, m.pde.space.first(0)).is_one());
    CHECK(check_symmetry(scaling_u(m.pde.space), m.pde).passed);
  }
}

TEST_CASE("JSON model config") {
  auto j = nlohmann::json::parse(
      R"({"model": "heston", "params": {"theta": 2, "lambda": "1/2", "delta": 0.7, "mbar": "m", "r": 0.05, "rho": -0.5}})");
  auto c = model_config_from_json(j);
  CHECK(c.id == ModelId::HestonTransformed);
  CHECK(*c.params.delta == P("7/10"));
  CHECK(*c.params.r == P("1/20"));
  CHECK(*c.params.mbar == P("m"));
  auto tr = build_model(c.id, c.params);
  CHECK(*tr.params.beta == P("7/20"));
  CHECK(*tr.params.c1 == P("-5/2"));

  CHECK_THROWS(model_params_from_json(nlohmann::json::parse(R"({"rho": 1.5})")));
  CHECK_THROWS(model_params_from_json(nlohmann::json::parse(R"({"nope": 1})")));
  CHECK_THROWS(model_config_from_json(nlohmann::json::parse(R"({"model": "sabr"})")));

  for (const auto& n : model_names()) CHECK(model_name(model_from_name(n)) == n);
}
