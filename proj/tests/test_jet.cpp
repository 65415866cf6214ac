#include <doctest.h>

#include <chrono>
#include <random>

#include "liesym/eval.hpp"
#include "liesym/jet.hpp"
#include "liesym/linear_system.hpp"
#include "liesym/parse.hpp"

using namespace liesym;

namespace {

Expr P(const char* s) { return parse(s); }

Pde stochvol_generic() {
  return Pde{"stochvol-generic", JetSpace::standard(),
             P("1/2*f(y)^2*S^2*u_SS + rho*beta*S*f(y)*u_Sy + 1/2*beta^2*u_yy + r*S*u_S"
               " + (alpha*(m-y) - beta*rho*(mu-r)/f(y))*u_y - r*u + u_t"),
             std::nullopt, {"S"}};
}

Pde stochvol_const() {
  return Pde{"stochvol-const", JetSpace::standard(),
             P("1/2*f0^2*S^2*u_SS + rho*beta*S*f0*u_Sy + 1/2*beta^2*u_yy + r*S*u_S"
               " + (alpha*(m-y) - beta*rho*(mu-r)/f0)*u_y - r*u + u_t"),
             P("alpha"), {"S"}};
}

Pde heat() { return Pde{"heat", JetSpace({"t", "x"}), P("u_t - u_xx"), std::nullopt, {}}; }

Pde bsm() {
  return Pde{"bsm", JetSpace({"t", "S"}), P("1/2*sigma^2*S^2*u_SS + r*S*u_S - r*u + u_t"), std::nullopt, {"S"}};
}

VectorField field(const JetSpace& js, std::vector<const char*> xi, const char* eta) {
  VectorField v(js);
  for (std::size_t i = 0; i < xi.size(); ++i) v.xi[i] = P(xi[i]);
  v.eta = P(eta);
  return v;
}

// Small random polynomial in (t, S, y, u) with integer coefficients.
Expr random_poly(std::mt19937_64& rng) {
  const char* vars[] = {"t", "S", "y", "u"};
  std::uniform_int_distribution<int> nterms(0, 3), coeff(-3, 3), power(0, 2);
  std::vector<Expr> parts;
  int n = nterms(rng);
  for (int k = 0; k < n; ++k) {
    Expr m(coeff(rng));
    for (auto v : vars) m = m * pow(Expr::symbol(v), Expr(power(rng)));
    parts.push_back(m);
  }
  return sum(parts);
}

VectorField random_field(std::mt19937_64& rng) {
  VectorField v(JetSpace::standard());
  for (auto& x : v.xi) x = random_poly(rng);
  v.eta = random_poly(rng);
  return v;
}

// Expanded second prolongation written out with partial derivatives only.
ProlongedField index_formula(const VectorField& v) {
  const JetSpace& js = v.space;
  const std::size_t n = js.dimension();
  const std::string u = js.dependent();
  auto x = [&](std::size_t i) { return js.independent()[i]; };
  auto ui = [&](std::size_t i) { return js.jet(i); };
  auto uij = [&](std::size_t i, std::size_t j) { return js.jet(i, j); };
  ProlongedField p;
  p.base = v;
  const Expr& eta = v.eta;
  for (std::size_t i = 0; i < n; ++i) {
    Expr e = diff(eta, x(i)) + ui(i) * diff(eta, u);
    for (std::size_t k = 0; k < n; ++k) e = e - ui(k) * (diff(v.xi[k], x(i)) + ui(i) * diff(v.xi[k], u));
    p.eta_i.push_back(e);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      Expr e = diff(diff(eta, x(i)), x(j)) + ui(j) * diff(diff(eta, x(i)), u) + ui(i) * diff(diff(eta, x(j)), u) +
               ui(i) * ui(j) * diff(eta, u, 2) + uij(i, j) * diff(eta, u);
      for (std::size_t k = 0; k < n; ++k) {
        const Expr& xk = v.xi[k];
        e = e - diff(diff(xk, x(i)), x(j)) * ui(k) - diff(diff(xk, x(i)), u) * ui(j) * ui(k) -
            diff(diff(xk, x(j)), u) * ui(i) * ui(k) - diff(xk, u, 2) * ui(i) * ui(j) * ui(k) -
            diff(xk, u) * (uij(i, j) * ui(k) + ui(i) * uij(j, k) + ui(j) * uij(i, k)) - diff(xk, x(i)) * uij(j, k) -
            diff(xk, x(j)) * uij(i, k);
      }
      p.eta_ij.emplace(std::make_pair(i, j), e);
    }
  }
  return p;
}

}  // namespace

TEST_CASE("jet space naming") {
  auto js = JetSpace::standard();
  CHECK(js.first(1) == "u_S");
  CHECK(js.second(2, 1) == "u_Sy");
  CHECK(js.second(0, 0) == "u_tt");
  CHECK(js.fiber().size() == 10);
  CHECK_THROWS(js.index("z"));
  CHECK_THROWS(JetSpace({"t", "t"}));
}

TEST_CASE("total derivative") {
  auto js = JetSpace::standard();
  CHECK(total_derivative(P("u"), "t", js) == P("u_t"));
  CHECK(total_derivative(P("S*u_S"), "S", js) == P("u_S + S*u_SS"));
  CHECK(total_derivative(P("f(y)*u"), "y", js) == P("fp(y)*u + f(y)*u_y"));
  CHECK_THROWS(total_derivative(P("u_SS"), "S", js));
}

TEST_CASE("prolongation test vectors") {
  auto js = JetSpace::standard();
  auto dt = prolong2(translation(js, "t"));
  for (const auto& e : dt.eta_i) CHECK(e.is_zero());
  for (const auto& [k, e] : dt.eta_ij) CHECK(e.is_zero());

  auto xu = prolong2(scaling_u(js));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(xu.eta_i[i] == js.jet(i));
    for (std::size_t j = i; j < 3; ++j) CHECK(xu.second(i, j) == js.jet(i, j));
  }

  auto ss = prolong2(field(js, {"0", "S", "0"}, "0"));
  CHECK(ss.eta_i[1] == P("-u_S"));
  CHECK(ss.eta_i[0].is_zero());
  CHECK(ss.eta_i[2].is_zero());
  CHECK(ss.second(1, 1) == P("-2*u_SS"));
  CHECK(ss.second(1, 2) == P("-u_Sy"));
  CHECK(ss.second(0, 1) == P("-u_tS"));
  CHECK(ss.second(0, 0).is_zero());
  CHECK(ss.second(2, 2).is_zero());
}

TEST_CASE("prolongation equals the expanded index formula") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto v = random_field(rng);
    auto a = prolong2(v);
    auto b = index_formula(v);
    for (std::size_t i = 0; i < 3; ++i) CHECK(a.eta_i[i] == b.eta_i[i]);
    for (const auto& [k, e] : a.eta_ij) CHECK(e == b.eta_ij.at(k));
  }
}

TEST_CASE("symmetry checks on the generic stochastic volatility equation") {
  auto pde = stochvol_generic();
  auto js = pde.space;
  auto start = std::chrono::steady_clock::now();
  CHECK(check_symmetry(translation(js, "t"), pde).passed);
  CHECK(check_symmetry(field(js, {"0", "S", "0"}, "0"), pde).passed);
  auto xu = check_symmetry(scaling_u(js), pde);
  CHECK(xu.passed);
  REQUIRE(xu.multiplier);
  CHECK(xu.multiplier->is_one());

  auto dy = check_symmetry(translation(js, "y"), pde);
  CHECK_FALSE(dy.passed);
  REQUIRE(dy.residual.count("u_SS"));
  CHECK(dy.residual.at("u_SS") == P("S^2*f(y)*fp(y)"));
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(5));
}

TEST_CASE("solution fields are symmetries") {
  auto pde = stochvol_generic();
  CHECK(check_symmetry(solution_field(pde.space, P("S")), pde).passed);
  CHECK(check_symmetry(solution_field(pde.space, P("exp(r*t)")), pde).passed);
  CHECK_FALSE(check_symmetry(solution_field(pde.space, P("S^2")), pde).passed);
}

TEST_CASE("X_u is a symmetry of every linear equation") {
  for (const auto& pde : {stochvol_generic(), stochvol_const(), heat(), bsm()})
    CHECK(check_symmetry(scaling_u(pde.space), pde).passed);
}

TEST_CASE("solved form") {
  Pde scaled{"scaled", JetSpace({"t", "x"}), P("2*u_t - 2*u_xx"), std::nullopt, {}};
  CHECK(solved_rest(scaled) == P("-u_xx"));
  Pde bad{"bad", JetSpace({"t", "x"}), P("u_xx + u"), std::nullopt, {}};
  CHECK_THROWS_AS(solved_rest(bad), std::invalid_argument);
  Pde nonlinear{"nonlinear", JetSpace({"t", "x"}), P("u*u_t - u_xx"), std::nullopt, {}};
  CHECK_THROWS_AS(check_symmetry(scaling_u(nonlinear.space), nonlinear), std::invalid_argument);
}

TEST_CASE("brackets: antisymmetry and Jacobi") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = random_field(rng), b = random_field(rng), c = random_field(rng);
    CHECK((lie_bracket(a, b) + lie_bracket(b, a)).is_zero());
    auto j = lie_bracket(lie_bracket(a, b), c) + lie_bracket(lie_bracket(b, c), a) + lie_bracket(lie_bracket(c, a), b);
    CHECK(j.is_zero());
  }
  auto js = JetSpace::standard();
  CHECK(lie_bracket(translation(js, "t"), translation(js, "t")).is_zero());
}

TEST_CASE("decomposition in a basis") {
  auto js = JetSpace({"t", "x"});
  std::vector<VectorField> basis{translation(js, "t"), translation(js, "x"), scaling_u(js),
                                 field(js, {"2*t", "x"}, "0")};
  auto v = field(js, {"4*a*t + 1", "2*a*x"}, "3*u");
  auto d = decompose_in_basis(v, basis);
  CHECK(d.exact);
  CHECK(d.coeffs[0] == Expr(1));
  CHECK(d.coeffs[1].is_zero());
  CHECK(d.coeffs[2] == Expr(3));
  CHECK(d.coeffs[3] == P("2*a"));

  VectorField recon(js);
  for (std::size_t i = 0; i < basis.size(); ++i) recon = recon + d.coeffs[i] * basis[i];
  CHECK((recon - v).is_zero());

  auto zero = decompose_in_basis(VectorField(js), basis);
  CHECK(zero.exact);
  for (const auto& c : zero.coeffs) CHECK(c.is_zero());

  auto outside = decompose_in_basis(field(js, {"t^2", "0"}, "0"), basis);
  CHECK_FALSE(outside.exact);
}

TEST_CASE("linear system nullspace") {
  LinearSystem sys(3);
  sys.add_row({{0, P("a")}, {1, P("-1")}});
  sys.add_row({{1, P("b + 1")}, {2, P("-1")}});
  auto ns = sys.nullspace();
  REQUIRE(ns.vectors.size() == 1);
  auto v = clear_vector_denominators(ns.vectors[0]);
  CHECK(is_zero(P("a") * v[0] - v[1]));
  CHECK(is_zero(P("b + 1") * v[1] - v[2]));
}

TEST_CASE("heat equation: classical six-dimensional algebra") {
  auto pde = heat();
  auto sys = determining_system(pde);
  CHECK(sys.unknowns.size() == 4);
  auto sol = solve_determining(sys);
  CHECK(sol.complete());
  CHECK(sol.basis.size() == 6);
  auto js = pde.space;
  std::vector<VectorField> classical{translation(js, "t"),           translation(js, "x"),
                                     scaling_u(js),                  field(js, {"2*t", "x"}, "0"),
                                     field(js, {"0", "2*t"}, "-x*u"), field(js, {"4*t^2", "4*t*x"}, "-(x^2+2*t)*u")};
  for (const auto& g : classical) {
    CHECK(check_symmetry(g, pde).passed);
    CHECK(decompose_in_basis(g, sol.basis).exact);
  }
}

TEST_CASE("BSM: six-dimensional algebra") {
  auto sol = solve_determining(determining_system(bsm()));
  CHECK(sol.complete());
  CHECK(sol.basis.size() == 6);
}

TEST_CASE("generic volatility: three-dimensional algebra") {
  auto sol = solve_determining(determining_system(stochvol_generic()));
  CHECK(sol.complete());
  CHECK(sol.basis.size() == 3);
}

TEST_CASE("constant volatility: six-dimensional algebra") {
  auto pde = stochvol_const();
  auto sol = solve_determining(determining_system(pde));
  CHECK(sol.complete());
  CHECK(sol.basis.size() == 6);
  auto js = pde.space;
  CHECK(decompose_in_basis(field(js, {"0", "0", "exp(-alpha*t)"}, "0"), sol.basis).exact);
}
