#include <stdexcept>

#include "liesym/eval.hpp"
#include "liesym/parse.hpp"
#include "liesym/reduction.hpp"

namespace liesym {

namespace {

Expr sym(const char* n) { return Expr::symbol(n); }

// Transcriptions of the published solutions. The volatility "f" inside the
// C_I logarithm and the "a" of C_II are read as f0 and alpha.
const char* const kLogPhiI =
    "-(f0^2*kappa2 + 2*r)/2*(kappa2-1)*t - 2*kappa*beta/(2*alpha*f0)*(f0^2*rho*kappa2 - mu + r + alpha*mu*f0/beta)*"
    "exp(alpha*t) - beta^2*kappa^2/(4*alpha)*exp(2*alpha*t)";

const char* const kLogPhiII =
    "-1/2*((f0^2*kappa2 + 2*r)*(kappa2-1) + 2*alpha)*t + (-kappa/(alpha*beta^2*f0^2)*(beta*(r - mu + "
    "rho*kappa2*f0^2) + alpha*m*f0)*exp(-alpha*t) + kappa^2/(4*alpha*f0^2*beta^2)*exp(-2*alpha*t))";

const char* const kPsiIII = "-kappa*beta*rho/(alpha*f0*t) - r/f0^2 + 1/2 + 2/(4*f0^2*t)";

const char* const kLogPhiIII =
    "-1/2*ln(t) + (2*rho^2 - alpha*t)/(alpha^2*t)*beta^2*kappa^2*exp(2*alpha*t) - kappa/(2*alpha*f0)*exp(alpha*t)*"
    "(2*alpha*m*f0 + 2*beta*(r - mu - 2*rho*r + rho/2*f0^2) + (2*r + f0^2)^2/(8*f0^2)*t)";

const char* const kPsiBar =
    "(4*rho*f0*alpha*(m-y) + beta*(alpha*(f0^2 - 2*r)*t - 4*rho*(mu-r)) + alpha*beta^2)/(2*beta*f0^2*(alpha*t - "
    "2*rho^2))";

const char* const kV =
    "(alpha^2/(beta^2*(alpha*t - 2*rho^2))*y - alpha*(2*beta*(r - mu + f0^2/2*rho - 2*r*rho) + 2*f0*alpha*m)/"
    "(beta^2*f0^2*(alpha*t - 2*rho^2)))*t*y";

const char* const kLogPhiIV =
    "-(f0^2*(8*alpha - 4*r - f0^2) - 4*r^2)/(8*f0^2*(alpha*t - 2*rho^2))*(alpha*t^2 - 2*rho^2*t)"
    " + (f0^2 - 2*r)^2/(2*f0^2*alpha*(alpha*t - 2*rho^2))*rho^4"
    " + 2*(f0^2 - 2*r^2)*(f0*alpha*m - beta*(mu-r))/(f0^2*alpha*beta*(alpha*t - 2*rho^2))*rho^3"
    " + (4*beta*(r-mu) + 2*f0*alpha*m)/(beta^2*f0*(alpha*t - 2*rho^2))*m*rho^2"
    " + 2*(mu-r)^2/(f0^2*alpha*(alpha*t - 2*rho^2))*rho^2";

Expr kummer_solution(const Expr& a, const Expr& z) {
  Expr half(Rational(1, 2));
  return sym("w1") * Expr::function("M", {a, half, z}) + sym("w2") * Expr::function("U", {a, half, z});
}

ClosedFormSolution printed_form(const std::string& label) {
  ClosedFormSolution cf;
  cf.label = label;
  cf.printed = true;
  const Expr S = sym("S"), t = sym("t"), y = sym("y"), phi0 = sym("phi0");
  if (label == "A_I") {
    Expr c1 = parse("2*beta/f0*(rho*kappa2*f0^2 - mu + r)");
    Expr c2 = parse("(kappa^2-1)*f0^2 + 2*(r*kappa2 - r + kappa1)");
    Expr a = -c2 / (Expr(4) * sym("alpha"));
    Expr z = pow(sym("alpha") * (sym("m") - y) + c1 / Expr(2), Expr(2)) / sym("alpha");
    cf.components = {{"c1", c1}, {"c2", c2}, {"kummer_a", a}, {"kummer_z", z}};
    cf.value = pow(S, sym("kappa2")) * exp(sym("kappa1") * t) * kummer_solution(a, z);
    cf.constants = {"w1", "w2", "kappa", "kappa1", "kappa2"};
  } else if (label == "B_I") {
    Expr lp = parse(kLogPhiI);
    cf.log_phi = lp;
    cf.phi_ode = LinearODE1{"t", parse("2*f0"),
                            parse("(f0^3*kappa2 + 2*f0*r)*(kappa2-1) + 2*kappa*beta*(f0^2*rho*kappa2 - mu + r + "
                                  "alpha*mu*f0/beta)*exp(alpha*t) + f0*beta^2*kappa^2*exp(2*alpha*t)")};
    cf.components = {{"log_phi", lp}};
    cf.value = pow(S, sym("kappa2")) * exp(sym("kappa") * exp(sym("alpha") * t) * y) * phi0 * exp(lp);
    cf.constants = {"phi0", "kappa", "kappa2"};
  } else if (label == "B_II") {
    Expr lp = parse(kLogPhiII);
    Expr g = parse("alpha/beta^2*y^2 + ((kappa*exp(-alpha*t) - 2*alpha*m)/(beta^2*f0) - 2*(r - mu + rho*kappa2*f0^2)/"
                   "(beta*f0))*y");
    cf.log_phi = lp;
    cf.components = {{"log_phi", lp}, {"exponent", g}};
    cf.value = phi0 * exp(lp) * pow(S, sym("kappa2")) * exp(g);
    cf.constants = {"phi0", "kappa", "kappa2"};
  } else if (label == "C_I") {
    Expr psi = parse(kPsiIII), lp = parse(kLogPhiIII);
    cf.log_phi = lp;
    cf.components = {{"psi", psi}, {"log_phi", lp}};
    cf.value = pow(S, psi) * exp(sym("kappa") * exp(sym("alpha") * t) * y) * phi0 * exp(lp);
    cf.constants = {"phi0", "kappa"};
  } else if (label == "C_II") {
    Expr psibar = parse(kPsiBar), V = parse(kV), lp = parse(kLogPhiIV);
    cf.log_phi = lp;
    cf.components = {{"psibar", psibar}, {"V", V}, {"log_phi", lp}};
    cf.value = phi0 * exp(lp) / sqrt(parse("alpha*t - 2*rho^2")) * pow(S, psibar) * exp(V);
    cf.constants = {"phi0"};
  } else {
    throw std::invalid_argument("unknown closed form " + label);
  }
  return cf;
}

ClosedFormSolution derived_form(const std::string& label) {
  ClosedFormSolution cf;
  cf.label = label;
  cf.printed = false;
  const auto model = build_model(ModelId::StochVolConst);
  const auto& p = model.params;
  const Expr S = sym("S"), t = sym("t"), y = sym("y");
  if (label == "A_I") {
    auto ode = to_ode2(reduce(model, ansatz_a1(sym("kappa1"), sym("kappa2"))));
    // beta^2 w'' + (2 alpha (m - y) + c1) w' + c2 w = 0 turns into Kummer's
    // equation in z = zeta^2/(alpha beta^2), zeta = alpha (m - y) + c1/2.
    Expr c1 = ode.b - Expr(2) * sym("alpha") * (sym("m") - y);
    Expr c2 = ode.c;
    if (depends_on(c1, "y") || depends_on(c2, "y") || !is_zero(ode.a - pow(sym("beta"), Expr(2))))
      throw ReductionError("A_I: reduced equation is not of Kummer type");
    Expr zeta = sym("alpha") * (sym("m") - y) + c1 / Expr(2);
    Expr a = -c2 / (Expr(4) * sym("alpha"));
    Expr z = pow(zeta, Expr(2)) / (sym("alpha") * pow(sym("beta"), Expr(2)));
    cf.components = {{"c1", c1}, {"c2", c2}, {"kummer_a", a}, {"kummer_z", z}};
    cf.value = pow(S, sym("kappa2")) * exp(sym("kappa1") * t) * kummer_solution(a, z);
    cf.constants = {"w1", "w2", "kappa1", "kappa2"};
    return cf;
  }
  ReductionAnsatz an;
  if (label == "B_I")
    an = ansatz_b1(p, sym("kappa"), sym("kappa2"));
  else if (label == "B_II")
    an = ansatz_b2(p, sym("kappa"), sym("kappa2"));
  else if (label == "C_I")
    an = ansatz_c1(p, sym("kappa"));
  else if (label == "C_II")
    an = ansatz_c2(p);
  else
    throw std::invalid_argument("unknown closed form " + label);
  auto ode = to_ode1(reduce(model, an));
  cf.phi_ode = ode;
  cf.constants = an.constants;
  cf.constants.push_back("phi0");
  cf.components = {{"factor", an.factor}};
  if (auto lp = integrate(-ode.q / ode.p, "t")) {
    cf.log_phi = *lp;
    cf.components["log_phi"] = *lp;
    cf.value = an.factor * sym("phi0") * exp(*lp);
  } else {
    cf.value = an.factor * Expr::function("phi", {t});
  }
  return cf;
}

}  // namespace

std::vector<std::string> closed_form_labels() { return {"A_I", "B_I", "B_II", "C_I", "C_II"}; }

ClosedFormSolution closed_form(const std::string& label, bool printed) {
  std::string l = label == "A_I-Kummer" ? "A_I" : label;
  return printed ? printed_form(l) : derived_form(l);
}

}  // namespace liesym
