#include "liesym/reduction.hpp"

#include <algorithm>

#include "liesym/eval.hpp"
#include "liesym/parse.hpp"

namespace liesym {

namespace {

Expr sym(const char* n) { return Expr::symbol(n); }

// Replaces the unknown's kernels by jet symbols of `space`.
Expr jetify(const Expr& e, const JetSpace& space) {
  const std::string& head = space.dependent();
  std::vector<Expr> items;
  for (const auto& t : e.terms()) {
    Expr out(t.coeff);
    for (const auto& f : t.mono.factors) {
      const Kernel& k = *f.base;
      Expr base = kernel_expr(f.base);
      if (k.kind == KernelKind::Function && k.name == head) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < k.orders.size(); ++i)
          for (int n = 0; n < k.orders[i]; ++n) idx.push_back(i);
        if (idx.empty())
          base = space.u();
        else if (idx.size() == 1)
          base = space.jet(idx[0]);
        else if (idx.size() == 2)
          base = space.jet(idx[0], idx[1]);
        else
          throw ReductionError("reduced equation has order above two");
      } else if (contains_function(base, head)) {
        throw ReductionError("unknown " + head + " appears nonlinearly");
      }
      out *= pow(base, f.exponent);
    }
    if (!t.mono.exp_arg.is_zero()) out *= exp(t.mono.exp_arg);
    items.push_back(out);
  }
  return sum(items);
}

std::map<std::string, Expr> params_map(const ModelParams& p) {
  std::map<std::string, Expr> out;
  for (const auto& n : ModelParams::field_names())
    if (const auto& v = p.field(n)) out.emplace(n, *v);
  return out;
}

}  // namespace

Expr ReductionAnsatz::tmpl() const { return factor * Expr::function(unknown, invariants); }

ReducedEquation reduce(const Pde& pde, const ReductionAnsatz& a) {
  if (a.invariants.size() != a.new_vars.size() || a.new_vars.empty())
    throw ReductionError(a.label + ": invariants and new variables differ in number");
  if (a.factor.is_zero()) throw ReductionError(a.label + ": zero common factor");
  const JetSpace& js = pde.space;
  const Expr u = a.tmpl();
  std::vector<SubstitutionRule> rules{SubstitutionRule::symbol(js.dependent(), u)};
  std::vector<Expr> d1(js.dimension());
  for (std::size_t i = 0; i < js.dimension(); ++i) {
    d1[i] = diff(u, js.independent()[i]);
    rules.push_back(SubstitutionRule::symbol(js.first(i), d1[i]));
  }
  for (std::size_t i = 0; i < js.dimension(); ++i)
    for (std::size_t j = i; j < js.dimension(); ++j)
      rules.push_back(SubstitutionRule::symbol(js.second(i, j), diff(d1[i], js.independent()[j])));
  Expr e = substitute(pde.equation, rules) / a.factor;

  std::vector<Expr> args;
  for (const auto& v : a.new_vars) args.push_back(Expr::symbol(v));
  e = substitute(e, {SubstitutionRule::rename_args(a.unknown, args)});
  if (!a.inverse.empty()) e = substitute(e, a.inverse);

  // Everything that still carries an eliminated variable must vanish.
  auto parts = collect(e, a.eliminated);
  Expr kept;
  for (const auto& [key, coeff] : parts) {
    if (key.is_one()) {
      kept = coeff;
      continue;
    }
    if (!is_zero(coeff))
      throw ReductionError(a.label + ": common factor not extractable, " + to_string(key) + " survives in " + pde.label);
  }
  JetSpace out(a.new_vars, a.unknown);
  return ReducedEquation{a.label, out, jetify(a.scale * kept, out)};
}

LinearODE2 LinearODE2::scaled(const Expr& k) const { return LinearODE2{var, k * a, k * b, k * c, params}; }

LinearODE2 to_ode2(const ReducedEquation& r) {
  const JetSpace& js = r.space;
  if (js.dimension() != 1) throw ReductionError(r.label + ": reduced equation is not an ODE");
  const std::string w = js.dependent(), w1 = js.first(0), w2 = js.second(0, 0);
  LinearODE2 ode;
  ode.var = js.independent()[0];
  for (const auto& [key, coeff] : collect(r.equation, {w, w1, w2})) {
    if (key == Expr::symbol(w2))
      ode.a = coeff;
    else if (key == Expr::symbol(w1))
      ode.b = coeff;
    else if (key == Expr::symbol(w))
      ode.c = coeff;
    else if (!is_zero(coeff))
      throw ReductionError(r.label + ": not linear homogeneous in " + w);
  }
  if (is_zero(ode.a)) throw ReductionError(r.label + ": leading coefficient vanishes");
  return ode;
}

LinearODE1 to_ode1(const ReducedEquation& r) {
  const JetSpace& js = r.space;
  if (js.dimension() != 1) throw ReductionError(r.label + ": reduced equation is not an ODE");
  LinearODE1 ode;
  ode.var = js.independent()[0];
  for (const auto& [key, coeff] : collect(r.equation, {js.dependent(), js.first(0)})) {
    if (key == js.jet(0))
      ode.p = coeff;
    else if (key == js.u())
      ode.q = coeff;
    else if (!is_zero(coeff))
      throw ReductionError(r.label + ": not a linear first-order equation");
  }
  if (is_zero(ode.p)) throw ReductionError(r.label + ": leading coefficient vanishes");
  return ode;
}

nlohmann::json to_json(const LinearODE2& ode) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : ode.params) params[k] = to_string(v);
  return {{"var", ode.var}, {"a", to_string(ode.a)}, {"b", to_string(ode.b)}, {"c", to_string(ode.c)},
          {"params", params}};
}

LinearODE2 linear_ode2_from_json(const nlohmann::json& j) {
  LinearODE2 ode;
  ode.var = j.value("var", std::string("y"));
  ode.a = parse(j.at("a").get<std::string>());
  ode.b = parse(j.at("b").get<std::string>());
  ode.c = parse(j.at("c").get<std::string>());
  if (j.contains("params"))
    for (const auto& [k, v] : j.at("params").items())
      ode.params[k] = v.is_string() ? parse(v.get<std::string>()) : parse(v.dump());
  return ode;
}

bool equivalent(const LinearODE2& x, const LinearODE2& y) {
  return x.var == y.var && is_zero(x.a - y.a) && is_zero(x.b - y.b) && is_zero(x.c - y.c);
}

// Templates ---------------------------------------------------------------------

ReductionAnsatz ansatz_y1(const Expr& kappa1) {
  ReductionAnsatz a;
  a.label = "Y1";
  a.factor = exp(kappa1 * sym("t"));
  a.unknown = "v";
  a.invariants = {sym("S"), sym("y")};
  a.new_vars = {"S", "y"};
  a.eliminated = {"t"};
  a.constants = {kKappa1};
  return a;
}

ReductionAnsatz ansatz_y2_after_y1(const Expr& kappa2) {
  ReductionAnsatz a;
  a.label = "Y2 after Y1";
  a.factor = pow(sym("S"), kappa2);
  a.unknown = "w";
  a.invariants = {sym("y")};
  a.new_vars = {"y"};
  a.eliminated = {"S"};
  a.scale = Expr(2);
  a.constants = {kKappa2};
  return a;
}

ReductionAnsatz ansatz_a1(const Expr& kappa1, const Expr& kappa2) {
  ReductionAnsatz a;
  a.label = "A_I";
  a.factor = pow(sym("S"), kappa2) * exp(kappa1 * sym("t"));
  a.unknown = "w";
  a.invariants = {sym("y")};
  a.new_vars = {"y"};
  a.eliminated = {"t", "S"};
  a.scale = Expr(2);
  a.constants = {kKappa1, kKappa2};
  return a;
}

ReductionAnsatz ansatz_y12(const Expr& c, const Expr& kappa3) {
  ReductionAnsatz a;
  a.label = "Y12";
  a.factor = exp(kappa3 * sym("t"));
  a.unknown = "v";
  a.invariants = {sym("S") * exp(-c * sym("t")), sym("y")};
  a.new_vars = {"z", "y"};
  a.inverse = {SubstitutionRule::symbol("S", sym("z") * exp(c * sym("t")))};
  a.eliminated = {"t", "S"};
  a.scale = Expr(2);
  a.constants = {"c", kKappa3};
  return a;
}

ReductionAnsatz ansatz_z_after_y12(const Expr& kappa4) {
  ReductionAnsatz a;
  a.label = "z-scaling after Y12";
  a.factor = pow(sym("z"), kappa4);
  a.unknown = "w";
  a.invariants = {sym("y")};
  a.new_vars = {"y"};
  a.eliminated = {"z"};
  a.constants = {kKappa4};
  return a;
}

namespace {

struct ConstVolSymbols {
  Expr r, mu, alpha, m, beta, rho, f0;
  explicit ConstVolSymbols(const ModelParams& p) {
    const char* who = "constant volatility ansatz";
    r = p.require("r", who);
    mu = p.require("mu", who);
    alpha = p.require("alpha", who);
    m = p.require("m", who);
    beta = p.require("beta", who);
    rho = p.require("rho", who);
    f0 = p.require("f0", who);
  }
};

ReductionAnsatz phi_ansatz(std::string label, Expr factor, std::vector<std::string> constants) {
  ReductionAnsatz a;
  a.label = std::move(label);
  a.factor = std::move(factor);
  a.unknown = "phi";
  a.invariants = {sym("t")};
  a.new_vars = {"t"};
  a.eliminated = {"S", "y"};
  a.constants = std::move(constants);
  return a;
}

// Exponent of the joint invariant of Xbar4 and Xbar5 (both in their verified
// form): u = phi(t) exp(Phi).
Expr c2_exponent(const ConstVolSymbols& s) {
  Expr t = sym("t"), y = sym("y"), x = ln(sym("S"));
  Expr two(2);
  Expr A = two * pow(s.f0, two) * s.beta * s.rho;
  Expr B = pow(s.beta, two) * s.f0;
  Expr C = two * s.alpha * s.f0 * (y - s.m) + two * s.beta * s.rho * (s.mu - s.r);
  Expr intC = s.alpha * s.f0 * pow(y, two) + (two * s.beta * s.rho * (s.mu - s.r) - two * s.alpha * s.f0 * s.m) * y;
  Expr D = two * pow(s.beta, two) * pow(s.f0, Expr(3)) / s.alpha * (s.alpha * t - two * pow(s.rho, two));
  Expr g = pow(s.f0, two) - two * s.r;
  Expr num = B * g * t * x + B * pow(x, two) - two * s.rho * s.beta * s.f0 / s.alpha * C * x +
             two * pow(s.f0, two) * t * intC - A * g * t * y;
  return num / D;
}

}  // namespace

ReductionAnsatz ansatz_b1(const ModelParams& p, const Expr& kappa, const Expr& kappa2) {
  ConstVolSymbols s(p);
  Expr factor = pow(sym("S"), kappa2) * exp(kappa * exp(s.alpha * sym("t")) * sym("y"));
  return phi_ansatz("B_I", factor, {kKappa, kKappa2});
}

ReductionAnsatz ansatz_b2(const ModelParams& p, const Expr& kappa, const Expr& kappa2) {
  ConstVolSymbols s(p);
  Expr two(2), t = sym("t"), y = sym("y");
  Expr lin = two * s.beta * s.rho * (s.mu - s.r) - two * s.alpha * s.f0 * s.m + kappa * exp(-s.alpha * t) -
             two * pow(s.f0, two) * s.beta * s.rho * kappa2;
  Expr g = (s.alpha * s.f0 * pow(y, two) + lin * y) / (pow(s.beta, two) * s.f0);
  return phi_ansatz("B_II", pow(sym("S"), kappa2) * exp(g), {kKappa, kKappa2});
}

ReductionAnsatz ansatz_c1(const ModelParams& p, const Expr& kappa) {
  ConstVolSymbols s(p);
  Expr two(2), t = sym("t"), S = sym("S");
  Expr psi = Expr(Rational(1, 2)) - s.r / pow(s.f0, two) - s.rho * s.beta * kappa * exp(s.alpha * t) / (s.alpha * s.f0 * t);
  Expr factor = exp(kappa * exp(s.alpha * t) * sym("y")) * pow(S, psi) * exp(pow(ln(S), two) / (two * pow(s.f0, two) * t));
  return phi_ansatz("C_I", factor, {kKappa});
}

ReductionAnsatz ansatz_c2(const ModelParams& p) { return phi_ansatz("C_II", exp(c2_exponent(ConstVolSymbols(p))), {}); }

std::vector<std::string> ansatz_names() { return {"y1", "a1", "y12", "b1", "b2", "c1", "c2"}; }

ReductionAnsatz ansatz_by_name(const std::string& name, const PDEModel& model, const std::map<std::string, Expr>& k) {
  auto get = [&](const char* n) {
    auto it = k.find(n);
    return it == k.end() ? Expr::symbol(n) : it->second;
  };
  if (name == "y1") return ansatz_y1(get(kKappa1));
  if (name == "a1" || name == "heston-a1" || name == "stein-a1") return ansatz_a1(get(kKappa1), get(kKappa2));
  if (name == "y12") return ansatz_y12(get("c"), get(kKappa3));
  bool const_vol = model.id == ModelId::StochVolConst;
  if ((name == "b1" || name == "b2" || name == "c1" || name == "c2") && !const_vol)
    throw ReductionError("ansatz " + name + " needs the constant volatility model");
  if (name == "b1") return ansatz_b1(model.params, get(kKappa), get(kKappa2));
  if (name == "b2") return ansatz_b2(model.params, get(kKappa), get(kKappa2));
  if (name == "c1") return ansatz_c1(model.params, get(kKappa));
  if (name == "c2") return ansatz_c2(model.params);
  throw ReductionError("unknown ansatz " + name);
}

ReducedEquation reduce_Y12(const PDEModel& model, const Expr& c, const Expr& kappa3) {
  if (model.id != ModelId::StochVolGeneric && model.id != ModelId::StochVolConst)
    throw ReductionError("Y12 reduction needs the stochastic volatility family");
  return reduce(model, ansatz_y12(c, kappa3));
}

LinearODE2 stein_reduce(const ModelParams& p, const Expr& kappa1, const Expr& kappa2) {
  auto model = build_model(ModelId::SteinStein, p);
  auto ode = to_ode2(reduce(model, ansatz_a1(kappa1, kappa2)));
  ode.params = params_map(model.params);
  return ode;
}

LinearODE2 heston_reduce(const ModelParams& p, const Expr& kappa1, const Expr& kappa2) {
  auto model = build_model(ModelId::HestonTransformed, p);
  auto ode = to_ode2(reduce(model, ansatz_a1(kappa1, kappa2)));
  ode.params = params_map(model.params);
  return ode;
}

// Printed ODEs ------------------------------------------------------------------

namespace {

LinearODE2 printed(const char* a, const char* b, const char* c) {
  LinearODE2 ode;
  ode.a = parse(a);
  ode.b = parse(b);
  ode.c = parse(c);
  return ode;
}

}  // namespace

LinearODE2 printed_generic_ode() {
  return printed("beta^2", "2*alpha*(m-y) + 2*beta/f(y)*(rho*kappa2*f(y)^2 - mu + r)",
                 "(kappa2^2-1)*f(y)^2 + 2*(r*kappa2 - r + kappa1)");
}

LinearODE2 printed_heston_ode() {
  return printed("beta^2", "2*kappa2*beta*rho + c1*y + c2/y", "2*kappa1 - 2*r*(1-kappa2) + y^2*(kappa2^2 - kappa1^2)");
}

LinearODE2 printed_stein_ode() {
  return printed("beta^2", "2*(alpha*m - beta*gamma0) - 2*alpha*y",
                 "2*r*(kappa2-1) + 2*kappa1 + y^2*(kappa2^2 - kappa1^2)");
}

DiffReport ode_diffs(const std::string& where, const LinearODE2& p, const LinearODE2& d) {
  DiffReport out;
  const std::string w = "w";
  auto check = [&](const char* which, const Expr& x, const Expr& y) {
    if (is_zero(x - y)) return;
    out.entries.push_back(
        DiffEntry{where + ", coefficient of " + which, to_string(x), to_string(y), "printed differs from derived", true});
  };
  check("w''", p.a, d.a);
  check("w'", p.b, d.b);
  check("w", p.c, d.c);
  return out;
}

// Integration -------------------------------------------------------------------

namespace {

std::optional<Expr> integrate_term(const Term& term, const std::string& var) {
  const Expr x = Expr::symbol(var);
  Expr rest(term.coeff);
  std::optional<Rational> n;  // power of var
  const Kernel* group = nullptr;
  Expr group_exp;
  for (const auto& f : term.mono.factors) {
    const Kernel& k = *f.base;
    if (k.kind == KernelKind::Symbol && k.name == var) {
      n = f.exponent.number();
      if (!n) return std::nullopt;
      continue;
    }
    Expr base = kernel_expr(f.base);
    if (!depends_on(base, var) && !depends_on(f.exponent, var)) {
      rest *= pow(base, f.exponent);
      continue;
    }
    if (k.kind != KernelKind::Group || group || !f.exponent.number() || depends_on(f.exponent, var)) return std::nullopt;
    group = &k;
    group_exp = f.exponent;
  }
  Expr rate;
  if (!term.mono.exp_arg.is_zero()) {
    rate = diff(term.mono.exp_arg, var);
    if (depends_on(rate, var)) return std::nullopt;
    Expr g0 = term.mono.exp_arg - rate * x;
    rest *= exp(g0);
  }
  Rational pw = n.value_or(Rational(0));

  if (!group && rate.is_zero()) {
    if (pw == Rational(-1)) return rest * ln(x);
    return rest * pow(x, Expr(Rational(pw + 1))) / Expr(Rational(pw + 1));
  }
  if (pw < Rational(0) || pw.get_den() != 1) return std::nullopt;
  const long deg = pw.get_num().get_si();

  if (!group) {
    // int x^n e^{kx} = x^n e^{kx}/k - n/k int x^{n-1} e^{kx}
    Expr acc, sign(1), fac(1);
    for (long j = deg; j >= 0; --j) {
      acc += sign * fac * pow(x, Expr(j)) / pow(rate, Expr(deg - j + 1));
      sign = -sign;
      fac *= Expr(j);
    }
    return rest * acc * exp(rate * x);
  }
  if (!rate.is_zero()) return std::nullopt;
  // The sum kernel must be linear in var, or a constant times the square of
  // a linear polynomial (how squared denominators are normalized).
  Expr G = group->args[0];
  Rational p = *group_exp.number();
  if (p.get_den() != 1) return std::nullopt;
  Expr g2 = diff(G, var, 2) / Expr(2);
  if (depends_on(g2, var)) return std::nullopt;
  if (!g2.is_zero()) {
    Expr g1 = diff(G, var) - Expr(2) * g2 * x;
    Expr g0 = G - g2 * pow(x, Expr(2)) - g1 * x;
    if (!is_zero(g1 * g1 - Expr(4) * g2 * g0)) return std::nullopt;
    rest *= pow(g2, Expr(p));
    G = x + g1 / (Expr(2) * g2);
    p = p * 2;
  }
  const Expr a = diff(G, var);
  if (depends_on(a, var) || a.is_zero()) return std::nullopt;
  const Expr b = G - a * x;
  // x^n = ((G - b)/a)^n expanded in powers of G; logarithms as ln(G^2)/2 so
  // they stay real whatever the sign of G.
  Expr acc;
  Rational binom(1);
  for (long j = 0; j <= deg; ++j) {
    if (j > 0) binom = binom * Rational(deg - j + 1) / Rational(j);
    Rational q = p + j;
    Expr piece = q == Rational(-1) ? ln(pow(G, Expr(2))) / (Expr(2) * a) : pow(G, Expr(Rational(q + 1))) / (Expr(Rational(q + 1)) * a);
    acc += Expr(binom) * pow(-b, Expr(deg - j)) * piece;
  }
  return rest * acc / pow(a, Expr(deg));
}

}  // namespace

std::optional<Expr> integrate(const Expr& e, const std::string& var) {
  std::vector<Expr> parts;
  for (const auto& t : e.terms()) {
    auto r = integrate_term(t, var);
    if (!r) return std::nullopt;
    parts.push_back(*r);
  }
  Expr out = sum(parts);
  if (!is_zero(diff(out, var) - e)) return std::nullopt;
  return out;
}

}  // namespace liesym
