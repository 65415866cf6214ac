#include <algorithm>
#include <stdexcept>
#include <string>

#include "liesym/eval.hpp"
#include "liesym/jet.hpp"
#include "liesym/linear_system.hpp"

namespace liesym {

namespace {

constexpr std::string_view kCoeffPrefix = "_c";

std::vector<Expr> var_args(const JetSpace& js) {
  std::vector<Expr> args;
  for (std::size_t i = 0; i < js.dimension(); ++i) args.push_back(js.var(i));
  return args;
}

std::vector<std::string> fiber_without_ut(const JetSpace& js) {
  std::vector<std::string> out;
  for (auto& s : js.fiber())
    if (s != js.first(0)) out.push_back(std::move(s));
  return out;
}

// Product basis over per-variable profiles: powers of t (plus exponentials
// in rate*t) and powers of x or ln(x) for the spatial variables.
std::vector<Expr> profile_basis(const Pde& pde, const SolveOptions& opts) {
  const JetSpace& js = pde.space;
  std::vector<Expr> basis;
  {
    Expr t = js.var(0);
    for (int k = 0; k <= opts.time_degree; ++k) basis.push_back(pow(t, Expr(k)));
    if (pde.rate) {
      for (int k : {1, -1, 2, -2}) basis.push_back(exp(Expr(k) * *pde.rate * t));
    }
  }
  for (std::size_t i = 1; i < js.dimension(); ++i) {
    const auto& name = js.independent()[i];
    bool log = std::find(pde.log_vars.begin(), pde.log_vars.end(), name) != pde.log_vars.end();
    Expr base = log ? ln(js.var(i)) : js.var(i);
    std::vector<Expr> next;
    for (const auto& b : basis)
      for (int k = 0; k <= opts.degree; ++k) next.push_back(b * pow(base, Expr(k)));
    basis = std::move(next);
  }
  return basis;
}

std::optional<std::size_t> coeff_index(const Kernel& k) {
  if (k.kind != KernelKind::Symbol || !k.name.starts_with(kCoeffPrefix)) return std::nullopt;
  return std::stoul(k.name.substr(kCoeffPrefix.size()));
}

}  // namespace

DeterminingSystem determining_system(const Pde& pde) {
  const JetSpace& js = pde.space;
  DeterminingSystem sys;
  sys.source = pde;
  const auto args = var_args(js);
  VectorField g(js);
  for (std::size_t i = 0; i < js.dimension(); ++i) {
    std::string name = "xi_" + js.independent()[i];
    sys.unknowns.push_back({name, js.independent()});
    g.xi[i] = Expr::function(name, args);
  }
  sys.unknowns.push_back({"phi", js.independent()});
  sys.unknowns.push_back({"b", js.independent()});
  g.eta = Expr::function("phi", args) * js.u() + Expr::function("b", args);
  sys.general = g;

  Expr rest = solved_rest(pde);
  Expr x2h = apply_prolonged(prolong2(g), js.jet(0) + rest);
  Expr reduced = substitute(x2h, js.first(0), -rest);
  for (auto& [key, coeff] : collect(reduced, fiber_without_ut(js)))
    if (!coeff.is_zero()) sys.equations.push_back(coeff);
  return sys;
}

DeterminingSolution solve_determining(const DeterminingSystem& sys, const SolveOptions& opts) {
  const Pde& pde = sys.source;
  const JetSpace& js = pde.space;
  const std::size_t n = js.dimension();
  const auto profiles = profile_basis(pde, opts);
  const std::size_t per = profiles.size();

  // Unknown j in 0..n-1 is xi_<x_j>, unknown n is phi; b is dropped since it
  // only carries the solution freedom.
  auto is_log = [&](std::size_t i) {
    return std::find(pde.log_vars.begin(), pde.log_vars.end(), js.independent()[i]) != pde.log_vars.end();
  };
  auto body = [&](std::size_t unknown, const std::vector<Expr>& coeffs) {
    std::vector<Expr> parts;
    for (std::size_t k = 0; k < per; ++k)
      if (!coeffs[unknown * per + k].is_zero()) parts.push_back(coeffs[unknown * per + k] * profiles[k]);
    Expr e = sum(parts);
    if (unknown < n && is_log(unknown)) e = e * js.var(unknown);
    return e;
  };

  const std::size_t columns = (n + 1) * per;
  std::vector<Expr> symbols;
  for (std::size_t c = 0; c < columns; ++c) symbols.push_back(Expr::symbol(std::string(kCoeffPrefix) + std::to_string(c)));

  std::vector<SubstitutionRule> rules;
  for (std::size_t u = 0; u <= n; ++u) {
    std::string head = u < n ? "xi_" + js.independent()[u] : "phi";
    rules.push_back(SubstitutionRule::function(head, js.independent(), body(u, symbols)));
  }
  rules.push_back(SubstitutionRule::function("b", js.independent(), Expr()));

  DeterminingSolution out;
  out.ansatz_unknowns = columns;
  LinearSystem lin(columns);
  for (const auto& eq : sys.equations) {
    Expr e = substitute(eq, rules);
    for (auto& [key, coeff] : collect(e, js.independent())) {
      std::map<std::size_t, std::vector<Expr>> row;
      for (const auto& t : coeff.terms()) {
        std::optional<std::size_t> col;
        Term rest{t.coeff, Monomial{{}, t.mono.exp_arg}};
        for (const auto& f : t.mono.factors) {
          auto idx = coeff_index(*f.base);
          if (idx && f.exponent.is_one() && !col)
            col = idx;
          else
            rest.mono.factors.push_back(f);
        }
        if (!col) {
          out.diagnostics.push_back("term outside the ansatz span: " + to_string(term_expr(t)));
          continue;
        }
        row[*col].push_back(term_expr(rest));
      }
      std::map<std::size_t, Expr> r;
      for (auto& [c, parts] : row) r.emplace(c, sum(parts));
      lin.add_row(std::move(r));
    }
  }
  out.linear_rows = lin.rows();

  auto ns = lin.nullspace();
  for (const auto& vec : ns.vectors) {
    auto clean = clear_vector_denominators(vec);
    VectorField v(js);
    for (std::size_t i = 0; i < n; ++i) v.xi[i] = body(i, clean);
    v.eta = body(n, clean) * js.u();
    out.basis.push_back(std::move(v));
  }
  if (opts.verify) {
    for (const auto& v : out.basis) {
      auto rep = check_symmetry(v, pde);
      if (!rep.passed) out.diagnostics.push_back("basis field fails the symmetry condition: " + to_string(v));
    }
  }
  return out;
}

}  // namespace liesym
