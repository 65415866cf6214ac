#pragma once

// Symmetry reductions by substitution of invariant templates, the reduced
// linear ODEs, and the closed-form invariant solutions of the constant
// volatility model.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "liesym/catalog.hpp"
#include "liesym/jet.hpp"
#include "liesym/models.hpp"

namespace liesym {

class ReductionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// u(old vars) = tmpl, where tmpl = factor * unknown(invariants). After the
// substitution the unknown's arguments are renamed to `new_vars`, `inverse`
// rewrites leftover old variables, and every variable in `eliminated` must
// have dropped out.
struct ReductionAnsatz {
  std::string label;
  Expr factor;
  std::string unknown;
  std::vector<Expr> invariants;
  std::vector<std::string> new_vars;
  std::vector<SubstitutionRule> inverse;
  std::vector<std::string> eliminated;
  Expr scale = Expr(1);  // multiplies the reduced equation
  std::vector<std::string> constants;

  Expr tmpl() const;
};

struct ReducedEquation {
  std::string label;
  JetSpace space;  // new variables, unknown as the dependent variable
  Expr equation;
};

ReducedEquation reduce(const Pde& pde, const ReductionAnsatz& ansatz);
inline ReducedEquation reduce(const PDEModel& model, const ReductionAnsatz& ansatz) {
  return reduce(model.pde, ansatz);
}

// a w'' + b w' + c w = 0 in `var`.
struct LinearODE2 {
  std::string var = "y";
  Expr a, b, c;
  std::map<std::string, Expr> params;

  LinearODE2 scaled(const Expr& k) const;
};

// p phi' + q phi = 0 in `var`.
struct LinearODE1 {
  std::string var = "t";
  Expr p, q;
};

LinearODE2 to_ode2(const ReducedEquation& r);
LinearODE1 to_ode1(const ReducedEquation& r);
nlohmann::json to_json(const LinearODE2& ode);
LinearODE2 linear_ode2_from_json(const nlohmann::json& j);
bool equivalent(const LinearODE2& a, const LinearODE2& b);  // coefficientwise

// Templates ---------------------------------------------------------------------

// Symbols used for the reduction constants.
inline const char* const kKappa = "kappa";
inline const char* const kKappa1 = "kappa1";
inline const char* const kKappa2 = "kappa2";
inline const char* const kKappa3 = "kappa3";
inline const char* const kKappa4 = "kappa4";

ReductionAnsatz ansatz_y1(const Expr& kappa1);                                    // u = e^{k1 t} v(S,y)
ReductionAnsatz ansatz_y2_after_y1(const Expr& kappa2);                           // v = S^{k2} w(y)
ReductionAnsatz ansatz_a1(const Expr& kappa1, const Expr& kappa2);                // u = S^{k2} e^{k1 t} w(y)
ReductionAnsatz ansatz_y12(const Expr& c, const Expr& kappa3);                    // u = e^{k3 t} v(z,y), z = S e^{-ct}
ReductionAnsatz ansatz_z_after_y12(const Expr& kappa4);                           // v = z^{k4} w(y)
// Constant volatility subalgebras; the unknown is phi(t). The parameters
// must be those of the model the ansatz is applied to.
ReductionAnsatz ansatz_b1(const ModelParams& p, const Expr& kappa, const Expr& kappa2);
ReductionAnsatz ansatz_b2(const ModelParams& p, const Expr& kappa, const Expr& kappa2);
ReductionAnsatz ansatz_c1(const ModelParams& p, const Expr& kappa);
ReductionAnsatz ansatz_c2(const ModelParams& p);

// Named reduction used by the CLI: y1, a1 (alias heston-a1, stein-a1), y12,
// b1, b2, c1, c2.
ReductionAnsatz ansatz_by_name(const std::string& name, const PDEModel& model, const std::map<std::string, Expr>& k);
std::vector<std::string> ansatz_names();

ReducedEquation reduce_Y12(const PDEModel& model, const Expr& c, const Expr& kappa3);
LinearODE2 stein_reduce(const ModelParams& p, const Expr& kappa1, const Expr& kappa2);
LinearODE2 heston_reduce(const ModelParams& p, const Expr& kappa1, const Expr& kappa2);

// Printed forms of the reduced ODEs, in the leading-coefficient-beta^2
// normalization, with f(y) opaque for the generic family.
LinearODE2 printed_generic_ode();
LinearODE2 printed_heston_ode();
LinearODE2 printed_stein_ode();
// Compares coefficientwise and reports each mismatching coefficient.
DiffReport ode_diffs(const std::string& where, const LinearODE2& printed, const LinearODE2& derived);

// Symbolic antiderivative in `var` for sums of c t^n, c t^n e^{k t} (n >= 0)
// and powers of linear sum kernels; nullopt when a term is outside that class.
std::optional<Expr> integrate(const Expr& e, const std::string& var);

// Closed forms -------------------------------------------------------------------

struct ClosedFormSolution {
  std::string label;  // A_I, B_I, B_II, C_I, C_II
  bool printed = false;
  // u(t, S, y). Derived forms whose phi could not be integrated symbolically
  // contain the kernel phi(t), to be bound numerically from `phi_ode`.
  Expr value;
  std::optional<LinearODE1> phi_ode;
  std::optional<Expr> log_phi;  // ln(phi/phi0)
  std::map<std::string, Expr> components;
  std::vector<std::string> constants;
};

std::vector<std::string> closed_form_labels();
// Symbolic in the model parameters r, mu, alpha, m, beta, rho, f0 and the
// constants kappa, kappa1, kappa2, phi0, w1, w2. Kummer functions appear as
// the kernels M(a, b, z) and U(a, b, z).
ClosedFormSolution closed_form(const std::string& label, bool printed);

}  // namespace liesym
