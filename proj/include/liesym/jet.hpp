#pragma once

// Jet-space calculus for scalar second-order evolution equations: total
// derivatives, second prolongation, the symmetry condition modulo the
// equation, Lie brackets and the determining system.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "liesym/expr.hpp"

namespace liesym {

// Independent variables x_0..x_{n-1} (x_0 is time), dependent variable u and
// the jet symbols u_<x> and u_<x_i><x_j> (i <= j in variable order).
class JetSpace {
 public:
  JetSpace() = default;
  JetSpace(std::vector<std::string> independent, std::string dependent = "u");

  static JetSpace standard();  // (t, S, y; u)

  const std::vector<std::string>& independent() const { return independent_; }
  const std::string& dependent() const { return dependent_; }
  std::size_t dimension() const { return independent_.size(); }
  std::size_t index(std::string_view var) const;  // throws for unknown names
  bool has(std::string_view var) const;

  std::string first(std::size_t i) const;
  std::string second(std::size_t i, std::size_t j) const;  // symmetric in i, j
  Expr var(std::size_t i) const { return Expr::symbol(independent_[i]); }
  Expr u() const { return Expr::symbol(dependent_); }
  Expr jet(std::size_t i) const { return Expr::symbol(first(i)); }
  Expr jet(std::size_t i, std::size_t j) const { return Expr::symbol(second(i, j)); }

  std::vector<std::string> first_jets() const;
  std::vector<std::string> second_jets() const;
  // u and every jet symbol.
  std::vector<std::string> fiber() const;

  bool operator==(const JetSpace&) const = default;

 private:
  std::vector<std::string> independent_;
  std::string dependent_ = "u";
};

struct VectorField {
  JetSpace space;
  std::vector<Expr> xi;  // one per independent variable
  Expr eta;

  VectorField() = default;
  explicit VectorField(JetSpace js) : space(std::move(js)), xi(space.dimension()), eta() {}

  Expr& component(std::string_view var) { return xi[space.index(var)]; }
  const Expr& component(std::string_view var) const { return xi[space.index(var)]; }
  VectorField& set(std::string_view var, Expr value);

  // Coefficients as a flat list (xi..., eta).
  std::vector<Expr> components() const;
  bool is_zero() const;  // canonical zero test on every component
  // The field as a derivation acting on a function of (x, u).
  Expr apply(const Expr& g) const;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(const Expr& c, const VectorField& v);

// Common generators.
VectorField translation(const JetSpace& js, std::string_view var);  // d_var
VectorField scaling_u(const JetSpace& js);                           // u d_u
VectorField solution_field(const JetSpace& js, Expr s);              // s d_u

std::string to_string(const VectorField& v);
nlohmann::json to_json(const VectorField& v);
VectorField vector_field_from_json(const nlohmann::json& j);

struct ProlongedField {
  VectorField base;
  std::vector<Expr> eta_i;                                // per independent variable
  std::map<std::pair<std::size_t, std::size_t>, Expr> eta_ij;  // keys with i <= j

  const Expr& second(std::size_t i, std::size_t j) const;
};

// Evolution equation H = 0 over a jet space; time is the first independent
// variable and H is solved for u_t during the symmetry test.
struct Pde {
  std::string label;
  JetSpace space;
  Expr equation;

  // Hints for the determining-system solver.
  std::optional<Expr> rate;            // adds e^{+-rate t}, e^{+-2 rate t} to the time profiles
  std::vector<std::string> log_vars;   // variables entering through ln(var)
};

Expr total_derivative(const Expr& e, std::string_view var, const JetSpace& js);
ProlongedField prolong2(const VectorField& v);

// X^(2) applied to an expression of jet order <= 2.
Expr apply_prolonged(const ProlongedField& p, const Expr& h);

// Solved form: returns R with H ~ u_t + R after dividing by the u_t
// coefficient. Throws std::invalid_argument when that is impossible.
Expr solved_rest(const Pde& pde);

struct SymmetryReport {
  bool passed = false;
  std::string field;
  std::string pde;
  // Jet monomial -> coefficient, for every coefficient that is not zero.
  std::map<std::string, Expr> residual;
  std::size_t coefficients = 0;
  std::optional<Expr> multiplier;  // psi with X^(2)H = psi H, when that holds
  bool numeric_warning = false;
};

SymmetryReport check_symmetry(const VectorField& v, const Pde& pde);
nlohmann::json to_json(const SymmetryReport& r);

VectorField lie_bracket(const VectorField& a, const VectorField& b);

struct Decomposition {
  std::vector<Expr> coeffs;
  VectorField residual;
  bool exact = false;  // residual is zero
};

// v = sum c_k basis_k + residual with c_k free of the space variables.
Decomposition decompose_in_basis(const VectorField& v, const std::vector<VectorField>& basis);

// Determining system ----------------------------------------------------------

struct UnknownFunction {
  std::string name;
  std::vector<std::string> args;
};

struct DeterminingSystem {
  Pde source;
  std::vector<UnknownFunction> unknowns;  // xi_<x>..., phi, b
  std::vector<Expr> equations;            // each = 0
  VectorField general;                    // xi = xi_<x>(x), eta = phi(x) u + b(x)
};

DeterminingSystem determining_system(const Pde& pde);

struct SolveOptions {
  int degree = 2;           // polynomial degree in each spatial variable (or its log)
  int time_degree = 2;      // polynomial degree in t
  bool verify = true;       // re-check every basis field against the equation
};

struct DeterminingSolution {
  std::vector<VectorField> basis;  // finite part, b-freedom excluded
  std::vector<std::string> diagnostics;
  std::size_t ansatz_unknowns = 0;
  std::size_t linear_rows = 0;
  bool complete() const { return diagnostics.empty(); }
};

DeterminingSolution solve_determining(const DeterminingSystem& sys, const SolveOptions& opts = {});

}  // namespace liesym
