#pragma once

// Canonical symbolic expressions.
//
// Every Expr is a sum of terms c * B1^e1 * ... * Bk^ek * exp(g) with an exact
// rational c, kernels B (symbols, function applications, logarithms, numbers
// and non-expandable sums) and Expr exponents. Construction always yields the
// canonical form, so structural equality is semantic equality modulo the
// independence of the transcendental kernels.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "liesym/rational.hpp"

namespace liesym {

struct Kernel;
struct PolyNode;
struct Term;

class Expr {
 public:
  Expr();
  Expr(int value);              // NOLINT(google-explicit-constructor)
  Expr(long value);             // NOLINT(google-explicit-constructor)
  Expr(const Rational& value);  // NOLINT(google-explicit-constructor)

  static Expr symbol(std::string_view name);
  // Application of a named function. `orders[k]` is the number of partial
  // derivatives taken in argument k (empty means the function itself).
  static Expr function(std::string_view head, std::vector<Expr> args, std::vector<int> orders = {});

  const std::vector<Term>& terms() const;
  bool is_zero() const;  // literal zero
  bool is_one() const;
  bool is_number() const;
  std::optional<Rational> number() const;
  std::optional<std::string> symbol_name() const;
  std::size_t hash() const;
  std::uint64_t mask() const;
  bool has_group() const;

  const PolyNode* node() const { return node_.get(); }
  explicit Expr(std::shared_ptr<const PolyNode> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<const PolyNode> node_;
};

enum class KernelKind : std::uint8_t { Number, Symbol, Function, Log, Group };

struct Kernel {
  KernelKind kind;
  std::string name;           // Symbol name or Function head
  Rational value;             // Number
  std::vector<Expr> args;     // Function arguments; Log/Group keep their argument in args[0]
  std::vector<int> orders;    // Function derivative orders, same length as args
  std::size_t hash = 0;
  std::uint64_t mask = 0;
};
using KernelPtr = std::shared_ptr<const Kernel>;

struct Factor {
  KernelPtr base;
  Expr exponent;
};

struct Monomial {
  std::vector<Factor> factors;  // sorted by base, no repeated base, no zero exponent
  Expr exp_arg;                 // zero when there is no exp factor
  bool empty() const { return factors.empty() && exp_arg.is_zero(); }
};

struct Term {
  Rational coeff;
  Monomial mono;
};

struct PolyNode {
  std::vector<Term> terms;
  std::size_t hash = 0;
  std::uint64_t mask = 0;
  bool has_group = false;
};

// Bit used by `mask()` for a symbol name or function head.
std::uint64_t symbol_bit(std::string_view name);
std::uint64_t function_bit(std::string_view head);

int compare(const Kernel& a, const Kernel& b);
int compare(const Monomial& a, const Monomial& b);
int compare(const Expr& a, const Expr& b);
bool operator==(const Expr& a, const Expr& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
inline bool operator<(const Expr& a, const Expr& b) { return compare(a, b) < 0; }

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr& operator+=(Expr& a, const Expr& b);
Expr& operator-=(Expr& a, const Expr& b);
Expr& operator*=(Expr& a, const Expr& b);

Expr pow(const Expr& base, const Expr& exponent);
Expr exp(const Expr& arg);
Expr ln(const Expr& arg);
Expr sqrt(const Expr& arg);

// Sum of many expressions in one normalization pass.
Expr sum(const std::vector<Expr>& items);

// Rebuilds from scratch; canonical inputs are returned unchanged.
Expr simplify(const Expr& e);

Expr diff(const Expr& e, std::string_view var);
Expr diff(const Expr& e, std::string_view var, int order);

bool depends_on(const Expr& e, std::string_view var);
bool contains_function(const Expr& e, std::string_view head);
std::set<std::string> free_symbols(const Expr& e);

// Kernel and term plumbing.
Expr kernel_expr(const KernelPtr& k);
Expr term_expr(const Term& t);
Expr monomial_expr(const Monomial& m);

// Numerator/denominator split of the sum kernels: e = num * den^-1 where den
// collects every Group kernel with a negative exponent. Laurent factors of
// ordinary kernels are left in `num`.
struct Fraction {
  Expr num;
  Expr den;
};
Fraction clear_denominators(const Expr& e);

std::string to_string(const Expr& e);
std::ostream& operator<<(std::ostream& os, const Expr& e);

// Pretty name for a function kernel, including derivative decoration
// (f, fp, fpp; xi_t_{1,0,2} for multi-argument functions).
std::string function_label(const Kernel& k);

// Substitution ----------------------------------------------------------------

struct SubstitutionRule {
  enum class Kind { Symbol, Function, FunctionArgs };
  Kind kind = Kind::Symbol;
  std::string target;                // symbol name or function head
  std::vector<std::string> params;   // formal parameters (Function)
  Expr replacement;                  // Symbol: replacement; Function: body in params
  std::vector<Expr> new_args;        // FunctionArgs: replacement argument list

  static SubstitutionRule symbol(std::string name, Expr value);
  // head(a1..an) -> body[params := a]; derivatives differentiate the body.
  static SubstitutionRule function(std::string head, std::vector<std::string> params, Expr body);
  // Keeps the head and derivative orders, swaps the argument list.
  static SubstitutionRule rename_args(std::string head, std::vector<Expr> new_args);
};

Expr substitute(const Expr& e, const std::vector<SubstitutionRule>& rules);
Expr substitute(const Expr& e, std::string_view symbol, const Expr& value);

// Coefficient extraction -------------------------------------------------------

// Splits every term into (part depending on `vars`) * (rest) and groups by the
// first part. The key 1 holds the var-free part.
std::map<Expr, Expr> collect(const Expr& e, const std::vector<std::string>& vars);

}  // namespace liesym
