#pragma once

#include <vector>

#include "liesym/expr.hpp"

namespace liesym::detail {

inline std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2));
}

// Terms must carry canonical monomials; they are sorted and combined here.
Expr from_terms(std::vector<Term> terms);
// Terms already sorted with distinct monomials and non-zero coefficients.
Expr from_sorted_terms(std::vector<Term> terms);

KernelPtr symbol_kernel(std::string_view name);
KernelPtr function_kernel(std::string_view head, std::vector<Expr> args, std::vector<int> orders);
KernelPtr log_kernel(const Expr& arg);
KernelPtr group_kernel(const Expr& arg);
KernelPtr number_kernel(const Rational& value);

// base^exponent, canonical (expands positive integer powers of sums, folds numbers).
Expr factor_expr(const KernelPtr& base, const Expr& exponent);
Expr numeric_power(const Rational& c, const Expr& exponent);
Expr scale(const Expr& e, const Rational& q);

// p = c * m * g with g monic (leading coefficient 1) and free of common
// monomial factors. Only meaningful for sums with at least two terms.
struct Content {
  Rational c;
  Expr m;
  Expr g;
};
Content decompose_content(const Expr& p);

}  // namespace liesym::detail
