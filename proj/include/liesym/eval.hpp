#pragma once

#include <functional>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "liesym/expr.hpp"

namespace liesym {

// Numeric implementation of a named function: receives the evaluated
// arguments and the derivative orders of the kernel being evaluated.
template <class T>
using NumericFunction = std::function<T(std::span<const T> args, std::span<const int> orders)>;

template <class T>
using FunctionTable = std::map<std::string, NumericFunction<T>>;

// Deterministic smooth stand-in for an unbound function kernel. Different
// heads or derivative orders give unrelated functions, matching the
// independence assumption of the normal form.
double opaque_surrogate(const Kernel& k, std::span<const double> args);

// Expression compiled to a small stack program. Symbols listed in `vars` are
// read from the call argument in that order; `constants` binds the rest.
template <class T>
class CompiledExpr {
 public:
  CompiledExpr() = default;
  CompiledExpr(const Expr& e, const std::vector<std::string>& vars, const std::map<std::string, T>& constants = {},
               const FunctionTable<T>& functions = {}, bool opaque_surrogates = false);

  T operator()(std::span<const T> x) const;
  T operator()(std::initializer_list<T> x) const { return (*this)(std::span<const T>(x.begin(), x.size())); }

  enum class Op : unsigned char { Const, Var, Add, Mul, PowInt, Pow, Exp, Log, Call, Opaque };
  struct Instr {
    Op op;
    int a = 0;
    int b = 0;
  };

 private:
  std::vector<Instr> code_;
  std::vector<T> consts_;
  std::vector<NumericFunction<T>> calls_;
  std::vector<std::vector<int>> call_orders_;
  std::vector<KernelPtr> opaque_;
  int max_depth_ = 0;
};

extern template class CompiledExpr<double>;
extern template class CompiledExpr<long double>;

// One-shot evaluation; unbound functions use the surrogate.
double evaluate(const Expr& e, const std::map<std::string, double>& values);

long double to_long_double(const Rational& q);

// Zero testing -----------------------------------------------------------------

inline constexpr std::uint64_t kZeroProbeSeed = 0x5EED2024ull;
inline constexpr int kZeroProbePoints = 8;

struct ZeroTest {
  bool zero = false;
  // Set when every probe point evaluates to (numerical) zero although the
  // canonical form is not zero.
  bool numeric_warning = false;
};

// Canonical test after clearing sum denominators, guarded by a numeric probe
// at kZeroProbePoints pseudo-random points with symbols drawn in [0.5, 1.5].
ZeroTest zero_test(const Expr& e);
bool is_zero(const Expr& e);

}  // namespace liesym
