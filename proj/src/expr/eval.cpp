#include "liesym/eval.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>

#include "internal.hpp"

namespace liesym {

long double to_long_double(const Rational& q) {
  if (q.get_num().fits_slong_p() && q.get_den().fits_slong_p())
    return static_cast<long double>(q.get_num().get_si()) / static_cast<long double>(q.get_den().get_si());
  mpf_class f(q, 128);
  mp_exp_t e = 0;
  std::string digits = f.get_str(e, 10, 40);
  if (digits.empty()) return 0.0L;
  bool neg = digits[0] == '-';
  if (neg) digits.erase(0, 1);
  std::string text = (neg ? "-0." : "0.") + digits + "e" + std::to_string(e);
  return std::strtold(text.c_str(), nullptr);
}

double opaque_surrogate(const Kernel& k, std::span<const double> args) {
  std::size_t h = std::hash<std::string>{}(k.name);
  for (int o : k.orders) h = detail::mix(h, static_cast<std::size_t>(o) + 1);
  double w0 = 0.37 + static_cast<double>(h % 997) / 997.0;
  double phase = static_cast<double>((h / 997) % 1009) / 1009.0 * 6.283185307179586;
  double s = phase;
  for (std::size_t i = 0; i < args.size(); ++i) s += (w0 + 0.23 * static_cast<double>(i)) * args[i];
  return 1.0 + 0.35 * std::sin(s) + 0.1 * static_cast<double>((h >> 20) % 7) / 7.0;
}

template <class T>
struct CompilerImpl {
  using C = CompiledExpr<T>;
  using Op = typename C::Op;

  std::vector<typename C::Instr>& code;
  std::vector<T>& consts;
  std::vector<NumericFunction<T>>& calls;
  std::vector<std::vector<int>>& call_orders;
  std::vector<KernelPtr>& opaque;
  const std::vector<std::string>& vars;
  const std::map<std::string, T>& constants;
  const FunctionTable<T>& functions;
  bool surrogates;
  int depth = 0;
  int max_depth = 0;

  void push(Op op, int a = 0, int b = 0, int delta = 1) {
    code.push_back({op, a, b});
    depth += delta;
    max_depth = std::max(max_depth, depth);
  }

  void constant(T v) {
    consts.push_back(v);
    push(Op::Const, static_cast<int>(consts.size() - 1));
  }

  void expr(const Expr& e) {
    const auto& terms = e.terms();
    if (terms.empty()) {
      constant(T(0));
      return;
    }
    for (const auto& t : terms) term(t);
    if (terms.size() > 1) push(Op::Add, static_cast<int>(terms.size()), 0, 1 - static_cast<int>(terms.size()));
  }

  void term(const Term& t) {
    constant(to_long_double(t.coeff));
    int n = 1;
    for (const auto& f : t.mono.factors) {
      factor(f);
      ++n;
    }
    if (!t.mono.exp_arg.is_zero()) {
      expr(t.mono.exp_arg);
      push(Op::Exp, 0, 0, 0);
      ++n;
    }
    if (n > 1) push(Op::Mul, n, 0, 1 - n);
  }

  void factor(const Factor& f) {
    base(*f.base, f.base);
    if (f.exponent.is_one()) return;
    auto q = f.exponent.number();
    if (q && is_integer(*q) && q->get_num().fits_sint_p()) {
      push(Op::PowInt, static_cast<int>(q->get_num().get_si()), 0, 0);
      return;
    }
    expr(f.exponent);
    push(Op::Pow, 0, 0, -1);
  }

  void base(const Kernel& k, const KernelPtr& kp) {
    switch (k.kind) {
      case KernelKind::Number:
        constant(static_cast<T>(to_long_double(k.value)));
        return;
      case KernelKind::Symbol: {
        for (std::size_t i = 0; i < vars.size(); ++i) {
          if (vars[i] == k.name) {
            push(Op::Var, static_cast<int>(i));
            return;
          }
        }
        auto it = constants.find(k.name);
        if (it == constants.end()) throw std::invalid_argument("unbound symbol '" + k.name + "' in numeric evaluation");
        constant(it->second);
        return;
      }
      case KernelKind::Log:
        expr(k.args[0]);
        push(Op::Log, 0, 0, 0);
        return;
      case KernelKind::Group:
        expr(k.args[0]);
        return;
      case KernelKind::Function: {
        for (const auto& a : k.args) expr(a);
        const int n = static_cast<int>(k.args.size());
        auto it = functions.find(k.name);
        if (it != functions.end()) {
          calls.push_back(it->second);
          call_orders.push_back(k.orders);
          push(Op::Call, static_cast<int>(calls.size() - 1), n, 1 - n);
          return;
        }
        if (!surrogates) throw std::invalid_argument("no numeric binding for function '" + k.name + "'");
        opaque.push_back(kp);
        push(Op::Opaque, static_cast<int>(opaque.size() - 1), n, 1 - n);
        return;
      }
    }
  }
};

template <class T>
CompiledExpr<T>::CompiledExpr(const Expr& e, const std::vector<std::string>& vars,
                              const std::map<std::string, T>& constants, const FunctionTable<T>& functions,
                              bool opaque_surrogates) {
  CompilerImpl<T> c{code_, consts_, calls_, call_orders_, opaque_, vars, constants, functions, opaque_surrogates};
  c.expr(e);
  max_depth_ = c.max_depth;
}

template <class T>
T CompiledExpr<T>::operator()(std::span<const T> x) const {
  constexpr int kInline = 64;
  std::array<T, kInline> small{};
  std::vector<T> big;
  T* st = small.data();
  if (max_depth_ > kInline) {
    big.resize(static_cast<std::size_t>(max_depth_));
    st = big.data();
  }
  int sp = 0;
  for (const auto& in : code_) {
    switch (in.op) {
      case Op::Const:
        st[sp++] = consts_[static_cast<std::size_t>(in.a)];
        break;
      case Op::Var:
        st[sp++] = x[static_cast<std::size_t>(in.a)];
        break;
      case Op::Add: {
        T s = st[sp - in.a];
        for (int i = sp - in.a + 1; i < sp; ++i) s += st[i];
        sp -= in.a;
        st[sp++] = s;
        break;
      }
      case Op::Mul: {
        T s = st[sp - in.a];
        for (int i = sp - in.a + 1; i < sp; ++i) s *= st[i];
        sp -= in.a;
        st[sp++] = s;
        break;
      }
      case Op::PowInt: {
        T b = st[sp - 1];
        int n = in.a;
        bool inv = n < 0;
        unsigned m = static_cast<unsigned>(inv ? -n : n);
        T r = 1;
        while (m) {
          if (m & 1u) r *= b;
          b *= b;
          m >>= 1;
        }
        st[sp - 1] = inv ? T(1) / r : r;
        break;
      }
      case Op::Pow: {
        T e = st[--sp];
        st[sp - 1] = std::pow(st[sp - 1], e);
        break;
      }
      case Op::Exp:
        st[sp - 1] = std::exp(st[sp - 1]);
        break;
      case Op::Log:
        st[sp - 1] = std::log(st[sp - 1]);
        break;
      case Op::Call: {
        const int n = in.b;
        T v = calls_[static_cast<std::size_t>(in.a)](std::span<const T>(st + sp - n, static_cast<std::size_t>(n)),
                                                     call_orders_[static_cast<std::size_t>(in.a)]);
        sp -= n;
        st[sp++] = v;
        break;
      }
      case Op::Opaque: {
        const int n = in.b;
        std::vector<double> args(st + sp - n, st + sp);
        T v = static_cast<T>(opaque_surrogate(*opaque_[static_cast<std::size_t>(in.a)], args));
        sp -= n;
        st[sp++] = v;
        break;
      }
    }
  }
  return st[0];
}

template class CompiledExpr<double>;
template class CompiledExpr<long double>;

double evaluate(const Expr& e, const std::map<std::string, double>& values) {
  std::vector<std::string> vars;
  std::vector<double> x;
  for (const auto& [k, v] : values) {
    vars.push_back(k);
    x.push_back(v);
  }
  return CompiledExpr<double>(e, vars, {}, {}, true)(std::span<const double>(x));
}

}  // namespace liesym
