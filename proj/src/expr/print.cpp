#include <sstream>

#include "liesym/expr.hpp"

namespace liesym {

namespace {

void print_expr(std::string& out, const Expr& e);

void print_exponent(std::string& out, const Expr& e) {
  if (e.is_one()) return;
  auto q = e.number();
  if (q && is_integer(*q) && sgn(*q) > 0) {
    out += '^';
    out += to_string(*q);
    return;
  }
  out += "^(";
  print_expr(out, e);
  out += ')';
}

void print_base(std::string& out, const Kernel& k) {
  switch (k.kind) {
    case KernelKind::Number:
      if (is_integer(k.value) && sgn(k.value) > 0) {
        out += to_string(k.value);
      } else {
        out += '(';
        out += to_string(k.value);
        out += ')';
      }
      return;
    case KernelKind::Symbol:
      out += k.name;
      return;
    case KernelKind::Function:
      out += function_label(k);
      out += '(';
      for (std::size_t i = 0; i < k.args.size(); ++i) {
        if (i) out += ',';
        print_expr(out, k.args[i]);
      }
      out += ')';
      return;
    case KernelKind::Log:
      out += "ln(";
      print_expr(out, k.args[0]);
      out += ')';
      return;
    case KernelKind::Group:
      out += '(';
      print_expr(out, k.args[0]);
      out += ')';
      return;
  }
}

void print_term_body(std::string& out, const Rational& c, const Monomial& m) {
  bool first = true;
  if (c != 1 || m.empty()) {
    out += to_string(c);
    first = false;
  }
  for (const auto& f : m.factors) {
    if (!first) out += '*';
    first = false;
    print_base(out, *f.base);
    print_exponent(out, f.exponent);
  }
  if (!m.exp_arg.is_zero()) {
    if (!first) out += '*';
    out += "exp(";
    print_expr(out, m.exp_arg);
    out += ')';
  }
}

void print_expr(std::string& out, const Expr& e) {
  const auto& terms = e.terms();
  if (terms.empty()) {
    out += '0';
    return;
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    bool negative = sgn(t.coeff) < 0;
    if (i == 0) {
      if (negative) out += '-';
    } else {
      out += negative ? " - " : " + ";
    }
    print_term_body(out, negative ? Rational(-t.coeff) : t.coeff, t.mono);
  }
}

}  // namespace

std::string function_label(const Kernel& k) {
  bool plain = true;
  for (int o : k.orders) plain = plain && o == 0;
  if (k.name == "f" && k.args.size() == 1) return "f" + std::string(static_cast<std::size_t>(k.orders[0]), 'p');
  if (plain) return k.name;
  std::string s = k.name + "_{";
  for (std::size_t i = 0; i < k.orders.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(k.orders[i]);
  }
  return s + '}';
}

std::string to_string(const Expr& e) {
  std::string out;
  print_expr(out, e);
  return out;
}

std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << to_string(e); }

}  // namespace liesym
