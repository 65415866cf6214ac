#include "liesym/expr.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "internal.hpp"

namespace liesym {

using detail::mix;

namespace {

std::size_t str_hash(std::string_view s) { return std::hash<std::string_view>{}(s); }

int sign_of(int c) { return c < 0 ? -1 : (c > 0 ? 1 : 0); }

const std::shared_ptr<const PolyNode>& zero_node() {
  static const std::shared_ptr<const PolyNode> z = std::make_shared<const PolyNode>();
  return z;
}

std::size_t monomial_hash(const Monomial& m) {
  std::size_t h = 0x51ED27;
  for (const auto& f : m.factors) {
    h = mix(h, f.base->hash);
    h = mix(h, f.exponent.hash());
  }
  if (!m.exp_arg.is_zero()) h = mix(h, m.exp_arg.hash() * 3 + 1);
  return h;
}

std::uint64_t monomial_mask(const Monomial& m) {
  std::uint64_t mask = m.exp_arg.mask();
  for (const auto& f : m.factors) mask |= f.base->mask | f.exponent.mask();
  return mask;
}

bool is_positive_integer(const Expr& e, long& n) {
  auto q = e.number();
  if (!q || !is_integer(*q) || sgn(*q) <= 0 || !q->get_num().fits_slong_p()) return false;
  n = q->get_num().get_si();
  return true;
}

bool is_integer_number(const Expr& e, long& n) {
  auto q = e.number();
  if (!q || !is_integer(*q) || !q->get_num().fits_slong_p()) return false;
  n = q->get_num().get_si();
  return true;
}

// Accumulator for a product of two monomials.
struct MonoProduct {
  Rational coeff;
  Monomial mono;
  std::vector<std::pair<KernelPtr, long>> expand;
};

void push_factor(MonoProduct& out, const KernelPtr& base, Expr exponent) {
  if (exponent.is_zero()) return;
  long n = 0;
  if (base->kind == KernelKind::Number && is_integer_number(exponent, n)) {
    out.coeff *= pow_int(base->value, n);
    return;
  }
  if (base->kind == KernelKind::Group && is_positive_integer(exponent, n)) {
    out.expand.emplace_back(base, n);
    return;
  }
  out.mono.factors.push_back(Factor{base, std::move(exponent)});
}

// Raw group terms may carry G^1, which must still expand.
void push_one_sided(MonoProduct& out, const Factor& f) {
  if (f.base->kind == KernelKind::Group)
    push_factor(out, f.base, f.exponent);
  else
    out.mono.factors.push_back(f);
}

void multiply_monomials(const Monomial& a, const Monomial& b, MonoProduct& out) {
  out.mono.factors.clear();
  out.mono.factors.reserve(a.factors.size() + b.factors.size());
  out.expand.clear();
  std::size_t i = 0, j = 0;
  while (i < a.factors.size() || j < b.factors.size()) {
    if (j == b.factors.size()) {
      push_one_sided(out, a.factors[i++]);
    } else if (i == a.factors.size()) {
      push_one_sided(out, b.factors[j++]);
    } else {
      int c = a.factors[i].base == b.factors[j].base ? 0 : compare(*a.factors[i].base, *b.factors[j].base);
      if (c < 0) {
        push_one_sided(out, a.factors[i++]);
      } else if (c > 0) {
        push_one_sided(out, b.factors[j++]);
      } else {
        push_factor(out, a.factors[i].base, a.factors[i].exponent + b.factors[j].exponent);
        ++i;
        ++j;
      }
    }
  }
  if (a.exp_arg.is_zero())
    out.mono.exp_arg = b.exp_arg;
  else if (b.exp_arg.is_zero())
    out.mono.exp_arg = a.exp_arg;
  else
    out.mono.exp_arg = a.exp_arg + b.exp_arg;
}

Expr single_term(Rational c, Monomial m) {
  std::vector<Term> t;
  t.push_back(Term{std::move(c), std::move(m)});
  return detail::from_sorted_terms(std::move(t));
}

// Rewrites a sum p as the single raw term c*m*G^1 when `other` contains the
// kernel G, so that G^1 * G^-k cancels in the product.
Expr as_group_term(const Expr& p, const Expr& other) {
  auto content = detail::decompose_content(p);
  for (const auto& t : other.terms()) {
    for (const auto& f : t.mono.factors) {
      if (f.base->kind == KernelKind::Group && f.base->args[0] == content.g) {
        Monomial m;
        m.factors.push_back(Factor{f.base, Expr(1)});
        return detail::scale(content.m, content.c) * single_term(Rational(1), std::move(m));
      }
    }
  }
  return p;
}

Expr multiply(const Expr& a0, const Expr& b0) {
  if (a0.is_zero() || b0.is_zero()) return Expr();
  if (auto q = a0.number()) return detail::scale(b0, *q);
  if (auto q = b0.number()) return detail::scale(a0, *q);
  Expr a = a0, b = b0;
  if (a.terms().size() > 1 && b.has_group()) a = as_group_term(a, b);
  if (b.terms().size() > 1 && a.has_group()) b = as_group_term(b, a);

  std::vector<Term> out;
  out.reserve(a.terms().size() * b.terms().size());
  std::vector<Expr> expanded;
  MonoProduct prod;
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      prod.coeff = ta.coeff * tb.coeff;
      multiply_monomials(ta.mono, tb.mono, prod);
      if (prod.expand.empty()) {
        out.push_back(Term{prod.coeff, std::move(prod.mono)});
        prod.mono = Monomial{};
      } else {
        Expr piece = single_term(prod.coeff, std::move(prod.mono));
        prod.mono = Monomial{};
        for (const auto& [k, n] : prod.expand) piece = piece * pow(k->args[0], Expr(n));
        expanded.push_back(std::move(piece));
      }
    }
  }
  for (const auto& e : expanded)
    for (const auto& t : e.terms()) out.push_back(t);
  return detail::from_terms(std::move(out));
}

Expr add_exprs(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  std::vector<Term> out;
  out.reserve(ta.size() + tb.size());
  std::size_t i = 0, j = 0;
  while (i < ta.size() || j < tb.size()) {
    if (j == tb.size()) {
      out.push_back(ta[i++]);
    } else if (i == ta.size()) {
      out.push_back(tb[j++]);
    } else {
      int c = compare(ta[i].mono, tb[j].mono);
      if (c < 0) {
        out.push_back(ta[i++]);
      } else if (c > 0) {
        out.push_back(tb[j++]);
      } else {
        Rational s = ta[i].coeff + tb[j].coeff;
        if (s != 0) out.push_back(Term{std::move(s), ta[i].mono});
        ++i;
        ++j;
      }
    }
  }
  return detail::from_sorted_terms(std::move(out));
}

}  // namespace

// ----- detail -----------------------------------------------------------------

namespace detail {

Expr from_sorted_terms(std::vector<Term> terms) {
  if (terms.empty()) return Expr();
  auto node = std::make_shared<PolyNode>();
  std::size_t h = 0xC0FFEE;
  std::uint64_t mask = 0;
  bool group = false;
  for (const auto& t : terms) {
    h = mix(h, hash_value(t.coeff));
    h = mix(h, monomial_hash(t.mono));
    mask |= monomial_mask(t.mono);
    for (const auto& f : t.mono.factors)
      if (f.base->kind == KernelKind::Group) group = true;
  }
  node->terms = std::move(terms);
  node->hash = h;
  node->mask = mask;
  node->has_group = group;
  return Expr(std::shared_ptr<const PolyNode>(std::move(node)));
}

Expr from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& x, const Term& y) { return compare(x.mono, y.mono) < 0; });
  std::vector<Term> out;
  out.reserve(terms.size());
  for (auto& t : terms) {
    if (!out.empty() && compare(out.back().mono, t.mono) == 0) {
      out.back().coeff += t.coeff;
    } else {
      if (!out.empty() && out.back().coeff == 0) out.pop_back();
      out.push_back(std::move(t));
    }
  }
  if (!out.empty() && out.back().coeff == 0) out.pop_back();
  out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.coeff == 0; }), out.end());
  return from_sorted_terms(std::move(out));
}

KernelPtr symbol_kernel(std::string_view name) {
  auto k = std::make_shared<Kernel>();
  k->kind = KernelKind::Symbol;
  k->name = std::string(name);
  k->hash = mix(0x5EB01, str_hash(name));
  k->mask = symbol_bit(name);
  return k;
}

KernelPtr function_kernel(std::string_view head, std::vector<Expr> args, std::vector<int> orders) {
  if (orders.empty()) orders.assign(args.size(), 0);
  if (orders.size() != args.size()) throw std::invalid_argument("derivative orders do not match argument count");
  auto k = std::make_shared<Kernel>();
  k->kind = KernelKind::Function;
  k->name = std::string(head);
  std::size_t h = mix(0xF00D, str_hash(head));
  std::uint64_t mask = function_bit(head);
  for (std::size_t i = 0; i < args.size(); ++i) {
    h = mix(h, args[i].hash());
    h = mix(h, static_cast<std::size_t>(orders[i]));
    mask |= args[i].mask();
  }
  k->args = std::move(args);
  k->orders = std::move(orders);
  k->hash = h;
  k->mask = mask;
  return k;
}

KernelPtr log_kernel(const Expr& arg) {
  auto k = std::make_shared<Kernel>();
  k->kind = KernelKind::Log;
  k->args = {arg};
  k->hash = mix(0x1061, arg.hash());
  k->mask = arg.mask();
  return k;
}

KernelPtr group_kernel(const Expr& arg) {
  auto k = std::make_shared<Kernel>();
  k->kind = KernelKind::Group;
  k->args = {arg};
  k->hash = mix(0x6A0, arg.hash());
  k->mask = arg.mask();
  return k;
}

KernelPtr number_kernel(const Rational& value) {
  auto k = std::make_shared<Kernel>();
  k->kind = KernelKind::Number;
  k->value = value;
  k->hash = mix(0x4B, hash_value(value));
  return k;
}

Expr scale(const Expr& e, const Rational& q) {
  if (q == 0 || e.is_zero()) return Expr();
  if (q == 1) return e;
  std::vector<Term> out = e.terms();
  for (auto& t : out) t.coeff *= q;
  return from_sorted_terms(std::move(out));
}

Expr numeric_power(const Rational& c, const Expr& exponent) {
  if (exponent.is_zero() || c == 1) return Expr(1);
  if (c == 0) {
    auto q = exponent.number();
    if (q && sgn(*q) > 0) return Expr();
    throw std::domain_error("0 raised to a non-positive or symbolic power");
  }
  if (auto q = exponent.number()) {
    if (is_integer(*q)) return Expr(pow_int(c, to_long(*q)));
    if (sgn(c) > 0 && q->get_den().fits_ulong_p() && q->get_num().fits_slong_p()) {
      if (auto r = exact_root(c, q->get_den().get_ui())) return Expr(pow_int(*r, q->get_num().get_si()));
    }
  }
  Monomial m;
  m.factors.push_back(Factor{number_kernel(c), exponent});
  return single_term(Rational(1), std::move(m));
}

Expr factor_expr(const KernelPtr& base, const Expr& exponent) {
  if (exponent.is_zero()) return Expr(1);
  switch (base->kind) {
    case KernelKind::Number:
      return numeric_power(base->value, exponent);
    case KernelKind::Group: {
      long n = 0;
      if (is_positive_integer(exponent, n)) return pow(base->args[0], exponent);
      break;
    }
    default:
      break;
  }
  Monomial m;
  m.factors.push_back(Factor{base, exponent});
  return single_term(Rational(1), std::move(m));
}

Content decompose_content(const Expr& p) {
  const auto& terms = p.terms();
  Monomial common;
  // Bases present in every term with a numeric exponent; keep the minimum.
  for (const auto& f : terms.front().mono.factors) {
    auto q0 = f.exponent.number();
    if (!q0) continue;
    Rational lo = *q0;
    bool everywhere = true;
    for (std::size_t i = 1; i < terms.size() && everywhere; ++i) {
      bool found = false;
      for (const auto& g : terms[i].mono.factors) {
        if (g.base == f.base || compare(*g.base, *f.base) == 0) {
          auto q = g.exponent.number();
          if (q) {
            found = true;
            if (*q < lo) lo = *q;
          }
          break;
        }
      }
      everywhere = found;
    }
    if (everywhere) common.factors.push_back(Factor{f.base, Expr(lo)});
  }
  const Expr& e0 = terms.front().mono.exp_arg;
  bool same_exp = !e0.is_zero();
  for (std::size_t i = 1; i < terms.size() && same_exp; ++i) same_exp = terms[i].mono.exp_arg == e0;
  if (same_exp) common.exp_arg = e0;

  Expr m = monomial_expr(common);
  Expr g = common.empty() ? p : p * pow(m, Expr(-1));
  Rational c = g.terms().front().coeff;
  g = scale(g, Rational(1) / c);
  return Content{c, m, g};
}

}  // namespace detail

// ----- Expr -------------------------------------------------------------------

Expr::Expr() : node_(zero_node()) {}
Expr::Expr(int value) : Expr(Rational(value)) {}
Expr::Expr(long value) : Expr(Rational(value)) {}
Expr::Expr(const Rational& value) : node_(zero_node()) {
  if (value != 0) {
    Rational q = value;
    q.canonicalize();
    *this = single_term(std::move(q), Monomial{});
  }
}

Expr Expr::symbol(std::string_view name) {
  if (name.empty()) throw std::invalid_argument("empty symbol name");
  Monomial m;
  m.factors.push_back(Factor{detail::symbol_kernel(name), Expr(1)});
  return single_term(Rational(1), std::move(m));
}

Expr Expr::function(std::string_view head, std::vector<Expr> args, std::vector<int> orders) {
  Monomial m;
  m.factors.push_back(Factor{detail::function_kernel(head, std::move(args), std::move(orders)), Expr(1)});
  return single_term(Rational(1), std::move(m));
}

const std::vector<Term>& Expr::terms() const { return node_->terms; }
bool Expr::is_zero() const { return node_->terms.empty(); }
bool Expr::is_one() const {
  return node_->terms.size() == 1 && node_->terms[0].mono.empty() && node_->terms[0].coeff == 1;
}
bool Expr::is_number() const {
  return node_->terms.empty() || (node_->terms.size() == 1 && node_->terms[0].mono.empty());
}
std::optional<Rational> Expr::number() const {
  if (node_->terms.empty()) return Rational(0);
  if (node_->terms.size() == 1 && node_->terms[0].mono.empty()) return node_->terms[0].coeff;
  return std::nullopt;
}
std::optional<std::string> Expr::symbol_name() const {
  if (node_->terms.size() != 1) return std::nullopt;
  const auto& t = node_->terms[0];
  if (t.coeff != 1 || t.mono.factors.size() != 1 || !t.mono.exp_arg.is_zero()) return std::nullopt;
  const auto& f = t.mono.factors[0];
  if (f.base->kind != KernelKind::Symbol || !f.exponent.is_one()) return std::nullopt;
  return f.base->name;
}
std::size_t Expr::hash() const { return node_->hash; }
std::uint64_t Expr::mask() const { return node_->mask; }
bool Expr::has_group() const { return node_->has_group; }

std::uint64_t symbol_bit(std::string_view name) { return std::uint64_t{1} << (str_hash(name) & 63u); }
std::uint64_t function_bit(std::string_view head) {
  return std::uint64_t{1} << ((str_hash(head) * 0x9E3779B97F4A7C15ull >> 58) & 63u);
}

// ----- ordering -----------------------------------------------------------------

int compare(const Kernel& a, const Kernel& b) {
  if (&a == &b) return 0;
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  switch (a.kind) {
    case KernelKind::Number:
      return sign_of(cmp(a.value, b.value));
    case KernelKind::Symbol:
      return sign_of(a.name.compare(b.name));
    case KernelKind::Function: {
      if (int c = sign_of(a.name.compare(b.name))) return c;
      if (a.args.size() != b.args.size()) return a.args.size() < b.args.size() ? -1 : 1;
      for (std::size_t i = 0; i < a.orders.size(); ++i)
        if (a.orders[i] != b.orders[i]) return a.orders[i] < b.orders[i] ? -1 : 1;
      for (std::size_t i = 0; i < a.args.size(); ++i)
        if (int c = compare(a.args[i], b.args[i])) return c;
      return 0;
    }
    case KernelKind::Log:
    case KernelKind::Group:
      return compare(a.args[0], b.args[0]);
  }
  return 0;
}

int compare(const Monomial& a, const Monomial& b) {
  const std::size_t n = std::min(a.factors.size(), b.factors.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& fa = a.factors[i];
    const auto& fb = b.factors[i];
    if (fa.base != fb.base)
      if (int c = compare(*fa.base, *fb.base)) return c;
    if (int c = compare(fa.exponent, fb.exponent)) return c;
  }
  // A shorter factor list sorts after its extensions, so constants come last.
  if (a.factors.size() != b.factors.size()) return a.factors.size() < b.factors.size() ? 1 : -1;
  return compare(a.exp_arg, b.exp_arg);
}

int compare(const Expr& a, const Expr& b) {
  if (a.node() == b.node()) return 0;
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  const std::size_t n = std::min(ta.size(), tb.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(ta[i].mono, tb[i].mono)) return c;
    if (int c = sign_of(cmp(ta[i].coeff, tb[i].coeff))) return c;
  }
  if (ta.size() != tb.size()) return ta.size() < tb.size() ? -1 : 1;
  return 0;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node() == b.node()) return true;
  if (a.hash() != b.hash()) return false;
  return compare(a, b) == 0;
}

// ----- arithmetic -------------------------------------------------------------

Expr operator+(const Expr& a, const Expr& b) { return add_exprs(a, b); }
Expr operator-(const Expr& a) { return detail::scale(a, Rational(-1)); }
Expr operator-(const Expr& a, const Expr& b) { return add_exprs(a, -b); }
Expr operator*(const Expr& a, const Expr& b) { return multiply(a, b); }
Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw std::domain_error("division by zero");
  if (auto q = b.number()) return detail::scale(a, Rational(1) / *q);
  return multiply(a, pow(b, Expr(-1)));
}
Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

Expr sum(const std::vector<Expr>& items) {
  std::size_t n = 0;
  for (const auto& e : items) n += e.terms().size();
  std::vector<Term> all;
  all.reserve(n);
  for (const auto& e : items)
    for (const auto& t : e.terms()) all.push_back(t);
  return detail::from_terms(std::move(all));
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (exponent.is_zero()) return Expr(1);
  if (exponent.is_one()) return base;
  if (base.is_zero()) {
    auto q = exponent.number();
    if (q && sgn(*q) > 0) return Expr();
    throw std::domain_error("0 raised to a non-positive or symbolic power");
  }
  const auto& terms = base.terms();
  if (terms.size() == 1) {
    const Term& t = terms[0];
    Expr result = detail::numeric_power(t.coeff, exponent);
    for (const auto& f : t.mono.factors) result = result * detail::factor_expr(f.base, f.exponent * exponent);
    if (!t.mono.exp_arg.is_zero()) result = result * exp(t.mono.exp_arg * exponent);
    return result;
  }
  long n = 0;
  if (is_positive_integer(exponent, n)) {
    Expr result(1), sq = base;
    while (n > 0) {
      if (n & 1) result = result * sq;
      n >>= 1;
      if (n) sq = sq * sq;
    }
    return result;
  }
  auto content = detail::decompose_content(base);
  Expr result = detail::numeric_power(content.c, exponent);
  if (!content.m.is_one()) result = result * pow(content.m, exponent);
  return result * detail::factor_expr(detail::group_kernel(content.g), exponent);
}

Expr exp(const Expr& arg) {
  if (arg.is_zero()) return Expr(1);
  Expr result(1);
  std::vector<Term> rest;
  for (const auto& t : arg.terms()) {
    int log_index = -1, logs = 0;
    for (std::size_t i = 0; i < t.mono.factors.size(); ++i) {
      const auto& f = t.mono.factors[i];
      if (f.base->kind == KernelKind::Log) {
        ++logs;
        if (f.exponent.is_one()) log_index = static_cast<int>(i);
      }
    }
    if (logs == 1 && log_index >= 0) {
      Monomial m = t.mono;
      KernelPtr lk = m.factors[static_cast<std::size_t>(log_index)].base;
      m.factors.erase(m.factors.begin() + log_index);
      result = result * pow(lk->args[0], single_term(t.coeff, std::move(m)));
    } else {
      rest.push_back(t);
    }
  }
  if (!rest.empty()) {
    Monomial m;
    m.exp_arg = detail::from_sorted_terms(std::move(rest));
    result = result * single_term(Rational(1), std::move(m));
  }
  return result;
}

namespace {

Expr raw_log(const Expr& arg) {
  return single_term(Rational(1), Monomial{{Factor{detail::log_kernel(arg), Expr(1)}}, Expr()});
}

Expr log_of_kernel(const KernelPtr& k) {
  if (k->kind == KernelKind::Number) return raw_log(Expr(k->value));
  return raw_log(kernel_expr(k));
}

}  // namespace

Expr ln(const Expr& arg) {
  if (arg.is_zero()) throw std::domain_error("ln(0)");
  if (arg.is_one()) return Expr();
  const auto& terms = arg.terms();
  if (terms.size() == 1) {
    const Term& t = terms[0];
    if (sgn(t.coeff) < 0) return raw_log(arg);
    Expr result;
    if (t.coeff != 1) result = raw_log(Expr(t.coeff));
    for (const auto& f : t.mono.factors) result = result + f.exponent * log_of_kernel(f.base);
    return result + t.mono.exp_arg;
  }
  auto content = detail::decompose_content(arg);
  if (sgn(content.c) < 0) return raw_log(arg);
  Expr result = raw_log(content.g);
  if (content.c != 1) result = result + raw_log(Expr(content.c));
  if (!content.m.is_one()) result = result + ln(content.m);
  return result;
}

Expr sqrt(const Expr& arg) { return pow(arg, Expr(Rational(1, 2))); }

Expr simplify(const Expr& e) {
  std::vector<SubstitutionRule> none;
  return substitute(e, none);
}

// ----- plumbing -----------------------------------------------------------------

Expr kernel_expr(const KernelPtr& k) {
  switch (k->kind) {
    case KernelKind::Number:
      return Expr(k->value);
    case KernelKind::Group:
      return k->args[0];
    default: {
      Monomial m;
      m.factors.push_back(Factor{k, Expr(1)});
      return single_term(Rational(1), std::move(m));
    }
  }
}

Expr term_expr(const Term& t) { return single_term(t.coeff, t.mono); }

Expr monomial_expr(const Monomial& m) {
  if (m.empty()) return Expr(1);
  return single_term(Rational(1), m);
}

namespace {

bool depends_rec(const Expr& e, std::string_view var, std::uint64_t bit);

bool kernel_depends(const Kernel& k, std::string_view var, std::uint64_t bit) {
  if (!(k.mask & bit)) return false;
  switch (k.kind) {
    case KernelKind::Symbol:
      return k.name == var;
    case KernelKind::Number:
      return false;
    default:
      for (const auto& a : k.args)
        if (depends_rec(a, var, bit)) return true;
      return false;
  }
}

bool depends_rec(const Expr& e, std::string_view var, std::uint64_t bit) {
  if (!(e.mask() & bit)) return false;
  for (const auto& t : e.terms()) {
    for (const auto& f : t.mono.factors) {
      if (kernel_depends(*f.base, var, bit)) return true;
      if (depends_rec(f.exponent, var, bit)) return true;
    }
    if (depends_rec(t.mono.exp_arg, var, bit)) return true;
  }
  return false;
}

bool contains_fn_rec(const Expr& e, std::string_view head, std::uint64_t bit) {
  if (!(e.mask() & bit)) return false;
  for (const auto& t : e.terms()) {
    for (const auto& f : t.mono.factors) {
      if (f.base->kind == KernelKind::Function && f.base->name == head) return true;
      for (const auto& a : f.base->args)
        if (contains_fn_rec(a, head, bit)) return true;
      if (contains_fn_rec(f.exponent, head, bit)) return true;
    }
    if (contains_fn_rec(t.mono.exp_arg, head, bit)) return true;
  }
  return false;
}

void collect_symbols_rec(const Expr& e, std::set<std::string>& out) {
  for (const auto& t : e.terms()) {
    for (const auto& f : t.mono.factors) {
      if (f.base->kind == KernelKind::Symbol) out.insert(f.base->name);
      for (const auto& a : f.base->args) collect_symbols_rec(a, out);
      collect_symbols_rec(f.exponent, out);
    }
    collect_symbols_rec(t.mono.exp_arg, out);
  }
}

}  // namespace

bool depends_on(const Expr& e, std::string_view var) { return depends_rec(e, var, symbol_bit(var)); }

bool contains_function(const Expr& e, std::string_view head) {
  return contains_fn_rec(e, head, function_bit(head));
}

std::set<std::string> free_symbols(const Expr& e) {
  std::set<std::string> out;
  collect_symbols_rec(e, out);
  return out;
}

Fraction clear_denominators(const Expr& e) {
  // Largest negative exponent of each Group kernel across the terms.
  std::vector<std::pair<KernelPtr, long>> dens;
  for (const auto& t : e.terms()) {
    for (const auto& f : t.mono.factors) {
      if (f.base->kind != KernelKind::Group) continue;
      auto q = f.exponent.number();
      if (!q || sgn(*q) >= 0) continue;
      // Round fractional exponents up to the next integer magnitude.
      mpz_class mag = -(q->get_num()) / q->get_den();
      if (mag * q->get_den() != -(q->get_num())) mag += 1;
      long n = mag.get_si();
      auto it = std::find_if(dens.begin(), dens.end(),
                             [&](const auto& p) { return compare(*p.first, *f.base) == 0; });
      if (it == dens.end())
        dens.emplace_back(f.base, n);
      else
        it->second = std::max(it->second, n);
    }
  }
  if (dens.empty()) return Fraction{e, Expr(1)};
  Expr den(1);
  Monomial raw;
  for (const auto& [k, n] : dens) {
    raw.factors.push_back(Factor{k, Expr(n)});
    den = den * pow(k->args[0], Expr(n));
  }
  std::sort(raw.factors.begin(), raw.factors.end(),
            [](const Factor& a, const Factor& b) { return compare(*a.base, *b.base) < 0; });
  // Multiply term by term with the unexpanded G^n so every G^-k cancels first.
  std::vector<Term> out;
  std::vector<Expr> expanded;
  MonoProduct prod;
  for (const auto& t : e.terms()) {
    prod.coeff = t.coeff;
    multiply_monomials(t.mono, raw, prod);
    if (prod.expand.empty()) {
      out.push_back(Term{prod.coeff, std::move(prod.mono)});
    } else {
      Expr piece = single_term(prod.coeff, std::move(prod.mono));
      for (const auto& [k, n] : prod.expand) piece = piece * pow(k->args[0], Expr(n));
      expanded.push_back(std::move(piece));
    }
    prod.mono = Monomial{};
  }
  for (const auto& x : expanded)
    for (const auto& t : x.terms()) out.push_back(t);
  return Fraction{detail::from_terms(std::move(out)), den};
}

}  // namespace liesym
