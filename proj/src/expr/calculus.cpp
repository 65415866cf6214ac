#include <unordered_map>

#include "internal.hpp"
#include "liesym/expr.hpp"

namespace liesym {

namespace {

bool kernel_depends(const KernelPtr& k, std::string_view var, std::uint64_t bit) {
  if (!(k->mask & bit)) return false;
  if (k->kind == KernelKind::Symbol) return k->name == var;
  for (const auto& a : k->args)
    if (depends_on(a, var)) return true;
  return false;
}

Expr drop_factor(const Term& t, std::size_t index) {
  Term r;
  r.coeff = t.coeff;
  r.mono.exp_arg = t.mono.exp_arg;
  r.mono.factors.reserve(t.mono.factors.size() - 1);
  for (std::size_t i = 0; i < t.mono.factors.size(); ++i)
    if (i != index) r.mono.factors.push_back(t.mono.factors[i]);
  return term_expr(r);
}

Expr diff_kernel(const KernelPtr& k, std::string_view var) {
  switch (k->kind) {
    case KernelKind::Number:
      return Expr();
    case KernelKind::Symbol:
      return k->name == var ? Expr(1) : Expr();
    case KernelKind::Function: {
      std::vector<Expr> parts;
      for (std::size_t i = 0; i < k->args.size(); ++i) {
        Expr da = diff(k->args[i], var);
        if (da.is_zero()) continue;
        std::vector<int> orders = k->orders;
        ++orders[i];
        parts.push_back(da * Expr::function(k->name, k->args, std::move(orders)));
      }
      return sum(parts);
    }
    case KernelKind::Log:
      return diff(k->args[0], var) / k->args[0];
    case KernelKind::Group:
      return diff(k->args[0], var);
  }
  return Expr();
}

}  // namespace

Expr diff(const Expr& e, std::string_view var) {
  const std::uint64_t bit = symbol_bit(var);
  if (!(e.mask() & bit)) return Expr();
  std::vector<Expr> parts;
  for (const auto& t : e.terms()) {
    for (std::size_t i = 0; i < t.mono.factors.size(); ++i) {
      const auto& f = t.mono.factors[i];
      bool base_dep = kernel_depends(f.base, var, bit);
      bool exp_dep = depends_on(f.exponent, var);
      if (!base_dep && !exp_dep) continue;
      Expr rest = drop_factor(t, i);
      Expr d;
      if (exp_dep) {
        Expr inner = diff(f.exponent, var) * ln(kernel_expr(f.base));
        if (base_dep) inner = inner + f.exponent * diff_kernel(f.base, var) * pow(kernel_expr(f.base), Expr(-1));
        d = detail::factor_expr(f.base, f.exponent) * inner;
      } else {
        d = f.exponent * detail::factor_expr(f.base, f.exponent - Expr(1)) * diff_kernel(f.base, var);
      }
      parts.push_back(rest * d);
    }
    if (depends_on(t.mono.exp_arg, var)) parts.push_back(term_expr(t) * diff(t.mono.exp_arg, var));
  }
  return sum(parts);
}

Expr diff(const Expr& e, std::string_view var, int order) {
  Expr r = e;
  for (int i = 0; i < order; ++i) r = diff(r, var);
  return r;
}

// ----- substitution -----------------------------------------------------------

SubstitutionRule SubstitutionRule::symbol(std::string name, Expr value) {
  SubstitutionRule r;
  r.kind = Kind::Symbol;
  r.target = std::move(name);
  r.replacement = std::move(value);
  return r;
}

SubstitutionRule SubstitutionRule::function(std::string head, std::vector<std::string> params, Expr body) {
  SubstitutionRule r;
  r.kind = Kind::Function;
  r.target = std::move(head);
  r.params = std::move(params);
  r.replacement = std::move(body);
  return r;
}

SubstitutionRule SubstitutionRule::rename_args(std::string head, std::vector<Expr> new_args) {
  SubstitutionRule r;
  r.kind = Kind::FunctionArgs;
  r.target = std::move(head);
  r.new_args = std::move(new_args);
  return r;
}

namespace {

class Substituter {
 public:
  explicit Substituter(const std::vector<SubstitutionRule>& rules) : rules_(rules) {
    for (const auto& r : rules_) {
      if (r.kind == SubstitutionRule::Kind::Symbol)
        mask_ |= symbol_bit(r.target);
      else
        mask_ |= function_bit(r.target);
    }
  }

  // With no rules every kernel is rebuilt, which re-canonicalizes.
  Expr apply(const Expr& e) {
    if (!rules_.empty() && !(e.mask() & mask_)) return e;
    std::vector<Expr> parts;
    std::vector<Term> untouched;
    for (const auto& t : e.terms()) {
      if (!rules_.empty() && !(term_mask(t) & mask_)) {
        untouched.push_back(t);
        continue;
      }
      Expr acc(t.coeff);
      for (const auto& f : t.mono.factors) {
        acc = acc * pow(kernel(f.base), apply(f.exponent));
        if (acc.is_zero()) break;
      }
      if (!acc.is_zero() && !t.mono.exp_arg.is_zero()) acc = acc * exp(apply(t.mono.exp_arg));
      parts.push_back(std::move(acc));
    }
    if (!untouched.empty()) parts.push_back(detail::from_sorted_terms(std::move(untouched)));
    return sum(parts);
  }

 private:
  static std::uint64_t term_mask(const Term& t) {
    std::uint64_t m = t.mono.exp_arg.mask();
    for (const auto& f : t.mono.factors) m |= f.base->mask | f.exponent.mask();
    return m;
  }

  const SubstitutionRule* find(SubstitutionRule::Kind kind, const std::string& target) const {
    for (const auto& r : rules_) {
      bool kind_ok = kind == SubstitutionRule::Kind::Symbol ? r.kind == kind : r.kind != SubstitutionRule::Kind::Symbol;
      if (kind_ok && r.target == target) return &r;
    }
    return nullptr;
  }

  Expr kernel(const KernelPtr& k) {
    auto it = memo_.find(k.get());
    if (it != memo_.end()) return it->second;
    Expr r = kernel_uncached(k);
    memo_.emplace(k.get(), r);
    return r;
  }

  Expr kernel_uncached(const KernelPtr& k) {
    switch (k->kind) {
      case KernelKind::Number:
        return Expr(k->value);
      case KernelKind::Symbol:
        if (auto* r = find(SubstitutionRule::Kind::Symbol, k->name)) return r->replacement;
        return kernel_expr(k);
      case KernelKind::Log:
        return ln(apply(k->args[0]));
      case KernelKind::Group:
        return apply(k->args[0]);
      case KernelKind::Function: {
        const auto* r = find(SubstitutionRule::Kind::Function, k->name);
        if (r && r->kind == SubstitutionRule::Kind::FunctionArgs) {
          if (r->new_args.size() != k->args.size())
            throw std::invalid_argument("argument count mismatch renaming " + k->name);
          return Expr::function(k->name, r->new_args, k->orders);
        }
        std::vector<Expr> args;
        args.reserve(k->args.size());
        for (const auto& a : k->args) args.push_back(apply(a));
        if (!r) return Expr::function(k->name, std::move(args), k->orders);
        if (r->params.size() != args.size())
          throw std::invalid_argument("argument count mismatch substituting " + k->name);
        Expr body = r->replacement;
        for (std::size_t i = 0; i < args.size(); ++i) body = diff(body, r->params[i], k->orders[i]);
        std::vector<SubstitutionRule> bind;
        for (std::size_t i = 0; i < args.size(); ++i) bind.push_back(SubstitutionRule::symbol(r->params[i], args[i]));
        return Substituter(bind).apply(body);
      }
    }
    return kernel_expr(k);
  }

  const std::vector<SubstitutionRule>& rules_;
  std::uint64_t mask_ = 0;
  std::unordered_map<const Kernel*, Expr> memo_;
};

}  // namespace

Expr substitute(const Expr& e, const std::vector<SubstitutionRule>& rules) { return Substituter(rules).apply(e); }

Expr substitute(const Expr& e, std::string_view symbol, const Expr& value) {
  std::vector<SubstitutionRule> rules{SubstitutionRule::symbol(std::string(symbol), value)};
  return substitute(e, rules);
}

// ----- collection -------------------------------------------------------------

std::map<Expr, Expr> collect(const Expr& e, const std::vector<std::string>& vars) {
  auto dep = [&](const Expr& x) {
    for (const auto& v : vars)
      if (depends_on(x, v)) return true;
    return false;
  };
  std::map<Expr, std::vector<Term>> groups;
  for (const auto& t : e.terms()) {
    Monomial key, rest;
    for (const auto& f : t.mono.factors) {
      bool d = dep(f.exponent);
      if (!d) {
        d = f.base->kind == KernelKind::Symbol
                ? std::find(vars.begin(), vars.end(), f.base->name) != vars.end()
                : dep(kernel_expr(f.base));
      }
      (d ? key : rest).factors.push_back(f);
    }
    if (!t.mono.exp_arg.is_zero()) {
      std::vector<Term> kt, rt;
      for (const auto& et : t.mono.exp_arg.terms()) (dep(term_expr(et)) ? kt : rt).push_back(et);
      key.exp_arg = detail::from_sorted_terms(std::move(kt));
      rest.exp_arg = detail::from_sorted_terms(std::move(rt));
    }
    groups[monomial_expr(key)].push_back(Term{t.coeff, std::move(rest)});
  }
  std::map<Expr, Expr> out;
  for (auto& [k, terms] : groups) {
    Expr c = detail::from_terms(std::move(terms));
    if (!c.is_zero()) out.emplace(k, std::move(c));
  }
  return out;
}

}  // namespace liesym
