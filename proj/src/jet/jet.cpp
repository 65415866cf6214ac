#include "liesym/jet.hpp"

#include <algorithm>
#include <stdexcept>

#include "liesym/eval.hpp"
#include "liesym/linear_system.hpp"
#include "liesym/parse.hpp"

namespace liesym {

// ----- jet space ----------------------------------------------------------------

JetSpace::JetSpace(std::vector<std::string> independent, std::string dependent)
    : independent_(std::move(independent)), dependent_(std::move(dependent)) {
  if (independent_.empty()) throw std::invalid_argument("jet space needs at least one independent variable");
  for (std::size_t i = 0; i < independent_.size(); ++i)
    for (std::size_t j = i + 1; j < independent_.size(); ++j)
      if (independent_[i] == independent_[j]) throw std::invalid_argument("repeated variable " + independent_[i]);
  for (const auto& j : fiber())
    if (std::find(independent_.begin(), independent_.end(), j) != independent_.end())
      throw std::invalid_argument("jet symbol clashes with variable " + j);
}

JetSpace JetSpace::standard() { return JetSpace({"t", "S", "y"}, "u"); }

std::size_t JetSpace::index(std::string_view var) const {
  for (std::size_t i = 0; i < independent_.size(); ++i)
    if (independent_[i] == var) return i;
  throw std::invalid_argument("unknown independent variable '" + std::string(var) + "'");
}

bool JetSpace::has(std::string_view var) const {
  return std::find(independent_.begin(), independent_.end(), var) != independent_.end();
}

std::string JetSpace::first(std::size_t i) const { return dependent_ + "_" + independent_.at(i); }

std::string JetSpace::second(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  return dependent_ + "_" + independent_.at(i) + independent_.at(j);
}

std::vector<std::string> JetSpace::first_jets() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < dimension(); ++i) out.push_back(first(i));
  return out;
}

std::vector<std::string> JetSpace::second_jets() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < dimension(); ++i)
    for (std::size_t j = i; j < dimension(); ++j) out.push_back(second(i, j));
  return out;
}

std::vector<std::string> JetSpace::fiber() const {
  std::vector<std::string> out{dependent_};
  for (auto& s : first_jets()) out.push_back(std::move(s));
  for (auto& s : second_jets()) out.push_back(std::move(s));
  return out;
}

// ----- vector fields ------------------------------------------------------------

VectorField& VectorField::set(std::string_view var, Expr value) {
  if (var == space.dependent())
    eta = std::move(value);
  else
    component(var) = std::move(value);
  return *this;
}

std::vector<Expr> VectorField::components() const {
  std::vector<Expr> out = xi;
  out.push_back(eta);
  return out;
}

bool VectorField::is_zero() const {
  for (const auto& c : components())
    if (!liesym::is_zero(c)) return false;
  return true;
}

Expr VectorField::apply(const Expr& g) const {
  std::vector<Expr> parts;
  for (std::size_t i = 0; i < xi.size(); ++i)
    if (!xi[i].is_zero()) parts.push_back(xi[i] * diff(g, space.independent()[i]));
  if (!eta.is_zero()) parts.push_back(eta * diff(g, space.dependent()));
  return sum(parts);
}

namespace {

void require_same_space(const VectorField& a, const VectorField& b) {
  if (!(a.space == b.space)) throw std::invalid_argument("vector fields live on different jet spaces");
}

}  // namespace

VectorField operator+(const VectorField& a, const VectorField& b) {
  require_same_space(a, b);
  VectorField r(a.space);
  for (std::size_t i = 0; i < r.xi.size(); ++i) r.xi[i] = a.xi[i] + b.xi[i];
  r.eta = a.eta + b.eta;
  return r;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  require_same_space(a, b);
  VectorField r(a.space);
  for (std::size_t i = 0; i < r.xi.size(); ++i) r.xi[i] = a.xi[i] - b.xi[i];
  r.eta = a.eta - b.eta;
  return r;
}

VectorField operator*(const Expr& c, const VectorField& v) {
  VectorField r(v.space);
  for (std::size_t i = 0; i < r.xi.size(); ++i) r.xi[i] = c * v.xi[i];
  r.eta = c * v.eta;
  return r;
}

VectorField translation(const JetSpace& js, std::string_view var) {
  VectorField v(js);
  v.set(var, Expr(1));
  return v;
}

VectorField scaling_u(const JetSpace& js) {
  VectorField v(js);
  v.eta = js.u();
  return v;
}

VectorField solution_field(const JetSpace& js, Expr s) {
  VectorField v(js);
  v.eta = std::move(s);
  return v;
}

std::string to_string(const VectorField& v) {
  std::string out;
  auto emit = [&](const Expr& c, const std::string& var) {
    if (c.is_zero()) return;
    if (!out.empty()) out += " + ";
    if (!c.is_one()) out += "(" + to_string(c) + ")*";
    out += "d_" + var;
  };
  for (std::size_t i = 0; i < v.xi.size(); ++i) emit(v.xi[i], v.space.independent()[i]);
  emit(v.eta, v.space.dependent());
  return out.empty() ? "0" : out;
}

nlohmann::json to_json(const VectorField& v) {
  nlohmann::json j;
  j["variables"] = v.space.independent();
  j["dependent"] = v.space.dependent();
  nlohmann::json xi = nlohmann::json::object();
  for (std::size_t i = 0; i < v.xi.size(); ++i) xi[v.space.independent()[i]] = to_string(v.xi[i]);
  j["xi"] = std::move(xi);
  j["eta"] = to_string(v.eta);
  return j;
}

VectorField vector_field_from_json(const nlohmann::json& j) {
  JetSpace js(j.at("variables").get<std::vector<std::string>>(), j.value("dependent", std::string("u")));
  VectorField v(js);
  const auto& xi = j.at("xi");
  for (std::size_t i = 0; i < js.dimension(); ++i) {
    const auto& name = js.independent()[i];
    if (xi.contains(name)) v.xi[i] = parse(xi.at(name).get<std::string>());
  }
  v.eta = parse(j.at("eta").get<std::string>());
  return v;
}

// ----- prolongation ------------------------------------------------------------

const Expr& ProlongedField::second(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  return eta_ij.at({i, j});
}

Expr total_derivative(const Expr& e, std::string_view var, const JetSpace& js) {
  for (const auto& s : js.second_jets())
    if (depends_on(e, s)) throw std::invalid_argument("total derivative would exceed jet order 2 (" + s + ")");
  const std::size_t i = js.index(var);
  std::vector<Expr> parts{diff(e, var), js.jet(i) * diff(e, js.dependent())};
  for (std::size_t j = 0; j < js.dimension(); ++j) parts.push_back(js.jet(i, j) * diff(e, js.first(j)));
  return sum(parts);
}

ProlongedField prolong2(const VectorField& v) {
  const JetSpace& js = v.space;
  const std::size_t n = js.dimension();
  ProlongedField p;
  p.base = v;
  // D_i xi^j, reused by both orders.
  std::vector<std::vector<Expr>> dxi(n, std::vector<Expr>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dxi[i][j] = total_derivative(v.xi[j], js.independent()[i], js);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Expr> parts{total_derivative(v.eta, js.independent()[i], js)};
    for (std::size_t j = 0; j < n; ++j)
      if (!dxi[i][j].is_zero()) parts.push_back(-(dxi[i][j] * js.jet(j)));
    p.eta_i.push_back(sum(parts));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      std::vector<Expr> parts{total_derivative(p.eta_i[i], js.independent()[j], js)};
      for (std::size_t k = 0; k < n; ++k)
        if (!dxi[j][k].is_zero()) parts.push_back(-(dxi[j][k] * js.jet(i, k)));
      p.eta_ij.emplace(std::make_pair(i, j), sum(parts));
    }
  }
  return p;
}

Expr apply_prolonged(const ProlongedField& p, const Expr& h) {
  const JetSpace& js = p.base.space;
  std::vector<Expr> parts{p.base.apply(h)};
  for (std::size_t i = 0; i < js.dimension(); ++i) {
    Expr d = diff(h, js.first(i));
    if (!d.is_zero()) parts.push_back(p.eta_i[i] * d);
    for (std::size_t j = i; j < js.dimension(); ++j) {
      Expr d2 = diff(h, js.second(i, j));
      if (!d2.is_zero()) parts.push_back(p.second(i, j) * d2);
    }
  }
  return sum(parts);
}

// ----- symmetry condition ---------------------------------------------------------

Expr solved_rest(const Pde& pde) {
  const JetSpace& js = pde.space;
  const std::string ut = js.first(0);
  Expr k = diff(pde.equation, ut);
  if (is_zero(k)) throw std::invalid_argument("pde not solvable for " + ut + ": no such term");
  for (const auto& s : js.fiber())
    if (depends_on(k, s)) throw std::invalid_argument("pde not solvable for " + ut + ": coefficient depends on " + s);
  for (const auto& x : js.independent())
    if (depends_on(k, x)) throw std::invalid_argument("pde not solvable for " + ut + ": coefficient depends on " + x);
  Expr h = k.is_one() ? pde.equation : pde.equation / k;
  Expr rest = h - js.jet(0);
  if (depends_on(rest, ut)) throw std::invalid_argument("pde not solvable for " + ut + ": not linear in it");
  return rest;
}

SymmetryReport check_symmetry(const VectorField& v, const Pde& pde) {
  if (!(v.space == pde.space)) throw std::invalid_argument("vector field and pde use different jet spaces");
  const JetSpace& js = pde.space;
  const std::string ut = js.first(0);
  Expr rest = solved_rest(pde);
  Expr h = js.jet(0) + rest;
  Expr x2h = apply_prolonged(prolong2(v), h);
  Expr reduced = substitute(x2h, ut, -rest);

  std::vector<std::string> basis;
  for (const auto& s : js.fiber())
    if (s != ut) basis.push_back(s);

  SymmetryReport rep;
  rep.field = to_string(v);
  rep.pde = pde.label;
  for (const auto& [key, coeff] : collect(reduced, basis)) {
    ++rep.coefficients;
    ZeroTest z = zero_test(coeff);
    rep.numeric_warning = rep.numeric_warning || z.numeric_warning;
    if (!z.zero) rep.residual.emplace(to_string(key), coeff);
  }
  rep.passed = rep.residual.empty();

  Expr psi = diff(x2h, ut);
  bool jet_free = true;
  for (const auto& s : js.fiber()) jet_free = jet_free && !depends_on(psi, s);
  if (jet_free && is_zero(x2h - psi * h)) rep.multiplier = psi;
  return rep;
}

nlohmann::json to_json(const SymmetryReport& r) {
  nlohmann::json j;
  j["passed"] = r.passed;
  j["field"] = r.field;
  j["pde"] = r.pde;
  j["coefficients"] = r.coefficients;
  nlohmann::json res = nlohmann::json::object();
  for (const auto& [k, v] : r.residual) res[k] = to_string(v);
  j["residual"] = std::move(res);
  j["multiplier"] = r.multiplier ? nlohmann::json(to_string(*r.multiplier)) : nlohmann::json(nullptr);
  if (r.numeric_warning) j["numeric_warning"] = true;
  return j;
}

// ----- brackets and decomposition ------------------------------------------------

VectorField lie_bracket(const VectorField& a, const VectorField& b) {
  require_same_space(a, b);
  VectorField r(a.space);
  for (std::size_t i = 0; i < r.xi.size(); ++i) r.xi[i] = a.apply(b.xi[i]) - b.apply(a.xi[i]);
  r.eta = a.apply(b.eta) - b.apply(a.eta);
  return r;
}

Decomposition decompose_in_basis(const VectorField& v, const std::vector<VectorField>& basis) {
  const std::size_t k = basis.size();
  std::vector<std::string> vars = v.space.independent();
  vars.push_back(v.space.dependent());

  // Row per (component, monomial in the space variables).
  std::map<std::pair<std::size_t, Expr>, std::map<std::size_t, Expr>> rows;
  auto add = [&](const VectorField& f, std::size_t col, bool negate) {
    require_same_space(v, f);
    auto comps = f.components();
    for (std::size_t m = 0; m < comps.size(); ++m) {
      for (auto& [key, c] : collect(comps[m], vars)) {
        auto& cell = rows[{m, key}][col];
        cell = negate ? cell - c : cell + c;
      }
    }
  };
  for (std::size_t i = 0; i < k; ++i) add(basis[i], i, false);
  add(v, k, true);

  LinearSystem sys(k + 1);
  for (auto& [key, row] : rows) sys.add_row(std::move(row));
  auto ns = sys.nullspace({k});

  Decomposition d;
  d.coeffs.assign(k, Expr());
  for (std::size_t i = 0; i < ns.free_columns.size(); ++i) {
    if (ns.free_columns[i] != k) continue;
    for (std::size_t j = 0; j < k; ++j) d.coeffs[j] = simplify(ns.vectors[i][j]);
  }
  VectorField recon(v.space);
  for (std::size_t j = 0; j < k; ++j)
    if (!d.coeffs[j].is_zero()) recon = recon + d.coeffs[j] * basis[j];
  d.residual = v - recon;
  d.exact = d.residual.is_zero();
  return d;
}

}  // namespace liesym
