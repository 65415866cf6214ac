#include "liesym/catalog.hpp"

#include <sstream>
#include <stdexcept>

#include "liesym/eval.hpp"
#include "liesym/parse.hpp"

namespace liesym {

namespace {

// Parses a template over the parameter symbols and binds the model's values.
Expr bind_params(const Expr& e, const ModelParams& p) {
  std::vector<SubstitutionRule> rules;
  for (const auto& n : ModelParams::field_names())
    if (const auto& v = p.field(n); v && *v != Expr::symbol(n)) rules.push_back(SubstitutionRule::symbol(n, *v));
  return rules.empty() ? e : substitute(e, rules);
}

Expr instantiate(const std::string& text, const ModelParams& p) { return bind_params(parse(text), p); }

struct FieldText {
  std::vector<std::string> xi;
  std::string eta;
};

VectorField make_field(const JetSpace& js, const FieldText& f, const ModelParams& p) {
  VectorField v(js);
  for (std::size_t i = 0; i < f.xi.size(); ++i) v.xi[i] = instantiate(f.xi[i], p);
  v.eta = instantiate(f.eta, p);
  return v;
}

CatalogEntry entry(std::string label, VectorField printed, std::optional<VectorField> corrected, std::string source,
                   std::vector<ModelId> models, const Pde& pde) {
  CatalogEntry e;
  e.label = std::move(label);
  e.printed = printed;
  e.source = std::move(source);
  e.models = std::move(models);
  e.printed_passes = check_symmetry(printed, pde).passed;
  e.field = (!e.printed_passes && corrected) ? *corrected : printed;
  e.verified = e.printed_passes || check_symmetry(e.field, pde).passed;
  return e;
}

std::vector<CatalogEntry> base_triple(const PDEModel& model, const std::string& source) {
  const auto& js = model.pde.space;
  const std::vector<ModelId> ids{model.id};
  VectorField x2(js);
  x2.set("S", Expr::symbol("S"));
  return {entry("X1", translation(js, "t"), std::nullopt, source, ids, model.pde),
          entry("X2", x2, std::nullopt, source, ids, model.pde),
          entry("Xu", scaling_u(js), std::nullopt, source, ids, model.pde)};
}

std::vector<CatalogEntry> const_vol(const PDEModel& model) {
  const auto& js = model.pde.space;
  const auto& p = model.params;
  const std::vector<ModelId> ids{ModelId::StochVolConst};
  const std::string src = "published generators, constant volatility";
  auto f = [&](const FieldText& t) { return make_field(js, t, p); };
  std::vector<CatalogEntry> out;
  out.push_back(entry("Xbar1", f({{"1", "0", "0"}, "0"}), std::nullopt, src, ids, model.pde));
  out.push_back(entry("Xbar2", f({{"0", "S", "0"}, "0"}), std::nullopt, src, ids, model.pde));
  out.push_back(entry("Xbar3", f({{"0", "0", "exp(-alpha*t)"}, "0"}), std::nullopt, src, ids, model.pde));
  // The S-component needs f0^2 rather than f0 for the u_S coefficient to cancel.
  out.push_back(entry("Xbar4", f({{"0", "2*f0*t*S", "2*beta/alpha*f0*rho"}, "((f0^2-2*r)*t + 2*ln(S))*u"}),
                      f({{"0", "2*f0^2*t*S", "2*beta/alpha*f0*rho"}, "((f0^2-2*r)*t + 2*ln(S))*u"}), src, ids,
                      model.pde));
  // The u-component carries the same exp(alpha t) as the rest, and rho multiplies the premium.
  out.push_back(entry("Xbar5",
                      f({{"0", "exp(alpha*t)*2*f0^2*beta*rho*S", "exp(alpha*t)*beta^2*f0"},
                         "(2*alpha*f0*(y-m) + 2*beta*(mu-r))*u"}),
                      f({{"0", "exp(alpha*t)*2*f0^2*beta*rho*S", "exp(alpha*t)*beta^2*f0"},
                         "exp(alpha*t)*(2*alpha*f0*(y-m) + 2*beta*rho*(mu-r))*u"}),
                      src, ids, model.pde));
  out.push_back(entry("Xu", scaling_u(js), std::nullopt, src, ids, model.pde));
  return out;
}

std::vector<CatalogEntry> bsm(const PDEModel& model) {
  const auto& js = model.pde.space;
  const auto& p = model.params;
  const std::vector<ModelId> ids{ModelId::BSM};
  const std::string src = "Black-Scholes-Merton algebra in x = ln S";
  // D = r - f0^2/2, g = r + D^2/(2 f0^2), b = -D/f0^2.
  Expr sigma2 = pow(*p.f0, Expr(2));
  Expr D = *p.r - sigma2 / Expr(2);
  Expr g = *p.r + pow(D, Expr(2)) / (Expr(2) * sigma2);
  Expr b = -D / sigma2;
  Expr t = Expr::symbol("t"), S = Expr::symbol("S"), u = Expr::symbol("u"), x = ln(S);

  auto out = base_triple(model, src);
  VectorField dil(js);
  dil.set("t", Expr(2) * t).set("S", S * x).set("u", (Expr(2) * t * g + x * b) * u);
  VectorField gal(js);
  gal.set("S", sigma2 * t * S).set("u", (x - D * t) * u);
  VectorField proj(js);
  proj.set("t", Expr(2) * sigma2 * pow(t, Expr(2)))
      .set("S", Expr(2) * sigma2 * t * x * S)
      .set("u", (pow(x, Expr(2)) - sigma2 * t + Expr(2) * sigma2 * g * pow(t, Expr(2)) - Expr(2) * D * t * x) * u);
  out.push_back(entry("dilation", dil, std::nullopt, src, ids, model.pde));
  out.push_back(entry("galilean", gal, std::nullopt, src, ids, model.pde));
  out.push_back(entry("projective", proj, std::nullopt, src, ids, model.pde));
  return out;
}

std::vector<CatalogEntry> heat(const PDEModel& model) {
  const auto& js = model.pde.space;
  const std::vector<ModelId> ids{ModelId::Heat};
  const std::string src = "classical heat algebra";
  auto f = [&](const FieldText& t) { return make_field(js, t, {}); };
  return {entry("X1", f({{"1", "0"}, "0"}), std::nullopt, src, ids, model.pde),
          entry("X2", f({{"0", "1"}, "0"}), std::nullopt, src, ids, model.pde),
          entry("Xu", f({{"0", "0"}, "u"}), std::nullopt, src, ids, model.pde),
          entry("dilation", f({{"2*t", "x"}, "0"}), std::nullopt, src, ids, model.pde),
          entry("galilean", f({{"0", "2*t"}, "-x*u"}), std::nullopt, src, ids, model.pde),
          entry("projective", f({{"4*t^2", "4*t*x"}, "-(x^2 + 2*t)*u"}), std::nullopt, src, ids, model.pde)};
}

}  // namespace

std::vector<CatalogEntry> catalog(const PDEModel& model) {
  switch (model.id) {
    case ModelId::StochVolGeneric:
      return base_triple(model, "published generators, arbitrary volatility");
    case ModelId::HestonTransformed:
    case ModelId::HestonRaw:
      return base_triple(model, "published generators, Heston");
    case ModelId::SteinStein:
      return base_triple(model, "published generators, Stein-Stein");
    case ModelId::StochVolConst:
      return const_vol(model);
    case ModelId::BSM:
      return bsm(model);
    case ModelId::Heat:
      return heat(model);
  }
  throw std::invalid_argument("unknown model id");
}

std::vector<CatalogEntry> catalog(ModelId id) { return catalog(build_model(id)); }

// ----- diff report ---------------------------------------------------------------

void DiffReport::append(const DiffReport& other) {
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

nlohmann::json to_json(const DiffReport& r) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : r.entries)
    arr.push_back({{"location", e.location},
                   {"printed", e.printed},
                   {"derived", e.derived},
                   {"status", e.status},
                   {"derived_verified", e.derived_verified}});
  return arr;
}

std::string to_text(const DiffReport& r) {
  std::ostringstream os;
  if (r.entries.empty()) os << "no discrepancies\n";
  for (const auto& e : r.entries) {
    os << "* " << e.location << " [" << e.status << "]\n";
    os << "    printed: " << e.printed << "\n";
    os << "    derived: " << e.derived << "\n";
  }
  return os.str();
}

DiffReport catalog_diffs(const std::vector<CatalogEntry>& entries) {
  DiffReport r;
  for (const auto& e : entries) {
    if (e.printed_passes) continue;
    DiffEntry d;
    d.location = "generator " + e.label + " (" + e.source + ")";
    d.printed = to_string(e.printed);
    d.derived = to_string(e.field);
    d.derived_verified = e.verified;
    d.status = e.verified ? "printed form fails the symmetry condition; corrected form verified"
                          : "printed form fails the symmetry condition; no verified correction";
    r.entries.push_back(std::move(d));
  }
  return r;
}

// ----- bracket table ------------------------------------------------------------

const std::vector<std::vector<std::string>>& published_const_vol_table() {
  // The printed table writes the rate as "a" in two cells; read as alpha.
  static const std::vector<std::vector<std::string>> table{
      {"0", "0", "-alpha*Xbar3", "2*f0^2*Xbar2 + (f0^2-2*r)*Xu", "alpha*Xbar5", "0"},
      {"0", "0", "0", "2*Xu", "0", "0"},
      {"alpha*Xbar3", "0", "0", "0", "2*alpha*f0*Xu", "0"},
      {"-2*f0^2*Xbar2 - (f0^2-2*r)*Xu", "2*Xu", "0", "0", "0", "0"},
      {"-alpha*Xbar5", "0", "-2*alpha*f0*Xu", "0", "0", "0"},
      {"0", "0", "0", "0", "0", "0"}};
  return table;
}

std::vector<Expr> parse_combination(const std::string& text, const std::vector<std::string>& labels) {
  Expr e = parse(text);
  std::vector<Expr> out(labels.size());
  for (const auto& [key, coeff] : collect(e, labels)) {
    auto name = key.symbol_name();
    std::size_t i = 0;
    while (name && i < labels.size() && labels[i] != *name) ++i;
    if (!name || i == labels.size()) throw std::invalid_argument("not a linear combination of generators: " + text);
    out[i] = coeff;
  }
  return out;
}

bool BracketTable::antisymmetric() const {
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t j = 0; j < cells.size(); ++j)
      for (std::size_t k = 0; k < labels.size(); ++k)
        if (!is_zero(cells[i][j][k] + cells[j][i][k])) return false;
  return true;
}

bool BracketTable::closed() const {
  for (const auto& row : closes)
    for (bool c : row)
      if (!c) return false;
  return true;
}

std::string BracketTable::cell_string(std::size_t i, std::size_t j) const {
  std::vector<Expr> parts;
  for (std::size_t k = 0; k < labels.size(); ++k)
    if (!cells[i][j][k].is_zero()) parts.push_back(cells[i][j][k] * Expr::symbol(labels[k]));
  return to_string(sum(parts));
}

BracketTable bracket_table(const std::vector<CatalogEntry>& entries, const ModelParams& params) {
  BracketTable t;
  std::vector<VectorField> fields;
  for (const auto& e : entries) {
    t.labels.push_back(e.label);
    fields.push_back(e.field);
  }
  const std::size_t n = fields.size();
  t.cells.assign(n, std::vector<std::vector<Expr>>(n));
  t.closes.assign(n, std::vector<bool>(n, true));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      auto d = decompose_in_basis(lie_bracket(fields[i], fields[j]), fields);
      t.cells[i][j] = d.coeffs;
      t.closes[i][j] = d.exact;
    }
  }

  const std::vector<std::string> cv{"Xbar1", "Xbar2", "Xbar3", "Xbar4", "Xbar5", "Xu"};
  if (t.labels == cv && !entries.empty()) {
    const auto& printed = published_const_vol_table();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        auto want = parse_combination(printed[i][j], cv);
        for (auto& w : want) w = bind_params(w, params);
        bool same = true;
        for (std::size_t k = 0; k < n && same; ++k) same = is_zero(want[k] - t.cells[i][j][k]);
        if (same) continue;
        DiffEntry d;
        d.location = "bracket [" + cv[i] + ", " + cv[j] + "]";
        d.printed = printed[i][j];
        d.derived = t.cell_string(i, j);
        d.derived_verified = t.closes[i][j];
        d.status = t.closes[i][j] ? "printed entry disagrees with the computed bracket; computed bracket closes"
                                  : "printed entry disagrees; computed bracket does not close";
        t.diffs.entries.push_back(std::move(d));
      }
    }
  }
  return t;
}

nlohmann::json to_json(const BracketTable& t) {
  nlohmann::json j;
  j["labels"] = t.labels;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < t.labels.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t k = 0; k < t.labels.size(); ++k) row.push_back(t.cell_string(i, k));
    rows.push_back(std::move(row));
  }
  j["cells"] = std::move(rows);
  j["antisymmetric"] = t.antisymmetric();
  j["closed"] = t.closed();
  j["diffs"] = to_json(t.diffs);
  return j;
}

std::string to_text(const BracketTable& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.labels.size(); ++i)
    for (std::size_t j = 0; j < t.labels.size(); ++j)
      os << "[" << t.labels[i] << ", " << t.labels[j] << "] = " << t.cell_string(i, j)
         << (t.closes[i][j] ? "" : "  (does not close)") << "\n";
  return os.str();
}

Classification classify(const PDEModel& model) {
  auto sol = solve_determining(determining_system(model.pde));
  return Classification{sol.basis.size(), std::move(sol.basis), std::move(sol.diagnostics)};
}

}  // namespace liesym
