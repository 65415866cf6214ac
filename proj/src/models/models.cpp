#include "liesym/models.hpp"

#include <array>
#include <stdexcept>

#include "liesym/eval.hpp"
#include "liesym/parse.hpp"

namespace liesym {

namespace {

struct NameEntry {
  ModelId id;
  const char* name;
};

constexpr std::array<NameEntry, 7> kNames{{{ModelId::BSM, "bsm"},
                                           {ModelId::StochVolGeneric, "generic-f"},
                                           {ModelId::StochVolConst, "const-vol"},
                                           {ModelId::HestonRaw, "heston-raw"},
                                           {ModelId::HestonTransformed, "heston"},
                                           {ModelId::SteinStein, "stein-stein"},
                                           {ModelId::Heat, "heat"}}};

Expr sym(const char* s) { return Expr::symbol(s); }

Expr half() { return Expr(Rational(1, 2)); }

}  // namespace

std::string model_name(ModelId id) {
  for (const auto& e : kNames)
    if (e.id == id) return e.name;
  throw std::invalid_argument("unknown model id");
}

ModelId model_from_name(std::string_view name) {
  for (const auto& e : kNames)
    if (name == e.name) return e.id;
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

std::vector<std::string> model_names() {
  std::vector<std::string> out;
  for (const auto& e : kNames) out.emplace_back(e.name);
  return out;
}

// ----- parameters ------------------------------------------------------------

const std::vector<std::string>& ModelParams::field_names() {
  static const std::vector<std::string> names{"r",     "mu",     "alpha", "m",    "beta", "rho", "f0",
                                              "theta", "lambda", "delta", "mbar", "c1",   "c2",  "gamma0"};
  return names;
}

std::optional<Expr>& ModelParams::field(std::string_view name) {
  return const_cast<std::optional<Expr>&>(static_cast<const ModelParams&>(*this).field(name));
}

const std::optional<Expr>& ModelParams::field(std::string_view name) const {
  if (name == "r") return r;
  if (name == "mu") return mu;
  if (name == "alpha") return alpha;
  if (name == "m") return m;
  if (name == "beta") return beta;
  if (name == "rho") return rho;
  if (name == "f0" || name == "sigma") return f0;
  if (name == "theta") return theta;
  if (name == "lambda") return lambda;
  if (name == "delta") return delta;
  if (name == "mbar") return mbar;
  if (name == "c1") return c1;
  if (name == "c2") return c2;
  if (name == "gamma0") return gamma0;
  throw std::invalid_argument("unknown parameter '" + std::string(name) + "'");
}

Expr ModelParams::require(std::string_view name, std::string_view who) const {
  const auto& v = field(name);
  if (!v) throw std::invalid_argument(std::string(who) + ": missing parameter '" + std::string(name) + "'");
  return *v;
}

ModelParams ModelParams::with_symbolic_defaults() const {
  ModelParams p = *this;
  for (const auto& n : field_names()) {
    auto& v = p.field(n);
    if (!v) v = Expr::symbol(n);
  }
  return p;
}

void ModelParams::validate() const {
  if (!rho) return;
  if (auto q = rho->number(); q && (*q > 1 || *q < -1)) throw std::invalid_argument("correlation rho outside [-1, 1]");
}

nlohmann::json to_json(const ModelParams& p) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& n : ModelParams::field_names())
    if (const auto& v = p.field(n)) j[n] = to_string(*v);
  return j;
}

ModelParams model_params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("params must be a JSON object");
  ModelParams p;
  for (const auto& [key, value] : j.items()) {
    auto& slot = p.field(key);
    if (value.is_number())
      slot = Expr(rational_from_string(value.dump()));
    else if (value.is_string())
      slot = parse(value.get<std::string>());
    else
      throw std::invalid_argument("parameter '" + key + "' must be a number or a string");
  }
  p.validate();
  return p;
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c{model_from_name(j.at("model").get<std::string>()), {}};
  if (j.contains("params")) c.params = model_params_from_json(j.at("params"));
  return c;
}

// ----- builders ------------------------------------------------------------------

PDEModel build_bsm(const ModelParams& p) {
  p.validate();
  Expr sigma = p.require("f0", "build_bsm");
  Expr r = p.require("r", "build_bsm");
  JetSpace js({"t", "S"});
  Expr S = sym("S");
  Expr h = half() * pow(sigma, Expr(2)) * pow(S, Expr(2)) * sym("u_SS") + r * S * sym("u_S") - r * sym("u") + sym("u_t");
  return PDEModel{ModelId::BSM, Pde{"bsm", js, h, std::nullopt, {"S"}}, p, FSpec::Constant};
}

PDEModel build_stochvol(const ModelParams& p, FSpec fs) {
  p.validate();
  const char* who = "build_stochvol";
  Expr r = p.require("r", who), mu = p.require("mu", who), alpha = p.require("alpha", who);
  Expr m = p.require("m", who), beta = p.require("beta", who), rho = p.require("rho", who);
  Expr S = sym("S"), y = sym("y");
  Expr f;
  switch (fs) {
    case FSpec::Opaque:
      f = Expr::function("f", {y});
      break;
    case FSpec::Constant:
      f = p.require("f0", who);
      break;
    case FSpec::Identity:
      f = y;
      break;
    case FSpec::Sqrt:
      f = sqrt(y);
      break;
  }
  Expr drift = alpha * (m - y) - beta * rho * (mu - r) / f;
  Expr h = half() * pow(f, Expr(2)) * pow(S, Expr(2)) * sym("u_SS") + rho * beta * S * f * sym("u_Sy") +
           half() * pow(beta, Expr(2)) * sym("u_yy") + r * S * sym("u_S") + drift * sym("u_y") - r * sym("u") +
           sym("u_t");
  ModelId id = fs == FSpec::Constant ? ModelId::StochVolConst : ModelId::StochVolGeneric;
  std::string label = fs == FSpec::Constant ? "const-vol" : "generic-f";
  std::optional<Expr> rate;
  if (!alpha.is_zero()) rate = alpha;
  return PDEModel{id, Pde{label, JetSpace::standard(), h, rate, {"S"}}, p, fs};
}

PDEModel build_heston_raw(const ModelParams& p) {
  p.validate();
  const char* who = "build_heston";
  Expr theta = p.require("theta", who), lambda = p.require("lambda", who), delta = p.require("delta", who);
  Expr mbar = p.require("mbar", who), r = p.require("r", who), rho = p.require("rho", who);
  Expr S = sym("S"), Y = sym("Y");
  Expr h = half() * Y * pow(S, Expr(2)) * sym("u_SS") + rho * delta * Y * S * sym("u_SY") +
           half() * pow(delta, Expr(2)) * Y * sym("u_YY") + r * S * sym("u_S") +
           (theta * (mbar - Y) - lambda * Y) * sym("u_Y") - r * sym("u") + sym("u_t");
  return PDEModel{ModelId::HestonRaw, Pde{"heston-raw", JetSpace({"t", "S", "Y"}), h, std::nullopt, {"S"}}, p,
                  FSpec::Sqrt};
}

HestonConstants heston_constants(const ModelParams& p) {
  if (p.beta && p.c1 && p.c2) return {*p.beta, *p.c1, *p.c2};
  const char* who = "build_heston";
  Expr delta = p.require("delta", who);
  if (delta.is_zero()) throw std::invalid_argument("build_heston: delta = 0 makes the change of variables singular");
  Expr theta = p.require("theta", who), lambda = p.require("lambda", who), mbar = p.require("mbar", who);
  Expr beta = delta / Expr(2);
  return {beta, -(theta + lambda), theta * mbar - pow(beta, Expr(2))};
}

PDEModel build_heston_transformed(const ModelParams& p) {
  p.validate();
  const char* who = "build_heston";
  auto k = heston_constants(p);
  if (k.beta.is_zero()) throw std::invalid_argument("build_heston: beta = 0 makes the change of variables singular");
  Expr r = p.require("r", who), rho = p.require("rho", who);
  Expr S = sym("S"), y = sym("y");
  Expr h = half() * pow(y, Expr(2)) * pow(S, Expr(2)) * sym("u_SS") + k.beta * rho * y * S * sym("u_Sy") +
           half() * pow(k.beta, Expr(2)) * sym("u_yy") + r * S * sym("u_S") +
           half() * (k.c1 * y + k.c2 / y) * sym("u_y") - r * sym("u") + sym("u_t");
  ModelParams q = p;
  q.beta = k.beta;
  q.c1 = k.c1;
  q.c2 = k.c2;
  return PDEModel{ModelId::HestonTransformed, Pde{"heston", JetSpace::standard(), h, std::nullopt, {"S"}}, q,
                  FSpec::Identity};
}

std::pair<PDEModel, PDEModel> build_heston(const ModelParams& p) {
  return {build_heston_raw(p), build_heston_transformed(p)};
}

PDEModel build_steinstein(const ModelParams& p) {
  p.validate();
  const char* who = "build_steinstein";
  if (p.rho && !is_zero(*p.rho)) throw std::invalid_argument("build_steinstein: correlation must vanish");
  Expr r = p.require("r", who), alpha = p.require("alpha", who), m = p.require("m", who);
  Expr beta = p.require("beta", who), gamma0 = p.require("gamma0", who);
  Expr S = sym("S"), y = sym("y");
  Expr h = half() * pow(y, Expr(2)) * pow(S, Expr(2)) * sym("u_SS") + half() * pow(beta, Expr(2)) * sym("u_yy") +
           r * S * sym("u_S") + (alpha * (m - y) - beta * gamma0) * sym("u_y") - r * sym("u") + sym("u_t");
  ModelParams q = p;
  q.rho = Expr(0);
  std::optional<Expr> rate;
  if (!alpha.is_zero()) rate = alpha;
  return PDEModel{ModelId::SteinStein, Pde{"stein-stein", JetSpace::standard(), h, rate, {"S"}}, q,
                  FSpec::Identity};
}

PDEModel build_heat() {
  JetSpace js({"t", "x"});
  return PDEModel{ModelId::Heat, Pde{"heat", js, sym("u_t") - sym("u_xx"), std::nullopt, {}}, {}, FSpec::Constant};
}

PDEModel build_model(ModelId id, const ModelParams& given) {
  ModelParams p = given;
  if (id == ModelId::SteinStein && !p.rho) p.rho = Expr(0);
  p = p.with_symbolic_defaults();
  switch (id) {
    case ModelId::BSM:
      return build_bsm(p);
    case ModelId::StochVolGeneric:
      return build_stochvol(p, FSpec::Opaque);
    case ModelId::StochVolConst:
      return build_stochvol(p, FSpec::Constant);
    case ModelId::HestonRaw:
      return build_heston_raw(p);
    case ModelId::HestonTransformed: {
      // The reduced constants win unless only the variance form was supplied.
      if (!(given.beta && given.c1 && given.c2) && (given.theta || given.lambda || given.delta || given.mbar)) {
        p.beta.reset();
        p.c1.reset();
        p.c2.reset();
      }
      return build_heston_transformed(p);
    }
    case ModelId::SteinStein:
      return build_steinstein(p);
    case ModelId::Heat:
      return build_heat();
  }
  throw std::invalid_argument("unknown model id");
}

bool is_linear_homogeneous(const Pde& pde) {
  const auto fiber = pde.space.fiber();
  std::vector<SubstitutionRule> zero;
  for (const auto& s : fiber) zero.push_back(SubstitutionRule::symbol(s, Expr()));
  if (!is_zero(substitute(pde.equation, zero))) return false;
  for (const auto& s : fiber) {
    Expr d = diff(pde.equation, s);
    for (const auto& s2 : fiber)
      if (depends_on(d, s2)) return false;
  }
  return true;
}

}  // namespace liesym
