#pragma once

// Builders for the option-pricing equations and their parameter sets.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "liesym/expr.hpp"
#include "liesym/jet.hpp"

namespace liesym {

enum class ModelId { BSM, StochVolGeneric, StochVolConst, HestonRaw, HestonTransformed, SteinStein, Heat };

// Volatility function f(y) of the stochastic volatility family.
enum class FSpec { Opaque, Constant, Identity, Sqrt };

std::string model_name(ModelId id);       // CLI spelling: bsm, generic-f, ...
ModelId model_from_name(std::string_view name);
std::vector<std::string> model_names();

// Every field is optional; builders check what they need. Values are exact
// expressions, so a field may hold a number or a symbol.
struct ModelParams {
  std::optional<Expr> r, mu, alpha, m, beta, rho, f0;
  std::optional<Expr> theta, lambda, delta, mbar;  // Heston in the variance variable
  std::optional<Expr> c1, c2;                      // Heston drift after Y = y^2
  std::optional<Expr> gamma0;                      // constant risk premium

  static const std::vector<std::string>& field_names();
  std::optional<Expr>& field(std::string_view name);
  const std::optional<Expr>& field(std::string_view name) const;

  // Field value, or a std::invalid_argument naming the builder and field.
  Expr require(std::string_view name, std::string_view who) const;
  // Fills every absent field with the symbol of the same name.
  ModelParams with_symbolic_defaults() const;
  // Throws when a numeric correlation lies outside [-1, 1].
  void validate() const;
};

nlohmann::json to_json(const ModelParams& p);
// Numbers are read exactly from their decimal text, strings are parsed as
// expressions.
ModelParams model_params_from_json(const nlohmann::json& j);

struct PDEModel {
  ModelId id;
  Pde pde;
  ModelParams params;
  FSpec f = FSpec::Opaque;
};

PDEModel build_bsm(const ModelParams& p);  // sigma is read from f0
PDEModel build_stochvol(const ModelParams& p, FSpec f);
PDEModel build_heston_raw(const ModelParams& p);
// Uses beta, c1, c2 when given; otherwise derives them from theta, lambda,
// delta, mbar.
PDEModel build_heston_transformed(const ModelParams& p);
std::pair<PDEModel, PDEModel> build_heston(const ModelParams& p);
PDEModel build_steinstein(const ModelParams& p);
PDEModel build_heat();

// Dispatch on a model id with missing parameters filled symbolically.
PDEModel build_model(ModelId id, const ModelParams& p = {});

// The reduced Heston constants as functions of the variance-form parameters.
struct HestonConstants {
  Expr beta, c1, c2;
};
HestonConstants heston_constants(const ModelParams& p);

// Model config file: {"model": "...", "params": {...}}.
struct ModelConfig {
  ModelId id;
  ModelParams params;
};
ModelConfig model_config_from_json(const nlohmann::json& j);

// Structural checks shared by every builder: linear homogeneous in u and its
// jets, unit u_t coefficient.
bool is_linear_homogeneous(const Pde& pde);

}  // namespace liesym
