#pragma once

// Published generators for each model, the bracket table of the constant
// volatility algebra, classification, and the report of printed claims that
// fail their mechanical check.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "liesym/jet.hpp"
#include "liesym/models.hpp"

namespace liesym {

struct CatalogEntry {
  std::string label;     // X1, X2, Xbar3, Xu, ...
  VectorField field;     // verified form used downstream
  VectorField printed;   // as published (equal to `field` when it verifies)
  std::string source;
  std::vector<ModelId> models;
  bool printed_passes = true;
  bool verified = true;  // `field` passes check_symmetry on the model
};

// Generators of the given model including u d_u. The fields use the model's
// parameter expressions.
std::vector<CatalogEntry> catalog(const PDEModel& model);
std::vector<CatalogEntry> catalog(ModelId id);

struct DiffEntry {
  std::string location;
  std::string printed;
  std::string derived;
  std::string status;  // "printed fails, derived verified", ...
  bool derived_verified = false;
};

struct DiffReport {
  std::vector<DiffEntry> entries;
  void append(const DiffReport& other);
};

nlohmann::json to_json(const DiffReport& r);
std::string to_text(const DiffReport& r);

// Printed/derived comparison of the catalog entries themselves.
DiffReport catalog_diffs(const std::vector<CatalogEntry>& entries);

struct BracketTable {
  std::vector<std::string> labels;
  // cells[i][j]: coefficients of [e_i, e_j] over the entries.
  std::vector<std::vector<std::vector<Expr>>> cells;
  std::vector<std::vector<bool>> closes;  // decomposition residual is zero
  DiffReport diffs;

  bool antisymmetric() const;
  bool closed() const;
  std::string cell_string(std::size_t i, std::size_t j) const;
};

// The published table is compared, with `params` bound, whenever the entries
// are the constant volatility generators.
BracketTable bracket_table(const std::vector<CatalogEntry>& entries, const ModelParams& params = {});
nlohmann::json to_json(const BracketTable& t);
std::string to_text(const BracketTable& t);

// Published bracket table of the constant volatility algebra, cell strings
// in the expression grammar over the labels Xbar1..Xbar5, Xu.
const std::vector<std::vector<std::string>>& published_const_vol_table();
// Parses a cell string into coefficients over `labels`.
std::vector<Expr> parse_combination(const std::string& text, const std::vector<std::string>& labels);

struct Classification {
  std::size_t dimension = 0;
  std::vector<VectorField> basis;
  std::vector<std::string> diagnostics;
};

Classification classify(const PDEModel& model);

}  // namespace liesym
