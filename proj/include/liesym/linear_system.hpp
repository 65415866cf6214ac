#pragma once

// Sparse homogeneous linear systems with Expr entries, reduced by exact
// elimination. Entries are treated as elements of the field of rational
// functions in the parameter symbols (generic parameter values).

#include <cstddef>
#include <map>
#include <vector>

#include "liesym/expr.hpp"

namespace liesym {

class LinearSystem {
 public:
  explicit LinearSystem(std::size_t columns) : columns_(columns) {}

  std::size_t columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }

  // Zero entries are dropped; an empty row is ignored.
  void add_row(std::map<std::size_t, Expr> row);

  struct Nullspace {
    std::vector<std::size_t> free_columns;
    std::vector<std::vector<Expr>> vectors;  // vectors[k][free_columns[k]] == 1
    // Rows left with entries only in the non-pivot columns.
    std::size_t inconsistent_rows = 0;
  };

  // Basis of the nullspace. Columns in `no_pivot` are never used as pivots,
  // so they always end up free (used for right-hand sides).
  Nullspace nullspace(const std::vector<std::size_t>& no_pivot = {}) const;

 private:
  std::size_t columns_;
  std::vector<std::map<std::size_t, Expr>> rows_;
};

// Multiplies the vector through by its sum-kernel denominators and removes
// the rational content, so the entries become polynomial-like and primitive.
std::vector<Expr> clear_vector_denominators(const std::vector<Expr>& v);

}  // namespace liesym
