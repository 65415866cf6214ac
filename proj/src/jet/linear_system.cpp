#include "liesym/linear_system.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace liesym {

void LinearSystem::add_row(std::map<std::size_t, Expr> row) {
  for (auto it = row.begin(); it != row.end();) {
    if (it->first >= columns_) throw std::out_of_range("linear system column out of range");
    it = it->second.is_zero() ? row.erase(it) : std::next(it);
  }
  if (!row.empty()) rows_.push_back(std::move(row));
}

namespace {

using Row = std::map<std::size_t, Expr>;

struct Pivot {
  std::size_t column;
  Row row;
};

}  // namespace

LinearSystem::Nullspace LinearSystem::nullspace(const std::vector<std::size_t>& no_pivot) const {
  std::vector<bool> pivotable(columns_, true);
  for (auto c : no_pivot) pivotable.at(c) = false;

  std::vector<Row> rows = rows_;
  std::vector<std::set<std::size_t>> col_rows(columns_);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& [c, v] : rows[r]) col_rows[c].insert(r);
  std::set<std::size_t> alive;
  for (std::size_t r = 0; r < rows.size(); ++r) alive.insert(r);

  Nullspace out;
  std::vector<Pivot> pivots;
  std::vector<bool> is_pivot(columns_, false);

  while (!alive.empty()) {
    // Cheapest pivot: monomial entries first, then short rows and sparse columns.
    std::size_t best_row = 0, best_col = 0;
    std::size_t best_cost = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> dead;
    for (auto r : alive) {
      bool any = false;
      for (const auto& [c, v] : rows[r]) {
        if (!pivotable[c]) continue;
        any = true;
        std::size_t cost = (v.terms().size() - 1) * 1000000 + rows[r].size() * 1000 + col_rows[c].size();
        if (cost < best_cost) {
          best_cost = cost;
          best_row = r;
          best_col = c;
        }
      }
      if (!any) dead.push_back(r);
    }
    for (auto r : dead) {
      alive.erase(r);
      if (!rows[r].empty()) ++out.inconsistent_rows;
      for (const auto& [c, v] : rows[r]) col_rows[c].erase(r);
    }
    if (best_cost == std::numeric_limits<std::size_t>::max()) break;

    Row prow = rows[best_row];
    alive.erase(best_row);
    for (const auto& [c, v] : prow) col_rows[c].erase(best_row);
    Expr p = prow.at(best_col);
    const bool unit = p.terms().size() == 1;
    if (unit) {
      Expr inv = pow(p, Expr(-1));
      for (auto& [c, v] : prow) v = c == best_col ? Expr(1) : v * inv;
      p = Expr(1);
    }

    std::vector<std::size_t> targets(col_rows[best_col].begin(), col_rows[best_col].end());
    for (auto s : targets) {
      Row& row = rows[s];
      Expr factor = row.at(best_col);
      for (const auto& [c, v] : row) col_rows[c].erase(s);
      Row updated;
      if (!p.is_one()) {
        for (const auto& [c, v] : row) updated.emplace(c, p * v);
      } else {
        updated = row;
      }
      for (const auto& [c, v] : prow) {
        Expr delta = factor * v;
        auto it = updated.find(c);
        if (it == updated.end())
          updated.emplace(c, -delta);
        else
          it->second = it->second - delta;
      }
      for (auto it = updated.begin(); it != updated.end();) it = it->second.is_zero() ? updated.erase(it) : std::next(it);
      row = std::move(updated);
      for (const auto& [c, v] : row) col_rows[c].insert(s);
    }
    is_pivot[best_col] = true;
    pivots.push_back(Pivot{best_col, std::move(prow)});
  }

  for (std::size_t c = 0; c < columns_; ++c)
    if (!is_pivot[c]) out.free_columns.push_back(c);

  for (auto f : out.free_columns) {
    std::vector<Expr> vec(columns_);
    vec[f] = Expr(1);
    for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
      std::vector<Expr> parts;
      for (const auto& [c, v] : it->row) {
        if (c == it->column || vec[c].is_zero()) continue;
        parts.push_back(v * vec[c]);
      }
      if (parts.empty()) continue;
      const Expr& pc = it->row.at(it->column);
      vec[it->column] = pc.is_one() ? -sum(parts) : -sum(parts) / pc;
    }
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

std::vector<Expr> clear_vector_denominators(const std::vector<Expr>& v) {
  // Tag each entry with a slot symbol so one denominator pass covers all of them.
  std::vector<std::string> slots;
  std::vector<Expr> tagged;
  for (std::size_t i = 0; i < v.size(); ++i) {
    slots.push_back("__slot" + std::to_string(i));
    tagged.push_back(v[i] * Expr::symbol(slots.back()));
  }
  Expr num = clear_denominators(sum(tagged)).num;
  auto parts = collect(num, slots);
  std::vector<Expr> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto it = parts.find(Expr::symbol(slots[i]));
    if (it != parts.end()) out[i] = it->second;
  }
  // Primitive rational content with a positive leading coefficient.
  mpz_class g = 0, l = 1;
  const Rational* lead = nullptr;
  for (const auto& e : out) {
    for (const auto& t : e.terms()) {
      if (!lead) lead = &t.coeff;
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coeff.get_num_mpz_t());
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coeff.get_den_mpz_t());
    }
  }
  if (!lead || g == 0) return out;
  Rational scale(l, g);
  scale.canonicalize();
  if (sgn(*lead) < 0) scale = -scale;
  if (scale != 1)
    for (auto& e : out) e = e * Expr(scale);
  return out;
}

}  // namespace liesym
