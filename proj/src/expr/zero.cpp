#include <cmath>
#include <stdexcept>

#include "liesym/eval.hpp"

namespace liesym {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double probe_value(const std::string& name, int point, int attempt) {
  std::uint64_t h = kZeroProbeSeed;
  for (char c : name) h = splitmix(h ^ static_cast<unsigned char>(c));
  h = splitmix(h ^ (static_cast<std::uint64_t>(point) << 8) ^ (static_cast<std::uint64_t>(attempt) << 24));
  return 0.5 + static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Returns true when the probe sees zero at every point.
bool numerically_zero(const Expr& e) {
  auto syms = free_symbols(e);
  std::vector<std::string> vars(syms.begin(), syms.end());
  std::vector<CompiledExpr<double>> terms;
  terms.reserve(e.terms().size());
  for (const auto& t : e.terms()) terms.emplace_back(term_expr(t), vars, std::map<std::string, double>{},
                                                     FunctionTable<double>{}, true);
  std::vector<double> x(vars.size());
  for (int p = 0; p < kZeroProbePoints; ++p) {
    bool done = false;
    for (int attempt = 0; attempt < 32 && !done; ++attempt) {
      for (std::size_t i = 0; i < vars.size(); ++i) x[i] = probe_value(vars[i], p, attempt);
      double value = 0, magnitude = 0;
      bool finite = true;
      for (const auto& c : terms) {
        double v = c(std::span<const double>(x));
        if (!std::isfinite(v)) {
          finite = false;
          break;
        }
        value += v;
        magnitude += std::fabs(v);
      }
      if (!finite) continue;
      done = true;
      if (std::fabs(value) >= 1e-9 * (1.0 + magnitude)) return false;
    }
    if (!done) throw std::runtime_error("zero test: expression singular at every probe point");
  }
  return true;
}

}  // namespace

ZeroTest zero_test(const Expr& e) {
  if (e.is_zero()) return {true, false};
  Expr cleared = e.has_group() ? clear_denominators(e).num : e;
  if (cleared.is_zero()) {
    if (!numerically_zero(e)) throw std::logic_error("zero test: canonical zero contradicted by numeric probe");
    return {true, false};
  }
  return {false, numerically_zero(e)};
}

bool is_zero(const Expr& e) { return zero_test(e).zero; }

}  // namespace liesym
