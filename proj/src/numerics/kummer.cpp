#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "liesym/numerics.hpp"

namespace liesym {

namespace {

bool nonpositive_integer(Real x) { return x <= 0 && std::floor(x) == x; }

Real rgamma(Real x) { return nonpositive_integer(x) ? 0.0L : 1.0L / std::tgamma(x); }

Real series(Real a, Real b, Real z) {
  Real sum = 1, comp = 0, term = 1;
  for (int k = 0; k < kKummerMaxTerms; ++k) {
    term *= (a + k) * z / ((b + k) * (k + 1));
    Real t = sum + term;
    comp += std::fabs(sum) >= std::fabs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    if (term == 0) break;
    // Only stop once the terms decay for good.
    if (k + 1 > std::fabs(z) && std::fabs(term) < 1e-16L * std::fabs(sum + comp)) break;
  }
  return sum + comp;
}

}  // namespace

Real kummer_M(Real a, Real b, Real z) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(z)) throw NumericsError("kummer_M: non-finite argument");
  if (nonpositive_integer(b)) throw NumericsError("kummer_M: b is a non-positive integer");
  if (std::fabs(z) > kKummerMaxAbsZ) throw NumericsError("kummer_M: |z| > 50 is outside the supported domain");
  if (z < 0) return std::exp(z) * series(b - a, b, -z);
  return series(a, b, z);
}

Real kummer_U(Real a, Real b, Real z, bool* shifted) {
  if (!(z > 0)) throw NumericsError("kummer_U: needs z > 0");
  bool shift = std::floor(b) == b;
  if (shift) b += kIntegerBShift;
  if (shifted) *shifted = shift;
  Real first = std::tgamma(1 - b) * rgamma(a - b + 1);
  Real second = std::tgamma(b - 1) * rgamma(a);
  Real out = 0;
  if (first != 0) out += first * kummer_M(a, b, z);
  if (second != 0) out += second * std::pow(z, 1 - b) * kummer_M(a - b + 1, 2 - b, z);
  return out;
}

const Quadrature& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, Quadrature> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  if (n < 1) throw std::invalid_argument("gauss_legendre: n < 1");
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Real x = std::cos(std::numbers::pi_v<Real> * (i + 0.75L) / (n + 0.5L));
    Real dp = 0;
    for (int it = 0; it < 100; ++it) {
      Real p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = n * (x * p1 - p0) / (x * x - 1);
      Real dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-19L) break;
    }
    Real w = 2 / ((1 - x * x) * dp * dp);
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    q.weights[i] = q.weights[n - 1 - i] = w;
  }
  return cache.emplace(n, std::move(q)).first->second;
}

Real integrate_gl(const std::function<Real(Real)>& f, Real lo, Real hi, int n) {
  const auto& q = gauss_legendre(n);
  Real mid = (lo + hi) / 2, half = (hi - lo) / 2, s = 0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * f(mid + half * q.nodes[i]);
  return s * half;
}

}  // namespace liesym
