#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "liesym/numerics.hpp"

namespace liesym {

namespace {

Expr bind(const Expr& e, const std::map<std::string, Expr>& params) {
  std::vector<SubstitutionRule> rules;
  for (const auto& [k, v] : params)
    if (v != Expr::symbol(k)) rules.push_back(SubstitutionRule::symbol(k, v));
  return rules.empty() ? e : substitute(e, rules);
}

std::string where(Real y) {
  std::ostringstream os;
  os << static_cast<double>(y);
  return os.str();
}

using State = std::array<Real, 2>;

// Dormand-Prince 5(4) tableau.
constexpr Real c2 = 1.0L / 5, c3 = 3.0L / 10, c4 = 4.0L / 5, c5 = 8.0L / 9;
constexpr Real a21 = 1.0L / 5;
constexpr Real a31 = 3.0L / 40, a32 = 9.0L / 40;
constexpr Real a41 = 44.0L / 45, a42 = -56.0L / 15, a43 = 32.0L / 9;
constexpr Real a51 = 19372.0L / 6561, a52 = -25360.0L / 2187, a53 = 64448.0L / 6561, a54 = -212.0L / 729;
constexpr Real a61 = 9017.0L / 3168, a62 = -355.0L / 33, a63 = 46732.0L / 5247, a64 = 49.0L / 176,
               a65 = -5103.0L / 18656;
constexpr Real a71 = 35.0L / 384, a73 = 500.0L / 1113, a74 = 125.0L / 192, a75 = -2187.0L / 6784, a76 = 11.0L / 84;
constexpr Real e1 = 71.0L / 57600, e3 = -71.0L / 16695, e4 = 71.0L / 1920, e5 = -17253.0L / 339200,
               e6 = 22.0L / 525, e7 = -1.0L / 40;
// Dense output (order 4 continuous extension).
constexpr Real d1 = -12715105075.0L / 11282082432, d3 = 87487479700.0L / 32700410799,
               d4 = -10690763975.0L / 1880347072, d5 = 701980252875.0L / 199316789632,
               d6 = -1453857185.0L / 822651844, d7 = 69997945.0L / 29380423;

}  // namespace

OdeRhs::OdeRhs(const LinearODE2& ode, const Values& values) {
  std::vector<std::string> vars{ode.var};
  a_ = CompiledExpr<Real>(bind(ode.a, ode.params), vars, values);
  b_ = CompiledExpr<Real>(bind(ode.b, ode.params), vars, values);
  c_ = CompiledExpr<Real>(bind(ode.c, ode.params), vars, values);
}

Real OdeRhs::a(Real y) const { return a_({y}); }
Real OdeRhs::b(Real y) const { return b_({y}); }
Real OdeRhs::c(Real y) const { return c_({y}); }

std::pair<Real, Real> OdeRhs::operator()(Real y, Real w, Real wp) const {
  Real a = a_({y});
  if (a == 0 || !std::isfinite(a)) throw NumericsError("coefficient singularity: a(y) vanishes at y = " + where(y));
  Real wpp = -(b_({y}) * wp + c_({y}) * w) / a;
  if (!std::isfinite(wpp)) throw NumericsError("coefficient singularity at y = " + where(y));
  return {wp, wpp};
}

SolutionGrid solve_ode(const LinearODE2& ode, Real y0, Real w0, Real w0p, std::pair<Real, Real> domain, Real tol,
                       const Values& values, int points) {
  auto [lo, hi] = domain;
  if (!(lo < hi)) throw std::invalid_argument("solve_ode: empty domain");
  if (y0 < lo || y0 > hi) throw std::invalid_argument("solve_ode: y0 outside the domain");
  if (points < 2) throw std::invalid_argument("solve_ode: need at least two grid points");
  if (!(tol > 0)) throw std::invalid_argument("solve_ode: tolerance must be positive");
  OdeRhs rhs(ode, values);

  SolutionGrid g;
  g.y.resize(points);
  g.w.assign(points, NAN);
  g.wp.assign(points, NAN);
  for (int k = 0; k < points; ++k) g.y[k] = lo + (hi - lo) * k / (points - 1);
  g.y.back() = hi;
  g.meta.domain = domain;
  g.meta.y0 = y0;
  g.meta.tol = tol;

  // The leading coefficient must keep its sign on the grid.
  Real a0 = rhs.a(g.y[0]);
  for (Real y : g.y) {
    Real a = rhs.a(y);
    if (a == 0 || !std::isfinite(a) || (a > 0) != (a0 > 0))
      throw NumericsError("coefficient singularity: a(y) changes sign or vanishes near y = " + where(y));
    if (!std::isfinite(rhs.b(y)) || !std::isfinite(rhs.c(y)))
      throw NumericsError("coefficient singularity at y = " + where(y));
  }

  auto f = [&](Real y, const State& s) {
    auto [d0, d1v] = rhs(y, s[0], s[1]);
    return State{d0, d1v};
  };
  const Real span = hi - lo;
  for (int dir : {1, -1}) {
    const Real end = dir > 0 ? hi : lo;
    Real x = y0;
    State s{w0, w0p};
    // Grid points in this direction, nearest first.
    std::vector<int> idx;
    for (int k = 0; k < points; ++k)
      if ((dir > 0 && g.y[k] >= y0) || (dir < 0 && g.y[k] < y0)) idx.push_back(k);
    if (dir < 0) std::reverse(idx.begin(), idx.end());
    std::size_t next = 0;
    while (next < idx.size() && g.y[idx[next]] == x) {
      g.w[idx[next]] = s[0];
      g.wp[idx[next]] = s[1];
      ++next;
    }
    if (x == end) continue;
    Real h = dir * std::min<Real>(1e-3L * span, std::fabs(end - x));
    State k1 = f(x, s);
    std::size_t guard = 0;
    while (dir * (end - x) > 0) {
      if (++guard > 2000000) throw NumericsError("solve_ode: step limit exceeded");
      if (dir * (x + h - end) > 0) h = end - x;
      if (std::fabs(h) < 1e-14L * span) throw NumericsError("solve_ode: step size underflow near y = " + where(x));
      State k2, k3, k4, k5, k6, k7, yn, tmp;
      for (int i = 0; i < 2; ++i) tmp[i] = s[i] + h * a21 * k1[i];
      k2 = f(x + c2 * h, tmp);
      for (int i = 0; i < 2; ++i) tmp[i] = s[i] + h * (a31 * k1[i] + a32 * k2[i]);
      k3 = f(x + c3 * h, tmp);
      for (int i = 0; i < 2; ++i) tmp[i] = s[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      k4 = f(x + c4 * h, tmp);
      for (int i = 0; i < 2; ++i) tmp[i] = s[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      k5 = f(x + c5 * h, tmp);
      for (int i = 0; i < 2; ++i)
        tmp[i] = s[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      k6 = f(x + h, tmp);
      for (int i = 0; i < 2; ++i)
        yn[i] = s[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
      k7 = f(x + h, yn);
      Real err = 0;
      for (int i = 0; i < 2; ++i) {
        Real e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        Real sc = tol * (1 + std::max(std::fabs(s[i]), std::fabs(yn[i])));
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(err / 2);
      if (!std::isfinite(err)) throw NumericsError("solve_ode: non-finite solution near y = " + where(x));
      if (err <= 1) {
        ++g.meta.steps;
        const Real xn = x + h;
        while (next < idx.size() && dir * (g.y[idx[next]] - xn) <= 0) {
          const Real th = (g.y[idx[next]] - x) / h, th1 = 1 - th;
          for (int i = 0; i < 2; ++i) {
            Real r1 = s[i], r2 = yn[i] - s[i], r3 = h * k1[i] - r2, r4 = r2 - h * k7[i] - r3;
            Real r5 = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            Real v = r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
            (i == 0 ? g.w : g.wp)[idx[next]] = v;
          }
          ++next;
        }
        x = xn;
        s = yn;
        k1 = k7;
      } else {
        ++g.meta.rejected;
      }
      Real fac = err == 0 ? 5 : std::clamp<Real>(0.9L * std::pow(err, -0.2L), 0.2L, 5.0L);
      h *= fac;
    }
  }
  for (std::size_t k = 0; k < g.y.size(); ++k)
    if (!std::isfinite(g.w[k]) || !std::isfinite(g.wp[k]))
      throw NumericsError("solve_ode: non-finite value at y = " + where(g.y[k]));
  return g;
}

std::function<Real(Real)> ode_flow(const LinearODE2& ode, Real y0, Real w0, Real w0p, const Values& values, int steps) {
  struct Flow {
    Flow(OdeRhs r, Real y0_, Real w0_, Real w0p_, int n) : rhs(std::move(r)), y0(y0_), w0(w0_), w0p(w0p_), steps(n) {}
    OdeRhs rhs;
    Real y0, w0, w0p;
    int steps;
    std::mutex mu;
    std::unordered_map<Real, Real> cache;
  };
  if (steps < 1) throw std::invalid_argument("ode_flow: steps < 1");
  auto st = std::make_shared<Flow>(OdeRhs(ode, values), y0, w0, w0p, steps);
  return [st](Real y) {
    {
      std::lock_guard<std::mutex> lock(st->mu);
      if (auto it = st->cache.find(y); it != st->cache.end()) return it->second;
    }
    const Real h = (y - st->y0) / st->steps;
    Real x = st->y0, w = st->w0, wp = st->w0p;
    for (int i = 0; i < st->steps && h != 0; ++i) {
      auto [k1w, k1p] = st->rhs(x, w, wp);
      auto [k2w, k2p] = st->rhs(x + h / 2, w + h / 2 * k1w, wp + h / 2 * k1p);
      auto [k3w, k3p] = st->rhs(x + h / 2, w + h / 2 * k2w, wp + h / 2 * k2p);
      auto [k4w, k4p] = st->rhs(x + h, w + h * k3w, wp + h * k3p);
      w += h / 6 * (k1w + 2 * k2w + 2 * k3w + k4w);
      wp += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
      x = st->y0 + (i + 1) * h;
    }
    std::lock_guard<std::mutex> lock(st->mu);
    st->cache.emplace(y, w);
    return w;
  };
}

}  // namespace liesym
