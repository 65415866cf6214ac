#include <cmath>
#include <random>
#include <sstream>

#include "liesym/numerics.hpp"

namespace liesym {

namespace {

Real radical_inverse(unsigned base, std::uint64_t i) {
  Real f = 1, r = 0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<Real>(i % base);
    i /= base;
  }
  return r;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};

// Which derivative a jet symbol stands for: (-1,-1) for u, (i,-1) for u_i.
struct JetIndex {
  int i = -1, j = -1;
};

std::string point_text(const std::vector<Real>& x) {
  std::ostringstream os;
  os << "(";
  for (std::size_t k = 0; k < x.size(); ++k) os << (k ? ", " : "") << static_cast<double>(x[k]);
  os << ")";
  return os.str();
}

}  // namespace

nlohmann::json to_json(const ResidualReport& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (std::size_t k = 0; k < r.points.size(); ++k) {
    std::vector<double> x(r.points[k].begin(), r.points[k].end());
    pts.push_back({{"point", x}, {"residual", static_cast<double>(r.values[k])}});
  }
  std::vector<double> h(r.steps.begin(), r.steps.end());
  return {{"max_abs_residual", static_cast<double>(r.max_abs_residual)},
          {"max_rel_residual", static_cast<double>(r.max_rel_residual)},
          {"steps", h},
          {"skipped", r.skipped},
          {"points", pts},
          {"log", r.log}};
}

ResidualReport residual_check(const PDEModel& model, const Candidate& u, const Box& box, int n_points,
                              std::uint64_t seed, const Values& values) {
  const JetSpace& js = model.pde.space;
  const std::size_t d = js.dimension();
  if (box.ranges.size() != d) throw std::invalid_argument("residual_check: box dimension does not match the model");
  if (n_points < 1) throw std::invalid_argument("residual_check: need at least one point");
  if (d > std::size(kPrimes)) throw std::invalid_argument("residual_check: too many variables");

  // H = sum_k coef_k(x) * jet_k.
  struct Piece {
    JetIndex jet;
    CompiledExpr<Real> coef;
  };
  std::vector<Piece> pieces;
  std::map<std::string, JetIndex> jets{{js.dependent(), {}}};
  for (std::size_t i = 0; i < d; ++i) {
    jets[js.first(i)] = {static_cast<int>(i), -1};
    for (std::size_t j = i; j < d; ++j) jets[js.second(i, j)] = {static_cast<int>(i), static_cast<int>(j)};
  }
  for (const auto& [key, coeff] : collect(model.pde.equation, js.fiber())) {
    auto name = key.symbol_name();
    if (!name || !jets.count(*name)) {
      if (is_zero(coeff)) continue;
      throw std::invalid_argument("residual_check: equation is not linear homogeneous");
    }
    pieces.push_back({jets.at(*name), CompiledExpr<Real>(coeff, js.independent(), values)});
  }

  ResidualReport rep;
  std::vector<Real> h(d);
  for (std::size_t i = 0; i < d; ++i) {
    const auto& [lo, hi] = box.ranges[i];
    if (!(lo < hi)) throw std::invalid_argument("residual_check: empty range");
    h[i] = kFdRelStep * (hi - lo);
  }
  rep.steps = h;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Real> shift(d);
  for (auto& s : shift) s = unif(rng);

  auto at = [&](std::vector<Real> x, std::size_t i, Real di, std::size_t j = 0, Real dj = 0) {
    x[i] += di;
    if (dj != 0) x[j] += dj;
    Real v = u(x);
    if (!std::isfinite(v)) throw NumericsError("candidate is not finite");
    return v;
  };
  auto derivative = [&](const std::vector<Real>& x, JetIndex jt, Real scale) -> Real {
    if (jt.i < 0) return u(x);
    const auto i = static_cast<std::size_t>(jt.i);
    const Real hi = h[i] * scale;
    if (jt.j < 0) return (at(x, i, hi) - at(x, i, -hi)) / (2 * hi);
    const auto j = static_cast<std::size_t>(jt.j);
    if (i == j) return (at(x, i, hi) - 2 * u(x) + at(x, i, -hi)) / (hi * hi);
    const Real hj = h[j] * scale;
    return (at(x, i, hi, j, hj) - at(x, i, hi, j, -hj) - at(x, i, -hi, j, hj) + at(x, i, -hi, j, -hj)) / (4 * hi * hj);
  };

  for (int k = 1; k <= n_points; ++k) {
    std::vector<Real> x(d);
    for (std::size_t i = 0; i < d; ++i) {
      Real q = radical_inverse(kPrimes[i], static_cast<std::uint64_t>(k)) + shift[i];
      q -= std::floor(q);
      const auto& [lo, hi] = box.ranges[i];
      Real w = hi - lo;
      x[i] = lo + kInteriorMargin * w + q * (1 - 2 * kInteriorMargin) * w;
    }
    try {
      Real H = 0, mag = 0;
      for (const auto& p : pieces) {
        Real d1 = derivative(x, p.jet, 1), d2 = derivative(x, p.jet, 0.5L);
        Real jet = p.jet.i < 0 ? d1 : (4 * d2 - d1) / 3;
        Real term = p.coef(std::span<const Real>(x)) * jet;
        H += term;
        mag += std::fabs(term);
      }
      if (!std::isfinite(H)) throw NumericsError("residual is not finite");
      Real rel = mag > 0 ? std::fabs(H) / mag : std::fabs(H);
      rep.values.push_back(std::fabs(H));
      rep.points.push_back(x);
      rep.max_abs_residual = std::max(rep.max_abs_residual, std::fabs(H));
      rep.max_rel_residual = std::max(rep.max_rel_residual, rel);
    } catch (const std::exception& e) {
      ++rep.skipped;
      rep.log.push_back("skipped " + point_text(x) + ": " + e.what());
    }
  }
  if (static_cast<Real>(rep.skipped) > kMaxSkipFraction * n_points)
    throw NumericsError("residual_check: " + std::to_string(rep.skipped) + " of " + std::to_string(n_points) +
                        " points could not be evaluated" + (rep.log.empty() ? "" : "; first: " + rep.log.front()));
  return rep;
}

Candidate reconstruct(std::function<Real(Real)> w, Real kappa1, Real kappa2, Real norm) {
  return [w = std::move(w), kappa1, kappa2, norm](std::span<const Real> x) {
    return norm * std::pow(x[1], kappa2) * std::exp(kappa1 * x[0]) * w(x[2]);
  };
}

Candidate closed_form_candidate(const ClosedFormSolution& cf, const Values& values, Real t_ref) {
  FunctionTable<Real> fns;
  auto plain = [](const char* name, std::span<const int> orders) {
    for (int o : orders)
      if (o != 0) throw NumericsError(std::string("no derivative binding for ") + name);
  };
  fns["M"] = [plain](std::span<const Real> a, std::span<const int> o) {
    plain("M", o);
    return kummer_M(a[0], a[1], a[2]);
  };
  fns["U"] = [plain](std::span<const Real> a, std::span<const int> o) {
    plain("U", o);
    return kummer_U(a[0], a[1], a[2]);
  };
  if (contains_function(cf.value, "phi")) {
    if (!cf.phi_ode) throw std::invalid_argument("closed form " + cf.label + " has phi(t) but no equation for it");
    auto rate = std::make_shared<CompiledExpr<Real>>(-cf.phi_ode->q / cf.phi_ode->p, std::vector<std::string>{"t"},
                                                     values);
    auto it = values.find("phi0");
    Real phi0 = it == values.end() ? 1 : it->second;
    fns["phi"] = [rate, phi0, t_ref, plain](std::span<const Real> a, std::span<const int> o) {
      plain("phi", o);
      auto g = [&](Real s) { return (*rate)({s}); };
      return phi0 * std::exp(integrate_gl(g, t_ref, a[0], 64));
    };
  }
  auto compiled = std::make_shared<CompiledExpr<Real>>(cf.value, std::vector<std::string>{"t", "S", "y"}, values, fns);
  return [compiled](std::span<const Real> x) { return (*compiled)(x); };
}

}  // namespace liesym
