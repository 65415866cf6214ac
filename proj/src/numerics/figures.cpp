#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <sstream>
#include <thread>

#include "liesym/numerics.hpp"

namespace liesym {

namespace {

constexpr Real kDomainLo = 0.05L, kDomainHi = 3, kAnchor = 1;

struct CurveSpec {
  std::string label;
  ModelId model;
  ModelParams params;
  Real kappa1, kappa2;
  LinearODE2 ode;
};

Expr num(const char* text) { return Expr(rational_from_string(text)); }

std::vector<CurveSpec> heston_specs(const char* kappa2, const std::vector<const char*>& ratios) {
  std::vector<CurveSpec> out;
  for (const char* beta : {"0.7", "-0.7"})
    for (int c2_sign : {-1, 1})
      for (const char* ratio : ratios) {
        ModelParams p;
        p.beta = num(beta);
        p.rho = num("0.5");
        p.r = num("0.5");
        p.c1 = Expr(rational_from_double(static_cast<double>(kHestonC1)));
        p.c2 = Expr(c2_sign) * num(ratio) * Expr(rational_from_double(std::fabs(static_cast<double>(kHestonC1))));
        std::string label = std::string("beta=") + beta + ", c2=" + (c2_sign < 0 ? "-" : "+") + ratio + "|c1|";
        out.push_back({label, ModelId::HestonTransformed, p, 1, std::stold(kappa2), {}});
      }
  return out;
}

std::vector<CurveSpec> stein_specs(const char* kappa2, const std::vector<const char*>& alphas) {
  std::vector<CurveSpec> out;
  for (const char* omega : {"0", "0.5", "-0.5", "alpha"})
    for (const char* alpha : alphas) {
      ModelParams p;
      p.alpha = num(alpha);
      Expr w = std::string(omega) == "alpha" ? *p.alpha : num(omega);
      // omega = alpha m - beta gamma0 with gamma0 = 0.
      p.m = w / *p.alpha;
      p.gamma0 = Expr(0);
      p.beta = num("0.5");
      p.r = num("0.5");
      p.rho = Expr(0);
      std::string label = std::string("omega=") + omega + ", alpha=" + alpha;
      out.push_back({label, ModelId::SteinStein, p, 1, std::stold(kappa2), {}});
    }
  return out;
}

std::string number_text(Real v) {
  std::ostringstream os;
  os << std::setprecision(12) << static_cast<double>(v);
  return os.str();
}

}  // namespace

unsigned worker_threads(unsigned requested) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LIE_REDUCE_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

std::vector<FigureCurve> figure_data(int figure, const FigureOptions& opts) {
  std::vector<CurveSpec> specs;
  switch (figure) {
    case 1:
      specs = heston_specs("0.5", {"5", "0.2", "1"});
      break;
    case 2:
      specs = heston_specs("1.01", {"3/2", "2/3", "1"});
      break;
    case 3:
      specs = stein_specs("0.5", {"0.1", "0.3", "0.4"});
      break;
    case 4:
      specs = stein_specs("1.01", {"1.1", "1.3", "1.4"});
      break;
    default:
      throw std::invalid_argument("figure must be 1, 2, 3 or 4");
  }
  // Symbolic work stays on this thread.
  std::vector<PDEModel> models;
  for (auto& s : specs) {
    Expr k1(rational_from_double(static_cast<double>(s.kappa1)));
    Expr k2(rational_from_double(static_cast<double>(s.kappa2)));
    s.ode = s.model == ModelId::SteinStein ? stein_reduce(s.params, k1, k2) : heston_reduce(s.params, k1, k2);
    models.push_back(build_model(s.model, s.params));
  }

  std::vector<FigureCurve> out(specs.size());
  std::vector<std::string> errors(specs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      try {
        const auto& s = specs[i];
        FigureCurve c;
        c.figure = figure;
        c.index = static_cast<int>(i) + 1;
        c.label = s.label;
        c.grid = solve_ode(s.ode, kAnchor, 1, 0, {kDomainLo, kDomainHi}, opts.tol);
        c.grid.meta.model = model_name(s.model);
        c.grid.meta.params = to_json(s.params);
        c.grid.meta.kappa1 = s.kappa1;
        c.grid.meta.kappa2 = s.kappa2;
        Real norm = 0;
        for (Real w : c.grid.w) norm = std::max(norm, std::fabs(w));
        auto u = reconstruct(ode_flow(s.ode, kAnchor, 1, 0), s.kappa1, s.kappa2, 1 / norm);
        Box box{{{0, 1}, {0.5L, 2}, {kDomainLo, kDomainHi}}};
        c.residual = residual_check(models[i], u, box, opts.residual_points, opts.seed + i);
        c.grid.meta.residual_max = c.residual.max_abs_residual;
        out[i] = std::move(c);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  unsigned n = std::min<unsigned>(worker_threads(opts.threads), static_cast<unsigned>(specs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty()) throw NumericsError("figure " + std::to_string(figure) + " curve " + std::to_string(i + 1) +
                                                ": " + errors[i]);
  return out;
}

std::string to_csv(const FigureCurve& c) {
  const auto& m = c.grid.meta;
  std::string params;
  for (const auto& [k, v] : m.params.items()) {
    if (!params.empty()) params += ";";
    params += k + ":" + (v.is_string() ? v.get<std::string>() : v.dump());
  }
  std::ostringstream os;
  os << "# model=" << m.model << ", params=" << params << ", kappa1=" << number_text(m.kappa1)
     << ", kappa2=" << number_text(m.kappa2) << ", tol=" << number_text(m.tol)
     << ", residual_max=" << (m.residual_max ? number_text(*m.residual_max) : std::string("na")) << "\n";
  os << "# curve=" << c.label << "\n";
  os << "y,w,wprime\n";
  os << std::setprecision(17);
  for (std::size_t k = 0; k < c.grid.y.size(); ++k)
    os << static_cast<double>(c.grid.y[k]) << "," << static_cast<double>(c.grid.w[k]) << ","
       << static_cast<double>(c.grid.wp[k]) << "\n";
  return os.str();
}

}  // namespace liesym
