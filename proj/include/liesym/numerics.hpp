#pragma once

// Kummer functions, integration of the reduced linear ODEs, finite-difference
// residuals of candidate PDE solutions and the figure curves.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "liesym/eval.hpp"
#include "liesym/models.hpp"
#include "liesym/reduction.hpp"

namespace liesym {

class NumericsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Real = long double;

// Kummer functions ---------------------------------------------------------------

inline constexpr Real kKummerMaxAbsZ = 50;
inline constexpr int kKummerMaxTerms = 500;
inline constexpr Real kIntegerBShift = 1e-6L;

// M(a, b, z) by its power series (compensated sum), with Kummer's
// transformation for z < 0. Throws for |z| > 50 and b in {0, -1, -2, ...}.
Real kummer_M(Real a, Real b, Real z);
// U(a, b, z), z > 0, from M by the connection formula. Integer b is shifted
// by kIntegerBShift; `shifted` reports when that happened.
Real kummer_U(Real a, Real b, Real z, bool* shifted = nullptr);

// Gauss-Legendre rule on [-1, 1].
struct Quadrature {
  std::vector<Real> nodes, weights;
};
const Quadrature& gauss_legendre(int n);
Real integrate_gl(const std::function<Real(Real)>& f, Real lo, Real hi, int n = 48);

// ODE integration ------------------------------------------------------------------

using Values = std::map<std::string, Real>;

struct SolutionMeta {
  std::string model;
  nlohmann::json params = nlohmann::json::object();
  Real kappa1 = 0, kappa2 = 0;
  std::pair<Real, Real> domain{0, 0};
  Real y0 = 0;
  Real tol = 0;
  std::string method = "dopri5";
  std::size_t steps = 0, rejected = 0;
  std::optional<Real> residual_max;
};

struct SolutionGrid {
  std::vector<Real> y, w, wp;
  SolutionMeta meta;
};

inline constexpr Real kDefaultTol = 1e-10L;
inline constexpr int kDefaultGridPoints = 401;

// Compiled a, b, c of a LinearODE2; symbols not bound by `values` must not
// remain after ode.params are substituted.
class OdeRhs {
 public:
  OdeRhs(const LinearODE2& ode, const Values& values = {});
  // (w, w') -> (w', w'')
  std::pair<Real, Real> operator()(Real y, Real w, Real wp) const;
  Real a(Real y) const;
  Real b(Real y) const;
  Real c(Real y) const;

 private:
  CompiledExpr<Real> a_, b_, c_;
};

// Dormand-Prince 5(4) with step control on tol (relative and absolute) and
// dense output sampled at `points` uniform nodes of the domain.
SolutionGrid solve_ode(const LinearODE2& ode, Real y0, Real w0, Real w0p, std::pair<Real, Real> domain,
                       Real tol = kDefaultTol, const Values& values = {}, int points = kDefaultGridPoints);

// w(y) as a smooth function of y: fixed-step RK4 from y0 with `steps` steps.
// Meant for finite differences of reconstructed solutions, where the
// piecewise dense output would add noise. Results are cached per y.
std::function<Real(Real)> ode_flow(const LinearODE2& ode, Real y0, Real w0, Real w0p, const Values& values = {},
                                   int steps = 4000);

// Residuals ------------------------------------------------------------------------

using Candidate = std::function<Real(std::span<const Real>)>;  // arguments in model variable order

struct Box {
  std::vector<std::pair<Real, Real>> ranges;  // one per independent variable
};

inline constexpr Real kFdRelStep = 1e-4L;
inline constexpr Real kInteriorMargin = 0.02L;
inline constexpr Real kMaxSkipFraction = 0.2L;
inline constexpr Real kResidualBound = 1e-6L;  // pass mark for reconstructed solutions

struct ResidualReport {
  Real max_abs_residual = 0;
  // |H| divided by the sum of the magnitudes of its terms.
  Real max_rel_residual = 0;
  std::vector<Real> values;
  std::vector<std::vector<Real>> points;
  std::vector<Real> steps;  // h per variable (coarse step of the Richardson pair)
  std::size_t skipped = 0;
  std::vector<std::string> log;
};

nlohmann::json to_json(const ResidualReport& r);

// Central differences with h = kFdRelStep * range width, one Richardson
// extrapolation (h, h/2), at Halton points with a seeded random shift.
ResidualReport residual_check(const PDEModel& model, const Candidate& u, const Box& box, int n_points,
                              std::uint64_t seed = 1, const Values& values = {});

// u = S^kappa2 e^{kappa1 t} w(y) with w from ode_flow, scaled by `norm`.
Candidate reconstruct(std::function<Real(Real)> w, Real kappa1, Real kappa2, Real norm = 1);

// Closed form evaluated with M, U and, when needed, phi(t) obtained by
// quadrature of its first-order equation from t_ref (phi(t_ref) = phi0).
Candidate closed_form_candidate(const ClosedFormSolution& cf, const Values& values, Real t_ref = 1);

// Figures --------------------------------------------------------------------------

struct FigureCurve {
  int figure = 0;
  int index = 0;  // 1-based within the figure
  std::string label;
  SolutionGrid grid;
  ResidualReport residual;
};

struct FigureOptions {
  Real tol = kDefaultTol;
  std::uint64_t seed = 1;
  int residual_points = 20;
  unsigned threads = 0;  // 0: LIE_REDUCE_THREADS or hardware concurrency
};

inline constexpr Real kHestonC1 = -1;  // only the ratio c2/c1 enters the figure grids

std::vector<FigureCurve> figure_data(int figure, const FigureOptions& opts = {});
std::string to_csv(const FigureCurve& c);
unsigned worker_threads(unsigned requested = 0);

}  // namespace liesym
