#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "varlab/random.hpp"

namespace varlab::decomposable {

using Point = std::vector<double>;  // an element of E = R^d

struct MeasurePartition {
  std::vector<double> weights;

  static MeasurePartition uniform(std::size_t n, double total_mass = 1.0);
  explicit MeasurePartition(std::vector<double> w);
  MeasurePartition() = default;

  std::size_t size() const { return weights.size(); }
  double total_mass() const;
  // Splits every cell into two halves of equal weight; cell i becomes 2i, 2i+1.
  MeasurePartition refine() const;
};

struct SimpleFunction {
  std::vector<Point> values;  // one per cell

  std::size_t size() const { return values.size(); }
  std::size_t dim() const { return values.empty() ? 0 : values.front().size(); }
  static SimpleFunction constant(std::size_t n, Point c);
  // Cell i of the refined partition takes the value of cell i/2.
  SimpleFunction refine() const;
  SimpleFunction negated() const;
  double max_norm() const;
};

double norm(const Point& x);

// X_h = { u : |u_i| <= h_i }. An infinite bound leaves the cell unconstrained.
struct DecomposableSetSpec {
  std::vector<double> h;
  bool symmetric = true;

  static DecomposableSetSpec unbounded(std::size_t n);
  bool contains(const SimpleFunction& u) const;
  bool contains_constants() const;
};

// Family {X_h} is filtering when every pair of bounds is dominated by a member.
bool bounds_family_is_filtering(const std::vector<std::vector<double>>& bounds);

struct T16Functionals {
  std::string label;
  std::size_t dim = 1;
  std::function<double(const Point&)> f;               // even, no global minimum
  std::function<double(std::size_t, const Point&)> g;  // odd in the point
  double p = 1.0;
  double lipschitz_f = 1.0;
  double lipschitz_g = 1.0;
  double inf_f = 0.0;  // not attained
};

// "inverse": f(x) = 1/(1+|x|); "exp": f(x) = exp(-|x|). Both use g(t, x) = x_1.
T16Functionals catalog_functionals(const std::string& name, std::size_t dim = 1);
const std::vector<std::string>& catalog_names();

struct HypothesisCheck {
  double parity_f = 0.0;  // max |f(x) - f(-x)|
  double parity_g = 0.0;  // max |g(t,x) + g(t,-x)|
  double growth = 0.0;    // max |f(x)| / (1 + |x|^p)
  bool pass() const { return parity_f == 0.0 && parity_g == 0.0 && std::isfinite(growth); }
};

HypothesisCheck check_hypotheses(const T16Functionals& F, std::size_t cells, std::size_t samples, Rng& rng);

double integral_f(const MeasurePartition& P, const T16Functionals& F, const SimpleFunction& u);
double integral_g(const MeasurePartition& P, const T16Functionals& F, const SimpleFunction& u);
// sum w_i f(u_i) + (sum w_i g(i, u_i))^2
double eval_J16(const MeasurePartition& P, const T16Functionals& F, const SimpleFunction& u);

// w_i = u_i on the listed cells, v_i elsewhere.
SimpleFunction mix(const SimpleFunction& u, const SimpleFunction& v, const std::vector<std::size_t>& cells);

struct DescentOptions {
  double strict_margin = 1e-12;
  std::size_t max_rounds = 8;  // magnitude schedule repetitions before giving up
};

// Produces v in X with J(v) < J(u) - strict_margin: cells are split into two
// groups of balanced weight carrying +R1 e_1 and -R2 e_1 with the g-integral
// cancelled and R1, R2 >= 10 (1 + max|u_i|) - 1. Throws descent_blocked when
// the bounds cap the magnitudes or no decrease is found.
SimpleFunction descent_oracle(const MeasurePartition& P, const T16Functionals& F, const SimpleFunction& u,
                              const DecomposableSetSpec& X, const DescentOptions& options = {});

struct DescentTraceRow {
  std::size_t k = 0;
  double J = 0.0;
  double phi = 0.0;  // g-integral
  double max_norm = 0.0;
};

std::vector<DescentTraceRow> iterate_descent(const MeasurePartition& P, const T16Functionals& F, SimpleFunction u0,
                                             const DecomposableSetSpec& X, std::size_t steps,
                                             const DescentOptions& options = {});

struct MinimaxCheckOptions {
  std::size_t grid_points = 201;   // per axis and cell
  double lambda_tol = 1e-12;       // golden-section bracket on Lambda_h
  double max_gap = 0.1;            // larger sampling gaps are inconclusive
};

struct MinimaxCheck {
  double lhs = 0.0;  // sup_lambda inf_u (I + 2 lambda Phi - lambda^2)
  double rhs = 0.0;  // inf_u sup_lambda (...)
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  double lhs_argmax = 0.0;
  double sampling_gap = 0.0;
  std::size_t samples = 0;
  bool inconclusive = false;
  bool pass = false;  // |lhs - rhs| <= sampling_gap and not inconclusive
};

// Sampled audit on a product grid of X_h (finite bounds). Lambda_h is the
// range of the sampled g-integral.
MinimaxCheck lambda_interval_minimax_check(const MeasurePartition& P, const T16Functionals& F,
                                           const DecomposableSetSpec& X, const MinimaxCheckOptions& options = {});

// Minimum of J over the same product grid.
double sampled_infimum(const MeasurePartition& P, const T16Functionals& F, const DecomposableSetSpec& X,
                       std::size_t grid_points);

struct NoMinRow {
  double J_candidate = 0.0;
  double J_descended = 0.0;
  double margin = 0.0;
  bool phi_zero = false;  // first necessary condition on a minimizer
  bool beaten = false;
};

struct NoMinReport {
  std::vector<NoMinRow> rows;
  // No cell value can minimize f: f exceeds inf_f at every sample and keeps
  // decreasing along rays.
  bool per_cell_min_unsatisfiable = false;
  std::size_t alarms = 0;
};

// Requires X symmetric, decomposable and containing the constants (checked);
// otherwise throws hypothesis_violated.
NoMinReport no_min_audit(const MeasurePartition& P, const T16Functionals& F, const DecomposableSetSpec& X,
                         const std::vector<SimpleFunction>& candidates, Rng& rng, const DescentOptions& options = {});

}  // namespace varlab::decomposable
