#pragma once

#include <optional>
#include <vector>

#include "varlab/convex.hpp"
#include "varlab/solve.hpp"

namespace varlab {

struct ValueFunctionResult {
  double value = 0.0;                   // v(y) = inf_x Phi_{lambda,y}(x)
  std::vector<CriticalPoint> minimizers; // every tied global minimizer
  SolveReport report;
};

// Admissibility of lambda is the caller's responsibility; the origin is always
// among the starts so value <= 0 whenever that start converges.
ValueFunctionResult value_function(const FunctionalOracle& J, double lambda, const Vector& y,
                                   const MultistartOptions& options, const SolverTolerances& tol);

enum class AscentOutcome { tie_found, no_multiplication, schedule_exhausted };

const char* to_string(AscentOutcome outcome);

struct AscentOptions {
  std::size_t max_steps = 200;
  // Stop without a tie once |y - P_C(y - x*)| falls below this.
  double grad_tol = 1e-7;
  // Initial step; probed over 1, 1/2, 1/4, ... when absent.
  std::optional<double> s0;
  std::size_t max_halvings = 40;
  // Root-finding tolerance on the bracketing segment parameter.
  double tie_bracket_tol = 1e-14;
  MultistartOptions inner;
};

struct AscentStep {
  std::size_t k = 0;
  double y_norm = 0.0;
  double value = 0.0;
  std::size_t minima_count = 0;
  double step = 0.0;
  double supergradient_norm = 0.0;
};

struct OuterAscentState {
  Vector y;
  double value = 0.0;
  std::vector<CriticalPoint> inner_minima;
  double supergradient_norm = 0.0;
};

struct AscentResult {
  AscentOutcome outcome = AscentOutcome::schedule_exhausted;
  Vector tilde_y;
  double value = 0.0;
  SolveReport report;  // inner solve at tilde_y
  std::vector<AscentStep> trace;
  std::size_t root_refinements = 0;
};

// Projected supergradient ascent of v over C. A supergradient of v at y is
// -x*(y) for an inner minimizer x*; the one of smallest norm is used. When
// the inner minimizer jumps between basins across a step, the crossing of
// the two branch energies along that segment is located by bracketing and
// then confirmed by a fresh multistart solve.
AscentResult ascend_to_tilde_y(const FunctionalOracle& J, double lambda, const ConvexSetSpec& C, const Vector& y0,
                               const AscentOptions& options, const SolverTolerances& tol);

struct ConcavityRow {
  double t = 0.0;
  double v_mix = 0.0;      // v(t y1 + (1-t) y2)
  double chord = 0.0;      // t v(y1) + (1-t) v(y2)
  bool pass = false;
};

struct ConcavityTriple {
  Vector y1;
  Vector y2;
  std::vector<double> t_grid;
};

struct ConcavityAudit {
  double slack = 0.0;
  std::vector<ConcavityRow> rows;
  std::size_t violations = 0;
  bool pass() const { return violations == 0; }
};

// Checks v(t y1 + (1-t) y2) >= t v(y1) + (1-t) v(y2) - slack; the slack is
// 10 * cluster_energy_tol unless given.
ConcavityAudit concavity_audit(const FunctionalOracle& J, double lambda, const std::vector<ConcavityTriple>& triples,
                               const MultistartOptions& options, const SolverTolerances& tol,
                               std::optional<double> slack = std::nullopt);

struct StrictInequalityWitness {
  double sup_inf = 0.0;  // max over sampled y of v(y)
  double inf_sup = 0.0;  // min over the minimizers x of max over sampled y of Phi_{lambda,y}(x)
  bool strict = false;
};

StrictInequalityWitness strict_inequality_witness(const FunctionalOracle& J, double lambda,
                                                  const std::vector<CriticalPoint>& minimizers,
                                                  const std::vector<Vector>& y_samples,
                                                  const MultistartOptions& options, const SolverTolerances& tol);

}  // namespace varlab
