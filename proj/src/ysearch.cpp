#include "varlab/ysearch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

#include "varlab/errors.hpp"

namespace varlab {

const char* to_string(AscentOutcome outcome) {
  switch (outcome) {
    case AscentOutcome::tie_found: return "tie_found";
    case AscentOutcome::no_multiplication: return "no_multiplication_detected";
    case AscentOutcome::schedule_exhausted: return "schedule_exhausted";
  }
  return "schedule_exhausted";
}

ValueFunctionResult value_function(const FunctionalOracle& J, double lambda, const Vector& y,
                                   const MultistartOptions& options, const SolverTolerances& tol) {
  MultistartOptions opts = options;
  opts.extra_starts.push_back(J.space->zero());
  ValueFunctionResult out;
  out.report = find_global_minima(J, EnergyParams{lambda, y}, opts, tol);
  out.value = out.report.points.front().energy;
  for (const CriticalPoint& cp : out.report.points) {
    if (cp.kind == PointKind::global_min) out.minimizers.push_back(cp);
  }
  return out;
}

namespace {

const CriticalPoint& smallest_norm(const Space& X, const std::vector<CriticalPoint>& points) {
  return *std::min_element(points.begin(), points.end(), [&](const CriticalPoint& a, const CriticalPoint& b) {
    return X.norm(a.x) < X.norm(b.x);
  });
}

struct Probe {
  Vector y;
  ValueFunctionResult vf;
};

class Ascent {
 public:
  Ascent(const FunctionalOracle& J, double lambda, const ConvexSetSpec& C, const AscentOptions& options,
         const SolverTolerances& tol)
      : J_(J), X_(*J.space), lambda_(lambda), C_(C), options_(options), tol_(tol) {}

  Probe evaluate(const Vector& y, const std::vector<CriticalPoint>& hints) const {
    MultistartOptions inner = options_.inner;
    for (const CriticalPoint& h : hints) inner.extra_starts.push_back(h.x);
    return {y, value_function(J_, lambda_, y, inner, tol_)};
  }

  Vector supergradient(const Probe& p) const { return -smallest_norm(X_, p.vf.minimizers).x; }

  double gradient_mapping(const Probe& p) const {
    Vector trial = p.y + supergradient(p);
    return X_.distance(p.y, C_.project(trial));
  }

  double slack(const Probe& p) const { return tol_.cluster_energy_tol(p.vf.value); }

  // Looks for a crossing of the two branch energies on the segment [a.y, b.y].
  // Returns the confirmed tie point if there is one.
  std::optional<Probe> refine_tie(const Probe& a, const Probe& b, std::size_t& refinements) const {
    const CriticalPoint& xa = a.vf.minimizers.front();
    const CriticalPoint& xb = b.vf.minimizers.front();
    const EnergyParams pb{lambda_, b.y};
    const CriticalPoint a_at_b = local_descend(J_, pb, xa.x, tol_);
    if (!a_at_b.converged || X_.distance(a_at_b.x, xb.x) <= tol_.cluster_dist_tol) return std::nullopt;

    const Vector direction = b.y - a.y;
    auto branch_gap = [&](double t, Vector* branch_a = nullptr, Vector* branch_b = nullptr) {
      Vector yt = a.y;
      yt.axpy(t, direction);
      const EnergyParams pt{lambda_, yt};
      const CriticalPoint ca = local_descend(J_, pt, xa.x, tol_);
      const CriticalPoint cb = local_descend(J_, pt, xb.x, tol_);
      if (branch_a) *branch_a = ca.x;
      if (branch_b) *branch_b = cb.x;
      return ca.energy - cb.energy;
    };
    const double d0 = branch_gap(0.0);
    const double d1 = branch_gap(1.0);
    if (!(d0 < 0.0 && d1 > 0.0)) return std::nullopt;

    ++refinements;
    std::uintmax_t max_iter = 200;
    const double bracket_tol = options_.tie_bracket_tol;
    const auto root = boost::math::tools::toms748_solve(
        [&](double t) { return branch_gap(t); }, 0.0, 1.0, d0, d1,
        [bracket_tol](double lo, double hi) { return hi - lo <= bracket_tol; }, max_iter);
    const double g_lo = std::abs(branch_gap(root.first));
    const double g_hi = std::abs(branch_gap(root.second));
    const double t_star = g_lo <= g_hi ? root.first : root.second;

    Vector branch_a;
    Vector branch_b;
    branch_gap(t_star, &branch_a, &branch_b);
    Vector y_star = a.y;
    y_star.axpy(t_star, direction);
    if (!C_.contains(y_star)) y_star = C_.project(y_star);

    MultistartOptions inner = options_.inner;
    inner.extra_starts.push_back(branch_a);
    inner.extra_starts.push_back(branch_b);
    Probe confirmed{y_star, value_function(J_, lambda_, y_star, inner, tol_)};
    if (confirmed.vf.minimizers.size() >= 2) return confirmed;
    return std::nullopt;
  }

 private:
  const FunctionalOracle& J_;
  const Space& X_;
  double lambda_;
  const ConvexSetSpec& C_;
  const AscentOptions& options_;
  const SolverTolerances& tol_;
};

}  // namespace

AscentResult ascend_to_tilde_y(const FunctionalOracle& J, double lambda, const ConvexSetSpec& C, const Vector& y0,
                               const AscentOptions& options, const SolverTolerances& tol) {
  const Space& X = *J.space;
  X.check(y0);
  require(C.space()->id() == X.id(), "convex set lives on a different space");
  require(C.contains(y0), "ascent start y0 must lie in C");

  Ascent ascent(J, lambda, C, options, tol);
  AscentResult result;
  Probe current = ascent.evaluate(y0, {});

  auto finish = [&](AscentOutcome outcome, Probe& p) {
    result.outcome = outcome;
    result.tilde_y = p.y;
    result.value = p.vf.value;
    result.report = std::move(p.vf.report);
    return std::move(result);
  };
  auto record = [&](std::size_t k, const Probe& p, double step, double gnorm) {
    result.trace.push_back({k, X.norm(p.y), p.vf.value, p.vf.minimizers.size(), step, gnorm});
  };

  double s0 = options.s0.value_or(0.0);
  if (!options.s0) {
    // One-time line probe over 1, 1/2, 1/4, ...
    const Vector g = ascent.supergradient(current);
    double s = 1.0;
    s0 = std::ldexp(1.0, -static_cast<int>(options.max_halvings));
    for (std::size_t i = 0; i < options.max_halvings; ++i, s *= 0.5) {
      Vector trial = current.y;
      trial.axpy(s, g);
      const Probe probe = ascent.evaluate(C.project(trial), current.vf.minimizers);
      if (probe.vf.value >= current.vf.value - ascent.slack(current)) {
        s0 = s;
        break;
      }
    }
  }

  for (std::size_t k = 0; k < options.max_steps; ++k) {
    const double gnorm = ascent.gradient_mapping(current);
    const double step = s0 / std::sqrt(static_cast<double>(k + 1));
    record(k, current, step, gnorm);
    if (current.vf.minimizers.size() >= 2) return finish(AscentOutcome::tie_found, current);
    if (gnorm <= options.grad_tol) return finish(AscentOutcome::no_multiplication, current);

    const Vector g = ascent.supergradient(current);
    bool accepted = false;
    double s = step;
    for (std::size_t h = 0; h <= options.max_halvings; ++h, s *= 0.5) {
      Vector trial = current.y;
      trial.axpy(s, g);
      trial = C.project(trial);
      if (X.distance(trial, current.y) == 0.0) break;
      Probe next = ascent.evaluate(trial, current.vf.minimizers);
      if (next.vf.minimizers.size() < 2) {
        if (auto tie = ascent.refine_tie(current, next, result.root_refinements)) {
          record(k + 1, *tie, s, ascent.gradient_mapping(*tie));
          return finish(AscentOutcome::tie_found, *tie);
        }
      }
      if (next.vf.value >= current.vf.value - ascent.slack(current)) {
        current = std::move(next);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return finish(AscentOutcome::schedule_exhausted, current);
}

ConcavityAudit concavity_audit(const FunctionalOracle& J, double lambda, const std::vector<ConcavityTriple>& triples,
                               const MultistartOptions& options, const SolverTolerances& tol,
                               std::optional<double> slack) {
  ConcavityAudit audit;
  const Space& X = *J.space;
  for (const ConcavityTriple& triple : triples) {
    const ValueFunctionResult v1 = value_function(J, lambda, triple.y1, options, tol);
    const ValueFunctionResult v2 = value_function(J, lambda, triple.y2, options, tol);
    const double s = slack.value_or(10.0 * tol.cluster_energy_tol(std::min(v1.value, v2.value)));
    audit.slack = std::max(audit.slack, s);
    MultistartOptions mixed = options;
    for (const auto* vf : {&v1, &v2}) {
      for (const CriticalPoint& cp : vf->minimizers) mixed.extra_starts.push_back(cp.x);
    }
    for (double t : triple.t_grid) {
      require(t >= 0.0 && t <= 1.0, "concavity audit weights must lie in [0, 1]");
      Vector y = (1.0 - t) * Vector(triple.y2);
      y.axpy(t, triple.y1);
      X.check(y);
      ConcavityRow row;
      row.t = t;
      row.v_mix = value_function(J, lambda, y, mixed, tol).value;
      row.chord = t * v1.value + (1.0 - t) * v2.value;
      row.pass = row.v_mix >= row.chord - s;
      if (!row.pass) ++audit.violations;
      audit.rows.push_back(row);
    }
  }
  return audit;
}

StrictInequalityWitness strict_inequality_witness(const FunctionalOracle& J, double lambda,
                                                  const std::vector<CriticalPoint>& minimizers,
                                                  const std::vector<Vector>& y_samples,
                                                  const MultistartOptions& options, const SolverTolerances& tol) {
  require(!minimizers.empty() && !y_samples.empty(), "strict inequality witness needs minimizers and samples");
  StrictInequalityWitness w;
  w.sup_inf = -std::numeric_limits<double>::infinity();
  MultistartOptions opts = options;
  for (const CriticalPoint& cp : minimizers) opts.extra_starts.push_back(cp.x);
  for (const Vector& y : y_samples) w.sup_inf = std::max(w.sup_inf, value_function(J, lambda, y, opts, tol).value);
  w.inf_sup = std::numeric_limits<double>::infinity();
  for (const CriticalPoint& cp : minimizers) {
    double sup = -std::numeric_limits<double>::infinity();
    for (const Vector& y : y_samples) sup = std::max(sup, energy(J, EnergyParams{lambda, y}, cp.x));
    w.inf_sup = std::min(w.inf_sup, sup);
  }
  w.strict = w.sup_inf < w.inf_sup;
  return w;
}

}  // namespace varlab
