#include "varlab/solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "varlab/errors.hpp"
#include "varlab/parallel.hpp"
#include "varlab/random.hpp"

namespace varlab {

const char* to_string(PointKind kind) {
  switch (kind) {
    case PointKind::global_min: return "global_min";
    case PointKind::mountain_pass: return "mountain_pass";
    case PointKind::other: return "other";
  }
  return "other";
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Allowance for energy comparisons that are at the level of rounding.
double rounding_slack(double e) { return 16.0 * kEps * (1.0 + std::abs(e)); }

Eigen::Map<const Eigen::VectorXd> as_eigen(const Vector& v) {
  return {v.coords().data(), static_cast<Eigen::Index>(v.size())};
}

Eigen::Map<Eigen::VectorXd> as_eigen(Vector& v) { return {v.coords().data(), static_cast<Eigen::Index>(v.size())}; }

// Newton iterations on grad Phi that only accept residual reductions. Used to
// tighten converged descent and path iterates.
struct NewtonOutcome {
  Vector x;
  double residual;
  std::size_t steps;
};

NewtonOutcome newton_refine(const FunctionalOracle& J, const EnergyParams& p, Vector x, double target,
                            std::size_t max_steps, bool require_energy_decrease) {
  const Space& X = *J.space;
  Vector g = energy_gradient(J, p, x);
  double r = X.norm(g);
  double e = energy(J, p, x);
  std::size_t steps = 0;
  for (; steps < max_steps && r > target; ++steps) {
    const Eigen::MatrixXd jac = gradient_jacobian(J, p, x);
    const Eigen::VectorXd delta = jac.fullPivLu().solve(-as_eigen(g));
    if (!delta.allFinite()) break;
    Vector trial = x;
    as_eigen(trial) += delta;
    const Vector g_trial = energy_gradient(J, p, trial);
    const double r_trial = X.norm(g_trial);
    const double e_trial = energy(J, p, trial);
    if (!(r_trial < r)) break;
    if (require_energy_decrease && e_trial > e + rounding_slack(e)) break;
    x = std::move(trial);
    g = g_trial;
    r = r_trial;
    e = e_trial;
  }
  return {std::move(x), r, steps};
}

CriticalPoint make_point(const FunctionalOracle& J, const EnergyParams& p, Vector x) {
  CriticalPoint cp;
  cp.energy = energy(J, p, x);
  cp.residual = J.space->norm(energy_gradient(J, p, x));
  cp.x = std::move(x);
  return cp;
}

}  // namespace

Eigen::MatrixXd gradient_jacobian(const FunctionalOracle& J, const EnergyParams& p, const Vector& x) {
  const std::size_t n = x.size();
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Vector probe = x;
  for (std::size_t j = 0; j < n; ++j) {
    const double step = 1e-6 * std::max(1.0, std::abs(x[j]));
    const double saved = probe[j];
    probe[j] = saved + step;
    const Vector plus = energy_gradient(J, p, probe);
    probe[j] = saved - step;
    const Vector minus = energy_gradient(J, p, probe);
    probe[j] = saved;
    jac.col(static_cast<Eigen::Index>(j)) = (as_eigen(plus) - as_eigen(minus)) / (2.0 * step);
  }
  return jac;
}

Eigen::VectorXd energy_hessian_eigenvalues(const FunctionalOracle& J, const EnergyParams& p, const Vector& x) {
  const Space& X = *J.space;
  const Eigen::MatrixXd jac = gradient_jacobian(J, p, x);
  Eigen::MatrixXd hess(jac.rows(), jac.cols());
  for (Eigen::Index j = 0; j < jac.cols(); ++j) {
    Vector col = X.zero();
    as_eigen(col) = jac.col(j);
    hess.col(j) = as_eigen(X.gram(col));
  }
  const Eigen::MatrixXd sym = 0.5 * (hess + hess.transpose());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym, Eigen::EigenvaluesOnly).eigenvalues();
}

CriticalPoint local_descend(const FunctionalOracle& J, const EnergyParams& p, const Vector& x0,
                            const SolverTolerances& tol, std::vector<double>* energy_trace) {
  const Space& X = *J.space;
  X.check(x0);
  require(x0.all_finite(), "local_descend: start point has non-finite entries");

  Vector x = x0;
  double e = energy(J, p, x);
  Vector g = energy_gradient(J, p, x);
  double r = X.norm(g);
  if (energy_trace) energy_trace->push_back(e);

  std::size_t it = 0;
  double step = 1.0;
  bool stalled = false;
  while (r > tol.residual_tol && it < tol.max_iterations) {
    const double r2 = r * r;
    Vector trial = x;
    double e_trial = 0.0;
    bool accepted = false;
    while (step > 1e-16) {
      trial = x;
      trial.axpy(-step, g);
      e_trial = energy(J, p, trial);
      if (std::isfinite(e_trial) && e_trial <= e - 1e-4 * step * r2 + rounding_slack(e)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      stalled = true;
      break;
    }
    Vector g_trial = energy_gradient(J, p, trial);
    // Barzilai-Borwein step for the next trial.
    Vector dx = trial - x;
    Vector dg = g_trial - g;
    const double curvature = X.inner(dx, dg);
    step = curvature > 0.0 ? std::clamp(X.norm_squared(dx) / curvature, 1e-10, 1e10) : 1.0;

    x = std::move(trial);
    g = std::move(g_trial);
    e = e_trial;
    r = X.norm(g);
    ++it;
    if (energy_trace) energy_trace->push_back(e);
  }

  const double polish_target = 1e-3 * tol.residual_tol;
  if (r > polish_target && x.size() <= tol.newton_max_dim && (r <= tol.residual_tol || stalled || r < 1e3 * tol.residual_tol)) {
    NewtonOutcome polished = newton_refine(J, p, std::move(x), polish_target, 6, true);
    x = std::move(polished.x);
    if (polished.steps > 0) {
      e = energy(J, p, x);
      if (energy_trace) energy_trace->push_back(e);
    }
    r = polished.residual;
  }

  CriticalPoint cp;
  cp.x = std::move(x);
  cp.energy = e;
  cp.residual = r;
  cp.iterations = it;
  cp.converged = r <= tol.residual_tol;
  cp.kind = PointKind::other;
  return cp;
}

namespace {

Vector random_start(const Space& X, double radius, Rng& rng, bool smooth) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Vector v = X.zero();
  for (double& c : v.coords()) c = normal(rng);
  if (smooth && X.kind() != Space::Kind::euclidean) v = X.riesz(v);
  const double n = X.norm(v);
  if (n > 0.0) v *= radius * std::pow(uniform(rng), 1.0 / static_cast<double>(X.dim())) / n;
  return v;
}

}  // namespace

SolveReport find_global_minima(const FunctionalOracle& J, const EnergyParams& p, const MultistartOptions& options,
                               const SolverTolerances& tol) {
  const Space& X = *J.space;
  X.check(p.y);
  SolveReport report;
  report.lambda = p.lambda;
  report.y = p.y;

  double radius = 0.0;
  if (options.ball_radius) {
    radius = *options.ball_radius;
  } else {
    const auto sweep = coercivity_sweep(J, p, options.sweep_r0, options.sweep_levels, options.sweep_directions,
                                        options.seed);
    radius = start_ball_radius(sweep);
  }
  report.diagnostics.ball_radius = radius;

  std::vector<Vector> starts;
  for (std::size_t i = 0; i < options.n_starts; ++i) {
    Rng rng = make_stream(options.seed, i);
    starts.push_back(random_start(X, radius, rng, i % 2 == 1));
  }
  for (const Vector& extra : options.extra_starts) {
    X.check(extra);
    starts.push_back(extra);
  }

  std::vector<CriticalPoint> results(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) { results[i] = local_descend(J, p, starts[i], tol); });

  for (std::size_t i = 0; i < starts.size(); ++i) {
    results[i].basin_seed = i < options.n_starts ? "random:" + std::to_string(i)
                                                 : "extra:" + std::to_string(i - options.n_starts);
    report.diagnostics.total_iterations += results[i].iterations;
    if (results[i].converged) {
      ++report.diagnostics.converged;
    } else {
      ++report.diagnostics.unconverged;
    }
    report.starts.push_back({i, starts[i], results[i]});
  }
  report.diagnostics.starts = starts.size();
  if (report.diagnostics.converged == 0) {
    fail(ErrorCode::no_convergence, "find_global_minima: no start converged to residual " +
                                        std::to_string(tol.residual_tol));
  }

  // Single-owner reduction in start order.
  std::vector<CriticalPoint> clusters;
  double best = std::numeric_limits<double>::infinity();
  for (const CriticalPoint& cp : results) {
    if (!cp.converged) continue;
    best = std::min(best, cp.energy);
  }
  const double energy_tol = tol.cluster_energy_tol(best);
  for (const CriticalPoint& cp : results) {
    if (!cp.converged) continue;
    bool merged = false;
    for (CriticalPoint& c : clusters) {
      if (X.distance(c.x, cp.x) <= tol.cluster_dist_tol && std::abs(c.energy - cp.energy) <= energy_tol) {
        if (cp.residual < c.residual) {
          const std::string seed = c.basin_seed;
          c = cp;
          c.basin_seed = seed;
        }
        merged = true;
        break;
      }
    }
    if (!merged) clusters.push_back(cp);
  }
  for (CriticalPoint& c : clusters) {
    c.kind = c.energy <= best + energy_tol ? PointKind::global_min : PointKind::other;
  }
  std::stable_sort(clusters.begin(), clusters.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    if ((a.kind == PointKind::global_min) != (b.kind == PointKind::global_min)) return a.kind == PointKind::global_min;
    return a.energy < b.energy;
  });
  report.distinct_minima_count =
      static_cast<std::size_t>(std::count_if(clusters.begin(), clusters.end(),
                                             [](const CriticalPoint& c) { return c.kind == PointKind::global_min; }));
  report.points = std::move(clusters);
  return report;
}

namespace {

// Re-spaces nodes[first..last] uniformly in arc length, endpoints fixed.
void equidistribute(const Space& X, std::vector<Vector>& nodes, std::size_t first, std::size_t last) {
  if (last <= first + 1) return;
  std::vector<double> arc(last - first + 1, 0.0);
  for (std::size_t i = first + 1; i <= last; ++i) {
    arc[i - first] = arc[i - first - 1] + X.distance(nodes[i], nodes[i - 1]);
  }
  const double total = arc.back();
  if (total <= 0.0) return;
  std::vector<Vector> old(nodes.begin() + static_cast<std::ptrdiff_t>(first),
                          nodes.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  std::size_t seg = 0;
  for (std::size_t i = first + 1; i < last; ++i) {
    const double target = total * static_cast<double>(i - first) / static_cast<double>(last - first);
    while (seg + 1 < arc.size() - 1 && arc[seg + 1] < target) ++seg;
    const double len = arc[seg + 1] - arc[seg];
    const double w = len > 0.0 ? (target - arc[seg]) / len : 0.0;
    Vector v = old[seg];
    v *= 1.0 - w;
    v.axpy(w, old[seg + 1]);
    nodes[i] = std::move(v);
  }
}

}  // namespace

CriticalPoint mountain_pass(const FunctionalOracle& J, const EnergyParams& p, const CriticalPoint& a,
                            const CriticalPoint& b, const SolverTolerances& tol) {
  const Space& X = *J.space;
  X.check(a.x);
  X.check(b.x);
  require(tol.path_nodes >= 16, "mountain_pass needs at least 16 path nodes");
  if (X.distance(a.x, b.x) <= tol.cluster_dist_tol) {
    fail(ErrorCode::no_barrier, "no separating barrier found: the endpoints coincide");
  }
  const double ea = energy(J, p, a.x);
  const double eb = energy(J, p, b.x);
  const double floor = std::max(ea, eb);
  const double margin = tol.barrier_margin_rel * std::abs(std::min(ea, eb));

  const std::size_t n = tol.path_nodes;
  std::vector<Vector> nodes;
  nodes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = static_cast<double>(i) / static_cast<double>(n - 1);
    Vector v = a.x;
    v *= 1.0 - w;
    v.axpy(w, b.x);
    nodes.push_back(std::move(v));
  }
  nodes.front() = a.x;
  nodes.back() = b.x;

  auto check_barrier = [&](const Vector& x, double e) {
    if (!(e > floor + margin)) {
      fail(ErrorCode::no_barrier, "no separating barrier found: path maximum does not rise above the endpoints");
    }
    if (X.distance(x, a.x) <= tol.cluster_dist_tol || X.distance(x, b.x) <= tol.cluster_dist_tol) {
      fail(ErrorCode::no_barrier, "no separating barrier found: path collapsed onto an endpoint");
    }
  };

  auto finish = [&](Vector x, std::size_t iterations) {
    CriticalPoint cp = make_point(J, p, std::move(x));
    cp.kind = PointKind::mountain_pass;
    cp.basin_seed = "path";
    cp.iterations = iterations;
    cp.converged = cp.residual <= tol.residual_tol;
    check_barrier(cp.x, cp.energy);
    return cp;
  };

  const bool can_newton = X.dim() <= tol.newton_max_dim;
  const double newton_switch = std::max(1e3 * tol.residual_tol, 1e-4);
  double step = tol.path_step;
  double last_residual = std::numeric_limits<double>::infinity();
  std::size_t growth_streak = 0;

  for (std::size_t it = 0; it < tol.max_iterations; ++it) {
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = energy(J, p, nodes[i]);
    std::size_t top = 1;
    for (std::size_t i = 2; i + 1 < n; ++i) {
      if (e[i] > e[top]) top = i;
    }
    check_barrier(nodes[top], e[top]);

    const Vector g_top = energy_gradient(J, p, nodes[top]);
    const double r_top = X.norm(g_top);
    if (r_top <= tol.residual_tol) {
      if (can_newton) {
        NewtonOutcome polished = newton_refine(J, p, nodes[top], 1e-3 * tol.residual_tol, 4, false);
        return finish(std::move(polished.x), it);
      }
      return finish(nodes[top], it);
    }
    if (can_newton && r_top <= newton_switch) {
      NewtonOutcome refined = newton_refine(J, p, nodes[top], 1e-3 * tol.residual_tol, 30, false);
      if (refined.residual <= tol.residual_tol) {
        const double e_ref = energy(J, p, refined.x);
        if (e_ref > floor + margin && X.distance(refined.x, a.x) > tol.cluster_dist_tol &&
            X.distance(refined.x, b.x) > tol.cluster_dist_tol) {
          return finish(std::move(refined.x), it);
        }
      }
    }

    if (r_top > last_residual) {
      if (++growth_streak >= 10) {
        step *= 0.5;
        growth_streak = 0;
      }
    } else {
      growth_streak = 0;
    }
    last_residual = r_top;

    // Interior nodes relax orthogonally to the path; the top node climbs along it.
    std::vector<Vector> moved(nodes);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      Vector tangent = nodes[i + 1] - nodes[i - 1];
      const double tn = X.norm(tangent);
      if (tn > 0.0) tangent *= 1.0 / tn;
      Vector g = i == top ? g_top : energy_gradient(J, p, nodes[i]);
      const double along = tn > 0.0 ? X.inner(g, tangent) : 0.0;
      g.axpy(i == top ? -2.0 * along : -along, tangent);
      moved[i].axpy(-step, g);
    }
    nodes = std::move(moved);
    equidistribute(X, nodes, 0, top);
    equidistribute(X, nodes, top, n - 1);
  }
  fail(ErrorCode::no_convergence, "mountain_pass: iteration cap reached");
}

CriticalPoint deflated_newton(const FunctionalOracle& J, const EnergyParams& p, const std::vector<CriticalPoint>& known,
                              const Vector& x0, const SolverTolerances& tol) {
  const Space& X = *J.space;
  X.check(x0);
  require(X.dim() <= tol.newton_max_dim, "deflated_newton: dimension exceeds the finite-difference Jacobian limit");

  // M(x) = prod_k (1 + 1/|x - x_k|^2) and its coordinate gradient.
  auto deflation = [&](const Vector& x, Eigen::VectorXd* gradient) {
    double m = 1.0;
    Eigen::VectorXd log_grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(x.size()));
    for (const CriticalPoint& k : known) {
      const Vector d = x - k.x;
      const double d2 = X.norm_squared(d);
      const double mk = 1.0 + 1.0 / d2;
      m *= mk;
      if (gradient) log_grad += (-2.0 / (d2 * d2) / mk) * as_eigen(X.gram(d));
    }
    if (gradient) *gradient = m * log_grad;
    return m;
  };
  auto deflated_norm = [&](const Vector& x) { return deflation(x, nullptr) * X.norm(energy_gradient(J, p, x)); };
  auto near_known = [&](const Vector& x) {
    return std::any_of(known.begin(), known.end(),
                       [&](const CriticalPoint& k) { return X.distance(x, k.x) < tol.cluster_dist_tol; });
  };

  Vector x = x0;
  std::size_t it = 0;
  const std::size_t max_newton = 200;
  for (; it < max_newton; ++it) {
    const Vector g = energy_gradient(J, p, x);
    const double r = X.norm(g);
    if (r <= 1e-3 * tol.residual_tol || (r <= tol.residual_tol && it > 0 && !near_known(x))) break;

    Eigen::VectorXd dm;
    const double m = deflation(x, &dm);
    const Eigen::MatrixXd jac = m * gradient_jacobian(J, p, x) + as_eigen(g) * dm.transpose();
    const Eigen::VectorXd delta = jac.fullPivLu().solve(-m * as_eigen(g));
    if (!delta.allFinite()) break;

    const double current = m * r;
    double t = 1.0;
    Vector trial = x;
    bool accepted = false;
    while (t > 1e-10) {
      trial = x;
      as_eigen(trial) += t * delta;
      const double next = deflated_norm(trial);
      if (std::isfinite(next) && next <= (1.0 - 1e-4 * t) * current) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    x = std::move(trial);
  }

  CriticalPoint cp = make_point(J, p, std::move(x));
  cp.iterations = it;
  cp.basin_seed = "deflated";
  cp.converged = cp.residual <= tol.residual_tol && !near_known(cp.x);
  return cp;
}

Verification verify_solution(const FunctionalOracle& J, const EnergyParams& p, const Vector& x,
                             const SolverTolerances& tol) {
  const Space& X = *J.space;
  const Vector g = energy_gradient(J, p, x);
  Verification v;
  v.residual = X.norm(g);
  // <g, phi_i> for each basis function phi_i is the i-th entry of G g.
  const Vector weak = X.gram(g);
  for (double w : weak.coords()) v.weak_residual = std::max(v.weak_residual, std::abs(w));
  v.is_equation_solution = v.residual <= tol.residual_tol;
  return v;
}

}  // namespace varlab
