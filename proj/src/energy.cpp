#include "varlab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "varlab/errors.hpp"
#include "varlab/kernels.hpp"

namespace varlab {

const char* to_string(Parity parity) {
  switch (parity) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    case Parity::none: return "none";
  }
  return "none";
}

FunctionalOracle pde_functional(const NonlinearitySpec& spec, const SpacePtr& space) {
  require(space && space->kind() == Space::Kind::dirichlet_h10, "pde_functional needs a Dirichlet H^1_0 grid space");
  const Grid1D grid = *space->grid();
  const std::vector<double> nodes = grid.nodes();
  const double h = grid.h();

  FunctionalOracle J;
  J.label = spec.label;
  J.space = space;
  J.parity = Parity::none;

  if (spec.is_cubic) {
    J.parity = Parity::even;
    J.value = [space, h](const Vector& u) {
      space->check(u);
      return h * kernels::table().cubic_potential_sum(u.coords().data(), u.size());
    };
    J.grad = [space, h](const Vector& u) {
      space->check(u);
      Vector load = space->zero();
      kernels::table().cubic_force(u.coords().data(), load.coords().data(), u.size());
      load *= h;
      return space->riesz(load);
    };
    return J;
  }

  J.value = [space, h, nodes, F = spec.F](const Vector& u) {
    space->check(u);
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) sum += F(nodes[i], u[i]);
    return h * sum;
  };
  J.grad = [space, h, nodes, f = spec.f](const Vector& u) {
    space->check(u);
    Vector load = space->zero();
    for (std::size_t i = 0; i < u.size(); ++i) load[i] = h * f(nodes[i], u[i]);
    return space->riesz(load);
  };
  return J;
}

double energy(const FunctionalOracle& J, const EnergyParams& p, const Vector& x) {
  const Space& X = *J.space;
  return 0.5 * X.norm_squared(x) - p.lambda * J.value(x) - X.inner(x, p.y);
}

Vector energy_gradient(const FunctionalOracle& J, const EnergyParams& p, const Vector& x) {
  Vector g = x;
  g.axpy(-p.lambda, J.grad(x));
  g -= p.y;
  return g;
}

double directional_difference(const FunctionalOracle& J, const Vector& x, const Vector& v, double eps) {
  Vector plus = x;
  plus.axpy(eps, v);
  Vector minus = x;
  minus.axpy(-eps, v);
  return (J.value(plus) - J.value(minus)) / (2.0 * eps);
}

std::vector<Vector> sample_directions(const Space& space, std::size_t count, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Vector v = space.zero();
    for (double& c : v.coords()) c = normal(rng);
    if (k % 2 == 1 && space.kind() != Space::Kind::euclidean) v = space.riesz(v);
    const double n = space.norm(v);
    if (n == 0.0) {
      v[0] = 1.0;
      v *= 1.0 / space.norm(v);
    } else {
      v *= 1.0 / n;
    }
    out.push_back(std::move(v));
  }
  return out;
}

namespace {

// Maximizes a unimodal g on [lo, hi] to the given bracket width.
template <class F>
std::pair<double, double> golden_section_max(F&& g, double lo, double hi, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double gc = g(c);
  double gd = g(d);
  while (b - a > tol) {
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = g(d);
    }
  }
  return gc >= gd ? std::pair{c, gc} : std::pair{d, gd};
}

struct RayMax {
  double t;
  double ratio;
};

class RatioProbe {
 public:
  RatioProbe(const FunctionalOracle& J, const BetaStarOptions& o) : J_(J), o_(o) {}

  // J(t d)/t^2 for unit d; guards against divergence.
  double ratio(const Vector& d, double t) const {
    Vector x = t * Vector(d);
    const double r = J_.value(x) / (t * t);
    if (!std::isfinite(r) || r > o_.divergence_cap) {
      fail(ErrorCode::beta_star_infinite,
           "J(x)/|x|^2 exceeds " + std::to_string(o_.divergence_cap) + ": the growth constant is infinite");
    }
    return r;
  }

  // Log-grid scan of t in [t_min, t_max] then golden-section refinement in log t.
  RayMax maximize_along_ray(const Vector& d) const {
    const double s_lo = std::log(o_.t_min);
    const double s_hi = std::log(o_.t_max);
    const std::size_t n = std::max<std::size_t>(o_.scan_points, 3);
    const double ds = (s_hi - s_lo) / static_cast<double>(n - 1);
    std::size_t best = 0;
    double best_ratio = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double r = ratio(d, std::exp(s_lo + ds * static_cast<double>(i)));
      if (r > best_ratio) {
        best_ratio = r;
        best = i;
      }
    }
    const double lo = s_lo + ds * static_cast<double>(best == 0 ? 0 : best - 1);
    const double hi = s_lo + ds * static_cast<double>(std::min(best + 1, n - 1));
    auto [s_star, r_star] = golden_section_max([&](double s) { return ratio(d, std::exp(s)); }, lo, hi, o_.bracket_tol);
    const double t_best = std::exp(s_lo + ds * static_cast<double>(best));
    if (best_ratio > r_star) return {t_best, best_ratio};
    return {std::exp(s_star), r_star};
  }

 private:
  const FunctionalOracle& J_;
  const BetaStarOptions& o_;
};

struct Candidate {
  Vector direction;
  RayMax ray;
};

// Tangential ascent of J(t d)/t^2 over unit directions d at fixed amplitude,
// alternated with re-maximization along the ray.
Candidate refine_direction(const FunctionalOracle& J, const RatioProbe& probe, Candidate c,
                           const BetaStarOptions& o) {
  const Space& X = *J.space;
  double step = 1.0;
  for (std::size_t it = 0; it < o.refine_iterations && step > 1e-14; ++it) {
    const double t = c.ray.t;
    const Vector x = t * Vector(c.direction);
    // Riesz gradient of rho(x) = J(x)/|x|^2 at |x| = t, restricted to the sphere.
    Vector g = J.grad(x);
    g *= 1.0 / (t * t);
    g.axpy(-2.0 * c.ray.ratio / t, c.direction);
    g.axpy(-X.inner(g, c.direction), c.direction);
    const double gnorm = X.norm(g);
    if (gnorm <= 1e-15 * (1.0 + std::abs(c.ray.ratio))) break;

    bool accepted = false;
    while (step > 1e-14) {
      Vector trial = c.direction;
      trial.axpy(step / gnorm, g);
      trial *= 1.0 / X.norm(trial);
      const double r = probe.ratio(trial, t);
      if (r > c.ray.ratio) {
        c.direction = std::move(trial);
        c.ray.ratio = r;
        step = std::min(1.0, 2.0 * step);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    if (it % 8 == 7) {
      const RayMax again = probe.maximize_along_ray(c.direction);
      if (again.ratio > c.ray.ratio) c.ray = again;
    }
  }
  const RayMax last = probe.maximize_along_ray(c.direction);
  if (last.ratio > c.ray.ratio) c.ray = last;
  return c;
}

}  // namespace

BetaStarEstimate estimate_beta_star(const FunctionalOracle& J, const BetaStarOptions& o) {
  require(o.t_min > 0.0 && o.t_max > o.t_min, "beta-star ray bounds must satisfy 0 < t_min < t_max");
  require(o.directions > 0, "beta-star needs at least one direction");
  const Space& X = *J.space;
  Rng rng = make_stream(o.seed, 0xbe7a);
  const RatioProbe probe(J, o);

  std::vector<Candidate> candidates;
  for (Vector& d : sample_directions(X, o.directions, rng)) {
    const RayMax ray = probe.maximize_along_ray(d);
    candidates.push_back({std::move(d), ray});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.ray.ratio > b.ray.ratio; });
  const std::size_t keep = std::min(candidates.size(), std::max<std::size_t>(o.refined_directions, 1));
  for (std::size_t i = 0; i < keep; ++i) candidates[i] = refine_direction(J, probe, candidates[i], o);

  const auto best = std::max_element(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                                     [](const Candidate& a, const Candidate& b) { return a.ray.ratio < b.ray.ratio; });
  BetaStarEstimate out;
  out.certificate = best->ray.t * Vector(best->direction);
  // Report exactly what the certificate reproduces.
  out.beta_star = J.value(out.certificate) / X.norm_squared(out.certificate);
  return out;
}

AlphaStarEstimate estimate_alpha_star(const FunctionalOracle& J, const AlphaStarOptions& o) {
  require(o.r0 > 0.0 && o.levels >= 2, "alpha-star sweep needs r0 > 0 and at least two radii");
  const Space& X = *J.space;
  Rng rng = make_stream(o.seed, 0xa1fa);
  const std::vector<Vector> dirs = sample_directions(X, o.directions, rng);

  AlphaStarEstimate out;
  double radius = o.r0;
  for (std::size_t k = 0; k < o.levels; ++k, radius *= 2.0) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Vector& d : dirs) {
      const Vector x = radius * Vector(d);
      best = std::max(best, J.value(x) / (radius * radius));
    }
    out.sweep.push_back({radius, best});
  }
  const double last = out.sweep.back().max_ratio;
  const double previous = out.sweep[out.sweep.size() - 2].max_ratio;
  out.alpha_star = std::max(0.0, last);
  // A positive tail that has stopped decreasing may still be climbing.
  out.reliable = !(last >= previous && last > 0.0);
  if (o.analytic_override) {
    require(*o.analytic_override >= 0.0, "alpha-star override must be non-negative");
    out.alpha_star = *o.analytic_override;
    out.overridden = true;
  }
  return out;
}

LambdaInterval GrowthConstants::lambda_interval() const {
  LambdaInterval interval;
  interval.lower = beta_star() > 0.0 ? 1.0 / (2.0 * beta_star()) : std::numeric_limits<double>::max();
  if (alpha_star() > 0.0) interval.upper = 1.0 / (2.0 * alpha_star());
  return interval;
}

GrowthConstants estimate_growth_constants(const FunctionalOracle& J, const BetaStarOptions& beta_options,
                                          const AlphaStarOptions& alpha_options) {
  GrowthConstants out;
  out.beta = estimate_beta_star(J, beta_options);
  out.alpha = estimate_alpha_star(J, alpha_options);
  return out;
}

void require_three_solution_hypotheses(const GrowthConstants& c) {
  if (!(c.beta_star() > 0.0)) {
    fail(ErrorCode::degenerate_oracle, "sup J <= 0 on the sampled directions: the functional is degenerate");
  }
  if (!std::isfinite(c.beta_star())) fail(ErrorCode::beta_star_infinite, "beta* is not finite");
  // Relative margin so that alpha* == beta* up to rounding counts as equal.
  if (!(c.alpha_star() < c.beta_star() * (1.0 - 1e-9))) {
    fail(ErrorCode::empty_interval, "alpha* = " + std::to_string(c.alpha_star()) + " is not below beta* = " +
                                        std::to_string(c.beta_star()) + ": the lambda interval is empty");
  }
}

void require_admissible_lambda(const GrowthConstants& c, double lambda) {
  require_three_solution_hypotheses(c);
  const LambdaInterval interval = c.lambda_interval();
  if (!interval.contains(lambda)) {
    fail(ErrorCode::lambda_outside,
         "lambda = " + std::to_string(lambda) + " is outside ]" + std::to_string(interval.lower) + ", " +
             (interval.upper ? std::to_string(*interval.upper) : std::string("+inf")) + "[");
  }
}

std::vector<CoercivitySample> coercivity_sweep(const FunctionalOracle& J, const EnergyParams& p, double r0,
                                               std::size_t levels, std::size_t directions, std::uint64_t seed) {
  require(r0 > 0.0 && levels > 0, "coercivity sweep needs r0 > 0 and at least one radius");
  Rng rng = make_stream(seed, 0xc0e5);
  const std::vector<Vector> dirs = sample_directions(*J.space, directions, rng);
  std::vector<CoercivitySample> out;
  double radius = r0;
  for (std::size_t k = 0; k < levels; ++k, radius *= 2.0) {
    double lowest = std::numeric_limits<double>::infinity();
    for (const Vector& d : dirs) {
      lowest = std::min(lowest, energy(J, p, radius * Vector(d)));
      lowest = std::min(lowest, energy(J, p, -radius * Vector(d)));
    }
    out.push_back({radius, lowest});
  }
  return out;
}

double start_ball_radius(const std::vector<CoercivitySample>& sweep) {
  require(!sweep.empty(), "empty coercivity sweep");
  for (const CoercivitySample& s : sweep) {
    if (s.min_energy > 0.0) return s.radius;
  }
  return sweep.back().radius;
}

}  // namespace varlab
