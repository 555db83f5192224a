#include "varlab/decomposable.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/tools/toms748_solve.hpp>

#include "varlab/errors.hpp"
#include "varlab/parallel.hpp"

namespace varlab::decomposable {

MeasurePartition::MeasurePartition(std::vector<double> w) : weights(std::move(w)) {
  require(!weights.empty(), "partition needs at least one cell");
  for (double x : weights) require(std::isfinite(x) && x > 0.0, "partition weights must be positive and finite");
}

MeasurePartition MeasurePartition::uniform(std::size_t n, double total_mass) {
  require(n >= 1, "partition needs at least one cell");
  require(total_mass > 0.0, "total mass must be positive");
  return MeasurePartition(std::vector<double>(n, total_mass / static_cast<double>(n)));
}

double MeasurePartition::total_mass() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

MeasurePartition MeasurePartition::refine() const {
  std::vector<double> w;
  w.reserve(2 * weights.size());
  for (double x : weights) {
    w.push_back(0.5 * x);
    w.push_back(0.5 * x);
  }
  return MeasurePartition(std::move(w));
}

SimpleFunction SimpleFunction::constant(std::size_t n, Point c) { return {std::vector<Point>(n, std::move(c))}; }

SimpleFunction SimpleFunction::refine() const {
  SimpleFunction out;
  for (const Point& p : values) {
    out.values.push_back(p);
    out.values.push_back(p);
  }
  return out;
}

SimpleFunction SimpleFunction::negated() const {
  SimpleFunction out = *this;
  for (Point& p : out.values) {
    for (double& c : p) c = -c;
  }
  return out;
}

double norm(const Point& x) {
  double s = 0.0;
  for (double c : x) s += c * c;
  return std::sqrt(s);
}

double SimpleFunction::max_norm() const {
  double m = 0.0;
  for (const Point& p : values) m = std::max(m, norm(p));
  return m;
}

DecomposableSetSpec DecomposableSetSpec::unbounded(std::size_t n) {
  return {std::vector<double>(n, std::numeric_limits<double>::infinity()), true};
}

bool DecomposableSetSpec::contains(const SimpleFunction& u) const {
  if (u.size() != h.size()) return false;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(norm(u.values[i]) <= h[i])) return false;
  }
  return true;
}

bool DecomposableSetSpec::contains_constants() const {
  return std::all_of(h.begin(), h.end(), [](double b) { return std::isinf(b) && b > 0.0; });
}

bool bounds_family_is_filtering(const std::vector<std::vector<double>>& bounds) {
  for (const auto& a : bounds) {
    for (const auto& b : bounds) {
      const bool dominated = std::any_of(bounds.begin(), bounds.end(), [&](const std::vector<double>& c) {
        if (c.size() != a.size() || c.size() != b.size()) return false;
        for (std::size_t i = 0; i < c.size(); ++i) {
          if (c[i] < std::max(a[i], b[i])) return false;
        }
        return true;
      });
      if (!dominated) return false;
    }
  }
  return true;
}

T16Functionals catalog_functionals(const std::string& name, std::size_t dim) {
  require(dim >= 1 && dim <= 3, "decomposable catalog supports 1 <= d <= 3");
  T16Functionals F;
  F.label = name;
  F.dim = dim;
  F.p = 1.0;
  F.inf_f = 0.0;
  F.lipschitz_g = 1.0;
  F.g = [](std::size_t, const Point& x) { return x[0]; };
  if (name == "inverse") {
    F.f = [](const Point& x) { return 1.0 / (1.0 + norm(x)); };
    F.lipschitz_f = 1.0;
  } else if (name == "exp") {
    F.f = [](const Point& x) { return std::exp(-norm(x)); };
    F.lipschitz_f = 1.0;
  } else {
    fail(ErrorCode::contract, "unknown decomposable catalog '" + name + "'");
  }
  return F;
}

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names{"inverse", "exp"};
  return names;
}

HypothesisCheck check_hypotheses(const T16Functionals& F, std::size_t cells, std::size_t samples, Rng& rng) {
  HypothesisCheck out;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> log_radius(-3.0, 4.0);
  for (std::size_t s = 0; s < samples; ++s) {
    Point x(F.dim);
    for (double& c : x) c = normal(rng);
    const double scale = std::pow(10.0, log_radius(rng)) / std::max(norm(x), 1e-300);
    for (double& c : x) c *= scale;
    Point neg = x;
    for (double& c : neg) c = -c;
    out.parity_f = std::max(out.parity_f, std::abs(F.f(x) - F.f(neg)));
    for (std::size_t t = 0; t < cells; ++t) out.parity_g = std::max(out.parity_g, std::abs(F.g(t, x) + F.g(t, neg)));
    out.growth = std::max(out.growth, std::abs(F.f(x)) / (1.0 + std::pow(norm(x), F.p)));
  }
  return out;
}

double integral_f(const MeasurePartition& P, const T16Functionals& F, const SimpleFunction& u) {
  require(u.size() == P.size(), "simple function does not match the partition");
  double s = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) s += P.weights[i] * F.f(u.values[i]);
  return s;
}

double integral_g(const MeasurePartition& P, const T16Functionals& F, const SimpleFunction& u) {
  require(u.size() == P.size(), "simple function does not match the partition");
  double s = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) s += P.weights[i] * F.g(i, u.values[i]);
  return s;
}

double eval_J16(const MeasurePartition& P, const T16Functionals& F, const SimpleFunction& u) {
  for (const Point& p : u.values) {
    require(p.size() == F.dim, "simple function values have the wrong dimension");
    for (double c : p) require(std::isfinite(c), "simple function values must be finite");
  }
  const double phi = integral_g(P, F, u);
  return integral_f(P, F, u) + phi * phi;
}

SimpleFunction mix(const SimpleFunction& u, const SimpleFunction& v, const std::vector<std::size_t>& cells) {
  require(u.size() == v.size(), "mix needs functions on the same partition");
  SimpleFunction w = v;
  for (std::size_t i : cells) {
    require(i < u.size(), "mix cell index out of range");
    w.values[i] = u.values[i];
  }
  return w;
}

namespace {

struct Groups {
  std::vector<std::size_t> plus;
  std::vector<std::size_t> minus;
};

// Greedy balance: heaviest cells first, each to the lighter group.
Groups balance(const MeasurePartition& P) {
  std::vector<std::size_t> order(P.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return P.weights[a] > P.weights[b]; });
  Groups g;
  double wp = 0.0;
  double wm = 0.0;
  for (std::size_t i : order) {
    if (wp <= wm) {
      g.plus.push_back(i);
      wp += P.weights[i];
    } else {
      g.minus.push_back(i);
      wm += P.weights[i];
    }
  }
  std::sort(g.plus.begin(), g.plus.end());
  std::sort(g.minus.begin(), g.minus.end());
  return g;
}

Point along_e1(std::size_t dim, double r) {
  Point x(dim, 0.0);
  x[0] = r;
  return x;
}

// Magnitudes (R+, R-) >= R with the g-integral cancelled, or false.
bool balanced_magnitudes(const MeasurePartition& P, const T16Functionals& F, const Groups& g, double R, double& r_plus,
                         double& r_minus) {
  auto side = [&](const std::vector<std::size_t>& cells, double r) {
    double s = 0.0;
    for (std::size_t i : cells) s += P.weights[i] * F.g(i, along_e1(F.dim, r));
    return s;
  };
  auto residual = [&](double rp, double rm) { return side(g.plus, rp) + side(g.minus, -rm); };
  r_plus = R;
  r_minus = R;
  const double r0 = residual(R, R);
  if (r0 == 0.0) return true;
  // Raise whichever side is short until the integral cancels.
  const bool raise_minus = r0 > 0.0;
  auto f = [&](double r) { return raise_minus ? residual(R, r) : residual(r, R); };
  double lo = R;
  double hi = 2.0 * R + 1.0;
  double f_lo = f(lo);
  double f_hi = f(hi);
  for (int k = 0; k < 200 && (f_hi > 0.0) == (f_lo > 0.0) && f_hi != 0.0; ++k) {
    lo = hi;
    f_lo = f_hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) return false;
    f_hi = f(hi);
  }
  if ((f_hi > 0.0) == (f_lo > 0.0) && f_hi != 0.0) return false;
  double root = hi;
  if (f_hi != 0.0) {
    std::uintmax_t iters = 200;
    const auto bracket = boost::math::tools::toms748_solve(
        f, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(52), iters);
    root = std::abs(f(bracket.first)) <= std::abs(f(bracket.second)) ? bracket.first : bracket.second;
  }
  (raise_minus ? r_minus : r_plus) = root;
  return true;
}

}  // namespace

SimpleFunction descent_oracle(const MeasurePartition& P, const T16Functionals& F, const SimpleFunction& u,
                              const DecomposableSetSpec& X, const DescentOptions& options) {
  require(u.size() == P.size() && X.h.size() == P.size(), "descent oracle: partition, function and bounds disagree");
  if (P.size() < 2) {
    fail(ErrorCode::descent_blocked, "descent blocked: a single cell cannot cancel the g-integral");
  }
  const double J_u = eval_J16(P, F, u);
  const Groups groups = balance(P);
  double M = u.max_norm();
  for (std::size_t round = 0; round < options.max_rounds; ++round) {
    const double R = 10.0 * (1.0 + M) - 1.0;
    double r_plus = 0.0;
    double r_minus = 0.0;
    if (!balanced_magnitudes(P, F, groups, R, r_plus, r_minus)) {
      fail(ErrorCode::descent_blocked, "descent blocked: cannot cancel the g-integral at magnitude " + std::to_string(R));
    }
    SimpleFunction v = u;
    for (std::size_t i : groups.plus) v.values[i] = along_e1(F.dim, r_plus);
    for (std::size_t i : groups.minus) v.values[i] = along_e1(F.dim, -r_minus);
    if (!X.contains(v)) {
      fail(ErrorCode::descent_blocked, "descent blocked: the bound h caps the magnitude " +
                                           std::to_string(std::max(r_plus, r_minus)));
    }
    if (eval_J16(P, F, v) < J_u - options.strict_margin) return v;
    M = std::max(r_plus, r_minus);
  }
  fail(ErrorCode::descent_blocked, "descent blocked: no decrease of J by the strict margin after " +
                                       std::to_string(options.max_rounds) + " magnitude rounds");
}

std::vector<DescentTraceRow> iterate_descent(const MeasurePartition& P, const T16Functionals& F, SimpleFunction u0,
                                             const DecomposableSetSpec& X, std::size_t steps,
                                             const DescentOptions& options) {
  std::vector<DescentTraceRow> trace;
  SimpleFunction u = std::move(u0);
  for (std::size_t k = 0;; ++k) {
    trace.push_back({k, eval_J16(P, F, u), integral_g(P, F, u), u.max_norm()});
    if (k == steps) break;
    u = descent_oracle(P, F, u, X, options);
  }
  return trace;
}

namespace {

// Grid of the ball |x| <= h in R^d: a K^d cube grid clipped to the ball.
std::vector<Point> cell_grid(std::size_t dim, double h, std::size_t K) {
  require(std::isfinite(h) && h >= 0.0, "sampled audits need finite bounds");
  require(K >= 2, "grid needs at least two points per axis");
  std::vector<double> axis(K);
  for (std::size_t k = 0; k < K; ++k) axis[k] = -h + 2.0 * h * static_cast<double>(k) / static_cast<double>(K - 1);
  std::vector<Point> out;
  std::vector<std::size_t> idx(dim, 0);
  for (;;) {
    Point x(dim);
    for (std::size_t j = 0; j < dim; ++j) x[j] = axis[idx[j]];
    if (norm(x) <= h * (1.0 + 1e-15)) out.push_back(std::move(x));
    std::size_t j = 0;
    while (j < dim && ++idx[j] == K) idx[j++] = 0;
    if (j == dim) break;
  }
  return out;
}

// Largest distance from a point of the ball to the nearest retained grid point.
double cell_resolution(std::size_t dim, double h, std::size_t K) {
  const double spacing = 2.0 * h / static_cast<double>(K - 1);
  return dim == 1 ? 0.5 * spacing : spacing * std::sqrt(static_cast<double>(dim));
}

struct ProductSamples {
  std::vector<double> I;    // integral of f
  std::vector<double> Phi;  // integral of g
};

ProductSamples product_samples(const MeasurePartition& P, const T16Functionals& F, const DecomposableSetSpec& X,
                               std::size_t K) {
  require(X.h.size() == P.size(), "bounds do not match the partition");
  std::vector<std::vector<double>> a(P.size());
  std::vector<std::vector<double>> b(P.size());
  std::size_t total = 1;
  for (std::size_t i = 0; i < P.size(); ++i) {
    for (const Point& x : cell_grid(F.dim, X.h[i], K)) {
      a[i].push_back(P.weights[i] * F.f(x));
      b[i].push_back(P.weights[i] * F.g(i, x));
    }
    require(total <= 4'000'000 / a[i].size(), "product grid too large for the sampled audit");
    total *= a[i].size();
  }
  ProductSamples s;
  s.I.resize(total);
  s.Phi.resize(total);
  parallel_for(total, [&](std::size_t j) {
    std::size_t rest = j;
    double I = 0.0;
    double Phi = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) {
      const std::size_t k = rest % a[i].size();
      rest /= a[i].size();
      I += a[i][k];
      Phi += b[i][k];
    }
    s.I[j] = I;
    s.Phi[j] = Phi;
  });
  return s;
}

}  // namespace

double sampled_infimum(const MeasurePartition& P, const T16Functionals& F, const DecomposableSetSpec& X,
                       std::size_t grid_points) {
  const ProductSamples s = product_samples(P, F, X, grid_points);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < s.I.size(); ++j) best = std::min(best, s.I[j] + s.Phi[j] * s.Phi[j]);
  return best;
}

MinimaxCheck lambda_interval_minimax_check(const MeasurePartition& P, const T16Functionals& F,
                                           const DecomposableSetSpec& X, const MinimaxCheckOptions& options) {
  const ProductSamples s = product_samples(P, F, X, options.grid_points);
  MinimaxCheck out;
  out.samples = s.I.size();
  out.lambda_lo = *std::min_element(s.Phi.begin(), s.Phi.end());
  out.lambda_hi = *std::max_element(s.Phi.begin(), s.Phi.end());

  // Every sampled Phi lies in [lo, hi], so the inner sup sits at lambda = Phi(u).
  out.rhs = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < s.I.size(); ++j) out.rhs = std::min(out.rhs, s.I[j] + s.Phi[j] * s.Phi[j]);

  // lambda -> min_u (I + 2 lambda Phi) - lambda^2 is concave: golden section.
  auto inner = [&](double lambda) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < s.I.size(); ++j) m = std::min(m, s.I[j] + 2.0 * lambda * s.Phi[j]);
    return m - lambda * lambda;
  };
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = out.lambda_lo;
  double hi = out.lambda_hi;
  double c = hi - ratio * (hi - lo);
  double d = lo + ratio * (hi - lo);
  double fc = inner(c);
  double fd = inner(d);
  for (int it = 0; it < 400 && hi - lo > options.lambda_tol; ++it) {
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - ratio * (hi - lo);
      fc = inner(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + ratio * (hi - lo);
      fd = inner(d);
    }
  }
  out.lhs_argmax = 0.5 * (lo + hi);
  out.lhs = inner(out.lhs_argmax);
  for (double edge : {out.lambda_lo, out.lambda_hi}) {
    const double v = inner(edge);
    if (v > out.lhs) {
      out.lhs = v;
      out.lhs_argmax = edge;
    }
  }

  // Distance from X_h and Lambda_h to their samples, propagated through the
  // Lipschitz constants of f and g.
  double f_err = 0.0;
  double e = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const double delta = cell_resolution(F.dim, X.h[i], options.grid_points);
    f_err += P.weights[i] * F.lipschitz_f * delta;
    e += P.weights[i] * F.lipschitz_g * delta;
  }
  const double phi_max = std::max(std::abs(out.lambda_lo), std::abs(out.lambda_hi)) + e;
  const double slope = 2.0 * phi_max + 2.0 * phi_max;
  const double rhs_err = f_err + 2.0 * phi_max * e + e * e;
  const double lhs_err = f_err + 2.0 * phi_max * e + slope * e + slope * options.lambda_tol;
  out.sampling_gap = lhs_err + rhs_err;
  out.inconclusive = out.sampling_gap > options.max_gap;
  out.pass = !out.inconclusive && std::abs(out.lhs - out.rhs) <= out.sampling_gap;
  return out;
}

NoMinReport no_min_audit(const MeasurePartition& P, const T16Functionals& F, const DecomposableSetSpec& X,
                         const std::vector<SimpleFunction>& candidates, Rng& rng, const DescentOptions& options) {
  require(X.h.size() == P.size(), "bounds do not match the partition");
  if (!X.symmetric) fail(ErrorCode::hypothesis_violated, "X must be symmetric");
  if (!X.contains_constants()) fail(ErrorCode::hypothesis_violated, "X must contain the constant functions");

  // Decomposability and symmetry closure on random members.
  std::normal_distribution<double> normal(0.0, 3.0);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 32; ++trial) {
    SimpleFunction u;
    SimpleFunction v;
    for (std::size_t i = 0; i < P.size(); ++i) {
      Point a(F.dim);
      Point b(F.dim);
      for (double& c : a) c = normal(rng);
      for (double& c : b) c = normal(rng);
      u.values.push_back(std::move(a));
      v.values.push_back(std::move(b));
    }
    std::vector<std::size_t> cells;
    for (std::size_t i = 0; i < P.size(); ++i) {
      if (coin(rng)) cells.push_back(i);
    }
    if (!X.contains(mix(u, v, cells)) || !X.contains(u.negated())) {
      fail(ErrorCode::hypothesis_violated, "X failed the decomposability or symmetry closure check");
    }
  }

  NoMinReport report;
  bool unsatisfiable = true;
  std::uniform_real_distribution<double> log_radius(-3.0, 3.0);
  for (int s = 0; s < 256 && unsatisfiable; ++s) {
    Point x(F.dim);
    for (double& c : x) c = normal(rng);
    const double n = norm(x);
    const double r = s == 0 ? 0.0 : std::pow(10.0, log_radius(rng));
    Point further(F.dim, 0.0);
    if (n == 0.0 || r == 0.0) {
      x.assign(F.dim, 0.0);
      further[0] = 1.0;
    } else {
      for (std::size_t j = 0; j < F.dim; ++j) {
        x[j] *= r / n;
        further[j] = x[j] * (1.0 + 1.0 / r);
      }
    }
    unsatisfiable = F.f(x) > F.inf_f && F.f(further) < F.f(x);
  }
  report.per_cell_min_unsatisfiable = unsatisfiable;

  for (const SimpleFunction& u : candidates) {
    NoMinRow row;
    row.J_candidate = eval_J16(P, F, u);
    row.phi_zero = integral_g(P, F, u) == 0.0;
    try {
      const SimpleFunction v = descent_oracle(P, F, u, X, options);
      row.J_descended = eval_J16(P, F, v);
      row.margin = row.J_candidate - row.J_descended;
      row.beaten = row.margin > options.strict_margin;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::descent_blocked) throw;
      row.J_descended = row.J_candidate;
      row.beaten = false;
    }
    if (!row.beaten) ++report.alarms;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace varlab::decomposable
