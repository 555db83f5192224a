// Acceptance suite: one PASS/FAIL line per criterion, with wall time against
// its budget. Exit status is non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "varlab/catalog.hpp"
#include "varlab/decomposable.hpp"
#include "varlab/errors.hpp"
#include "varlab/kernels.hpp"
#include "varlab/minimax.hpp"
#include "varlab/solve.hpp"
#include "varlab/ysearch.hpp"

using namespace varlab;

namespace {

const double kPi2 = std::numbers::pi * std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

Vector random_vector(const Space& s, Rng& rng, double scale) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> c(s.dim());
  for (double& x : c) x = d(rng);
  return s.make(std::move(c));
}

// 1: growth constants
void constants(Outcome& o) {
  const auto dw = estimate_growth_constants(catalog::doublewell1d(), {}, {});
  o.detail << "doublewell beta*=" << dw.beta_star() << " alpha*=" << dw.alpha_star();
  o.check(std::abs(dw.beta_star() - 1.0) <= 1e-3, "doublewell beta* = 1 +- 1e-3");
  o.check(dw.alpha_star() == 0.0, "doublewell alpha* = 0");

  const auto J = catalog::pde_cubic(63);
  const double target = 1.0 / (2.0 * discrete_laplacian_lowest_eigenvalue(*J.space->grid()));
  const auto pde = estimate_growth_constants(J, {}, {});
  const double rel = std::abs(pde.beta_star() - target) / target;
  o.detail << "; pde m=63 beta*=" << pde.beta_star() << " target=" << target << " rel=" << rel;
  o.check(rel <= 0.01, "pde beta* within 1%");
}

// 2: three solutions of the double well
void three_solutions(Outcome& o) {
  const auto J = catalog::doublewell1d();
  const auto C = ConvexSetSpec::whole_space(J.space);
  MultistartOptions inner;
  inner.seed = 1;
  AscentOptions ao;
  ao.inner = inner;
  const auto a = ascend_to_tilde_y(J, 1.0, C, J.space->make({0.1}), ao, {});
  const double ty = std::abs(a.tilde_y[0]);
  o.detail << "outcome=" << to_string(a.outcome) << " |y~|=" << ty;
  o.check(a.outcome == AscentOutcome::tie_found, "tie found");
  o.check(ty < 1e-5, "|y~| < 1e-5");
  if (a.report.distinct_minima_count < 2) {
    o.check(false, "two global minima at y~");
    return;
  }
  const EnergyParams p{1.0, a.tilde_y};
  const auto& m1 = a.report.points[0];
  const auto& m2 = a.report.points[1];
  const auto mp = mountain_pass(J, p, m1, m2, {});
  const std::vector<std::pair<const CriticalPoint*, double>> expected{
      {&m1, m1.x[0] < 0 ? -0.5 : 0.5}, {&m2, m2.x[0] < 0 ? -0.5 : 0.5}, {&mp, 0.0}};
  for (const auto& [cp, target] : expected) {
    o.check(verify_solution(J, p, cp->x, {}).is_equation_solution, "verify_solution");
    o.check(std::abs(cp->x[0] - target) <= 1e-6, "point within 1e-6 of " + std::to_string(target));
  }
  o.check(m1.x[0] * m2.x[0] < 0, "minima on opposite sides");
  o.detail << " minima=" << m1.x[0] << "," << m2.x[0] << " E=" << m1.energy << "," << m2.energy << " third=" << mp.x[0]
           << " E3=" << mp.energy;
  o.check(std::abs(m1.energy - m2.energy) <= 1e-9, "minimum energies agree to 1e-9");
  o.check(std::abs(m1.energy + 1.0 / 16.0) <= 1e-9, "minimum energy = -1/16");
  o.check(mp.energy > std::max(m1.energy, m2.energy), "third energy strictly greater");
}

// 3: Dirichlet problem and sweep
void dirichlet(Outcome& o) {
  const auto J = catalog::pde_cubic(63);
  const EnergyParams p{2.0 * kPi2, J.space->zero()};
  MultistartOptions ms;
  ms.seed = 1;
  const auto r = find_global_minima(J, p, ms, {});
  o.detail << "minima=" << r.distinct_minima_count;
  if (r.distinct_minima_count != 2) {
    o.check(false, "two global minima at lambda = 2 pi^2");
    return;
  }
  const auto mp = mountain_pass(J, p, r.points[0], r.points[1], {});
  double worst = 0.0;
  for (const Vector* x : {&r.points[0].x, &r.points[1].x, &mp.x}) {
    worst = std::max(worst, verify_solution(J, p, *x, {}).weak_residual);
  }
  const double gap = std::abs(r.points[0].energy - r.points[1].energy);
  o.detail << " E=" << r.points[0].energy << " gap=" << gap << " weak_residual=" << worst
           << " |third|=" << J.space->norm(mp.x);
  o.check(worst < 1e-8, "weak residual < 1e-8");
  o.check(gap < 1e-9, "energy gap < 1e-9");
  o.check(J.space->norm(mp.x) <= 1e-6, "third solution is u = 0");
  o.check(mp.energy > r.points[0].energy, "third energy above the minima");

  const double l1 = discrete_laplacian_lowest_eigenvalue(*J.space->grid());
  o.detail << "; sweep";
  for (double factor : {0.5, 0.9, 0.99, 1.5, 2.0, 3.0}) {
    const auto s = find_global_minima(J, {factor * l1, J.space->zero()}, ms, {});
    o.detail << " " << factor << ":" << s.distinct_minima_count;
    const std::size_t want = factor < 1.0 ? 1 : 2;
    o.check(s.distinct_minima_count == want, "sweep count at " + std::to_string(factor) + " lambda_1h");
  }
}

// 4: dichotomy on hand-audited and random instances
void minimax_dichotomy(Outcome& o) {
  using namespace minimax;
  const auto two = two_point_instance();
  const auto a = audit_dichotomy(two);
  const auto& full = a.covers.front().sets.front();
  o.detail << "two-point lhs=" << format_rational(full.lhs.value) << " rhs=" << format_rational(full.rhs.value)
           << " branch=" << to_string(a.branch);
  o.check(full.lhs.value == Rational(-1, 8) && full.rhs.value == 0, "two-point values");
  o.check(a.branch == Branch::a_holds, "two-point branch a_holds");

  const auto sym = audit_symmetric(symmetric_three_point_instance());
  const auto& s = sym.covers.front().sets.front();
  o.detail << "; symmetric lhs=" << format_rational(s.lhs.value) << " rhs=" << format_rational(s.rhs.value)
           << " b1=" << (sym.b1_holds && *sym.b1_holds);
  o.check(s.lhs.value == s.rhs.value, "symmetric equality");
  o.check(sym.b1_holds && *sym.b1_holds, "(b1) verified");

  std::size_t alarms = 0;
  Rng rng = make_stream(2024, 4);
  for (int i = 0; i < 1000; ++i) {
    alarms += audit_dichotomy(random_dichotomy_instance(rng, {})).violation;
    alarms += audit_strict_gap(random_strict_gap_instance(rng, {})).violation;
    alarms += audit_symmetric(random_symmetric_instance(rng, {})).violation;
  }
  o.detail << "; random 3x1000 alarms=" << alarms;
  o.check(alarms == 0, "zero alarms");
}

// 5: witnesses in every cover
void witness_search(Outcome& o) {
  using namespace minimax;
  Rng rng = make_stream(2024, 5);
  std::size_t covers = 0;
  std::size_t chains = 0;
  std::size_t alarms = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto inst = random_strict_gap_instance(rng, {});
    const auto r = audit_strict_gap(inst);
    for (std::size_t c = 0; c < r.covers.size(); ++c) {
      ++covers;
      if (inst.effective_covers()[c].sets().size() > 1) ++chains;
      if (!r.covers[c].witness) ++alarms;
      else if (!(r.covers[c].sets[*r.covers[c].witness].lhs.value < r.covers[c].sets[*r.covers[c].witness].rhs.value)) {
        ++alarms;
      }
    }
  }
  o.detail << "covers=" << covers << " non-trivial=" << chains << " alarms=" << alarms;
  o.check(chains > 0, "non-trivial covers exercised");
  o.check(alarms == 0, "every cover has a certified witness");
}

// 6: no global minimum for the decomposable functional
void no_global_minimum(Outcome& o) {
  using namespace decomposable;
  const auto F = catalog_functionals("inverse");
  const auto P = MeasurePartition::uniform(8);
  const auto X = DecomposableSetSpec::unbounded(8);
  Rng rng = make_stream(2024, 6);
  std::normal_distribution<double> d(0.0, 1.0);
  std::uniform_real_distribution<double> log_scale(-2.0, 3.0);
  std::vector<SimpleFunction> candidates;
  for (int i = 0; i < 1000; ++i) {
    const double scale = std::pow(10.0, log_scale(rng));
    SimpleFunction u;
    for (std::size_t c = 0; c < P.size(); ++c) u.values.push_back({scale * d(rng)});
    // every fourth candidate is symmetrized so that the g-integral vanishes
    if (i % 4 == 0) {
      for (std::size_t c = 0; c < P.size() / 2; ++c) u.values[P.size() - 1 - c] = {-u.values[c][0]};
    }
    candidates.push_back(std::move(u));
  }
  const auto report = no_min_audit(P, F, X, candidates, rng);
  std::size_t beaten = 0;
  double min_margin = INFINITY;
  for (const auto& row : report.rows) {
    beaten += row.beaten;
    min_margin = std::min(min_margin, row.margin);
  }
  o.detail << "beaten=" << beaten << "/" << candidates.size() << " min_margin=" << min_margin;
  o.check(beaten == candidates.size() && report.alarms == 0, "descent beats every candidate");

  const auto trace = iterate_descent(P, F, SimpleFunction::constant(8, {0.0}), X, 6);
  bool positive = true;
  for (const auto& row : trace) positive = positive && row.J > 0.0;
  o.detail << "; iterated J=" << trace.back().J;
  o.check(trace.back().J < 1e-3, "iterated J below 1e-3");
  o.check(positive, "J > 0 along the iteration");

  for (std::size_t n : {1u, 2u}) {
    const auto r = lambda_interval_minimax_check(MeasurePartition::uniform(n), F, {std::vector<double>(n, 1.0), true}, {});
    o.detail << "; n=" << n << " lhs=" << r.lhs << " rhs=" << r.rhs << " gap=" << r.sampling_gap;
    o.check(r.pass, "Lambda_h equality within the sampling gap at n=" + std::to_string(n));
  }
}

// 7: gradients, Riesz maps, concavity
void hygiene(Outcome& o) {
  std::vector<double> xi, f;
  for (int k = -40; k <= 40; ++k) {
    xi.push_back(0.05 * k);
    f.push_back(0.05 * k - std::pow(0.05 * k, 3));
  }
  const std::vector<FunctionalOracle> oracles{
      catalog::doublewell1d(), catalog::quadratic(3), catalog::pde_cubic(63),
      pde_functional(catalog::tabulated_nonlinearity(xi, f), Space::dirichlet_h10(Grid1D(63)))};
  double worst_grad = 0.0;
  double worst_riesz = 0.0;
  Rng rng = make_stream(2024, 7);
  for (const auto& J : oracles) {
    for (int t = 0; t < 50; ++t) {
      const Vector x = random_vector(*J.space, rng, 0.6);
      Vector v = random_vector(*J.space, rng, 1.0);
      v *= 1.0 / J.space->norm(v);
      const double exact = J.space->inner(J.grad(x), v);
      worst_grad = std::max(worst_grad, std::abs(directional_difference(J, x, v, 1e-5) - exact) / (1.0 + std::abs(exact)));
      const Vector dual = random_vector(*J.space, rng, 1.0);
      double plain = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < dual.size(); ++i) {
        plain += dual[i] * v[i];
        scale += std::abs(dual[i] * v[i]);
      }
      worst_riesz = std::max(worst_riesz, std::abs(J.space->inner(J.space->riesz(dual), v) - plain) / (1.0 + scale));
    }
  }
  o.detail << "grad_fd=" << worst_grad << " riesz=" << worst_riesz;
  o.check(worst_grad <= 1e-6, "gradient vs finite differences 1e-6");
  o.check(worst_riesz <= 1e-10, "Riesz consistency 1e-10");

  struct Case {
    FunctionalOracle J;
    double lambda;
    double y_scale;
  };
  const std::vector<Case> cases{{catalog::doublewell1d(), 1.0, 0.5}, {catalog::pde_cubic(63), 2.0 * kPi2, 0.3}};
  for (const auto& c : cases) {
    std::vector<ConcavityTriple> triples;
    for (int t = 0; t < 100; ++t) {
      std::uniform_real_distribution<double> r(0.0, c.y_scale);
      Vector y1 = random_vector(*c.J.space, rng, 1.0);
      Vector y2 = random_vector(*c.J.space, rng, 1.0);
      y1 *= r(rng) / c.J.space->norm(y1);
      y2 *= r(rng) / c.J.space->norm(y2);
      triples.push_back({y1, y2, {0.5}});
    }
    MultistartOptions ms;
    ms.seed = 7;
    ms.n_starts = 16;
    const auto audit = concavity_audit(c.J, c.lambda, triples, ms, {});
    o.detail << "; concavity " << c.J.label << " violations=" << audit.violations << "/" << audit.rows.size();
    o.check(audit.pass(), "concavity audit on " + c.J.label);
  }
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;  // 0: none
    std::function<void(Outcome&)> body;
  };
  const std::vector<Criterion> criteria{
      {1, "growth constants", 10.0, constants},
      {2, "three solutions (double well)", 30.0, three_solutions},
      {3, "Dirichlet demo and lambda sweep", 120.0, dirichlet},
      {4, "minimax dichotomy", 60.0, minimax_dichotomy},
      {5, "strict-gap witness search", 60.0, witness_search},
      {6, "no global minimum (decomposable)", 60.0, no_global_minimum},
      {7, "numerical hygiene", 0.0, hygiene},
  };
  std::printf("simd: %s\n", std::string(kernels::to_string(kernels::active())).c_str());
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0) o.check(secs < c.budget_s, "runtime budget " + std::to_string(c.budget_s) + " s");
    std::printf("criterion %d %-36s %s  %.2fs  %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs,
                o.detail.str().c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
