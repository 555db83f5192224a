#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "varlab/catalog.hpp"
#include "varlab/ysearch.hpp"

using namespace varlab;

namespace {

constexpr double kDwValue = -0.11478988427082659;  // v(0.1), independent root solve

Vector point(const FunctionalOracle& J, double x) { return J.space->make({x}); }

Vector random_vector(const Space& s, Rng& rng, double scale) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> c(s.dim());
  for (double& x : c) x = d(rng);
  return s.make(std::move(c));
}

}  // namespace

TEST(ValueFunction, DoubleWellValues) {
  const auto J = catalog::doublewell1d();
  const auto at0 = value_function(J, 1.0, point(J, 0.0), {}, {});
  EXPECT_NEAR(at0.value, -1.0 / 16.0, 1e-12);
  EXPECT_EQ(at0.minimizers.size(), 2u);
  const auto at01 = value_function(J, 1.0, point(J, 0.1), {}, {});
  EXPECT_NEAR(at01.value, kDwValue, 1e-12);
  EXPECT_EQ(at01.minimizers.size(), 1u);
  // even in y because J is even
  EXPECT_NEAR(value_function(J, 1.0, point(J, -0.1), {}, {}).value, at01.value, 1e-12);
}

TEST(ValueFunction, ZeroFunctional) {
  // v(y) = -|y|^2 / 2
  const auto s = Space::euclidean(3);
  const auto J = catalog::zero(s);
  const Vector y = s->make({1.0, -2.0, 0.5});
  EXPECT_NEAR(value_function(J, 1.0, y, {}, {}).value, -0.5 * s->norm_squared(y), 1e-10);
}

TEST(Ascent, DoubleWellReachesTheTie) {
  const auto J = catalog::doublewell1d();
  const auto C = ConvexSetSpec::whole_space(J.space);
  const auto r = ascend_to_tilde_y(J, 1.0, C, point(J, 0.1), {}, {});
  ASSERT_EQ(r.outcome, AscentOutcome::tie_found);
  EXPECT_LT(std::abs(r.tilde_y[0]), 1e-5);
  EXPECT_EQ(r.report.distinct_minima_count, 2u);
  EXPECT_NEAR(r.value, -1.0 / 16.0, 1e-9);
  // trace values only increase (v is concave and steps are ascent steps)
  for (std::size_t k = 1; k < r.trace.size(); ++k) EXPECT_GE(r.trace[k].value, r.trace[k - 1].value - 1e-12);
}

TEST(Ascent, ZeroFunctionalHasNoMultiplication) {
  const auto s = Space::euclidean(2);
  const auto J = catalog::zero(s);
  AscentOptions o;
  o.max_steps = 60;
  const auto r = ascend_to_tilde_y(J, 1.0, ConvexSetSpec::whole_space(s), s->make({0.4, -0.2}), o, {});
  EXPECT_EQ(r.outcome, AscentOutcome::no_multiplication);
  EXPECT_EQ(r.report.distinct_minima_count, 1u);
  EXPECT_STREQ(to_string(r.outcome), "no_multiplication_detected");
}

TEST(Ascent, IteratesStayInTheConstraintSet) {
  // ball not containing 0: the tie at y = 0 is unreachable, the maximizer is on the sphere
  const auto J = catalog::doublewell1d();
  const auto C = ConvexSetSpec::ball(J.space, point(J, 0.3), 0.1);
  AscentOptions o;
  o.max_steps = 80;
  const auto r = ascend_to_tilde_y(J, 1.0, C, point(J, 0.35), o, {});
  EXPECT_TRUE(C.contains(r.tilde_y, 1e-9));
  EXPECT_NE(r.outcome, AscentOutcome::tie_found);
  EXPECT_NEAR(r.tilde_y[0], 0.2, 1e-6);
}

TEST(Ascent, PdeFromRandomStartFindsTwoMinima) {
  const auto J = catalog::pde_cubic(31);
  const double lambda = 2.0 * std::numbers::pi * std::numbers::pi;
  Rng rng = make_stream(3, 0);
  Vector y0 = random_vector(*J.space, rng, 1.0);
  y0 *= 0.05 / J.space->norm(y0);
  AscentOptions o;
  o.inner.n_starts = 16;
  const auto r = ascend_to_tilde_y(J, lambda, ConvexSetSpec::whole_space(J.space), y0, o, {});
  ASSERT_EQ(r.outcome, AscentOutcome::tie_found);
  ASSERT_GE(r.report.distinct_minima_count, 2u);
  EXPECT_NEAR(r.report.points[0].energy, r.report.points[1].energy,
              10.0 * SolverTolerances{}.cluster_energy_tol(r.report.points[0].energy));
}

TEST(Concavity, DoubleWellRandomTriples) {
  const auto J = catalog::doublewell1d();
  Rng rng = make_stream(8, 0);
  std::vector<ConcavityTriple> triples;
  for (int i = 0; i < 20; ++i) triples.push_back({random_vector(*J.space, rng, 0.5), random_vector(*J.space, rng, 0.5), {0.25, 0.5, 0.75}});
  triples.push_back({point(J, 0.2), point(J, 0.2), {0.5}});
  const auto audit = concavity_audit(J, 1.0, triples, {}, {});
  EXPECT_TRUE(audit.pass());
  EXPECT_EQ(audit.rows.size(), 20u * 3u + 1u);
  // y1 == y2 is an equality row
  EXPECT_NEAR(audit.rows.back().v_mix, audit.rows.back().chord, 1e-12);
}

TEST(Concavity, ZeroFunctionalWithoutSlack) {
  // v(y) = -|y|^2/2 is strictly concave; the exact minimizer y makes the audit tight
  const auto s = Space::euclidean(2);
  const auto J = catalog::zero(s);
  Rng rng = make_stream(2, 0);
  std::vector<ConcavityTriple> triples;
  for (int i = 0; i < 10; ++i) triples.push_back({random_vector(*s, rng, 1.0), random_vector(*s, rng, 1.0), {0.5}});
  const auto audit = concavity_audit(J, 1.0, triples, {}, {}, 0.0);
  EXPECT_EQ(audit.slack, 0.0);
  EXPECT_TRUE(audit.pass());
  for (const auto& row : audit.rows) EXPECT_GT(row.v_mix, row.chord);
}

TEST(StrictInequality, DoubleWell) {
  const auto J = catalog::doublewell1d();
  const auto v = value_function(J, 1.0, point(J, 0.0), {}, {});
  std::vector<Vector> ys;
  for (int k = -10; k <= 10; ++k) ys.push_back(point(J, 0.05 * k));
  const auto w = strict_inequality_witness(J, 1.0, v.minimizers, ys, {}, {});
  EXPECT_TRUE(w.strict);
  EXPECT_NEAR(w.sup_inf, -1.0 / 16.0, 1e-9);
  // at x = 1/2 the max over sampled y of Phi is reached at y = -0.5: -1/16 + 1/4
  EXPECT_NEAR(w.inf_sup, -1.0 / 16.0 + 0.25, 1e-9);
}
