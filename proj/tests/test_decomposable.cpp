#include <cmath>

#include <gtest/gtest.h>

#include "varlab/decomposable.hpp"
#include "varlab/errors.hpp"

using namespace varlab;
using namespace varlab::decomposable;

namespace {

// min over |u| <= 1 of 1/(1+|u|) + u^2, from an independent root solve of 2u(1+u)^2 = 1
constexpr double kSingleCellRhs = 0.8592189874114478;

SimpleFunction random_simple(std::size_t n, std::size_t dim, Rng& rng, double scale) {
  std::normal_distribution<double> d(0.0, scale);
  SimpleFunction u;
  for (std::size_t i = 0; i < n; ++i) {
    Point p(dim);
    for (double& c : p) c = d(rng);
    u.values.push_back(std::move(p));
  }
  return u;
}

DecomposableSetSpec bounded(std::size_t n, double h) { return {std::vector<double>(n, h), true}; }

}  // namespace

TEST(Partition, UniformAndRefine) {
  const auto P = MeasurePartition::uniform(4);
  EXPECT_DOUBLE_EQ(P.total_mass(), 1.0);
  const auto R = P.refine();
  ASSERT_EQ(R.size(), 8u);
  EXPECT_DOUBLE_EQ(R.total_mass(), 1.0);
  EXPECT_DOUBLE_EQ(R.weights[3], 0.125);
  EXPECT_THROW(MeasurePartition({0.5, -0.1}), Error);
}

TEST(J16, ClosedFormValues) {
  const auto F = catalog_functionals("inverse");
  const auto P = MeasurePartition::uniform(2);
  // u = (1, -1): f = 1/2 on both cells, g cancels
  const SimpleFunction u{{{1.0}, {-1.0}}};
  EXPECT_DOUBLE_EQ(integral_f(P, F, u), 0.5);
  EXPECT_DOUBLE_EQ(integral_g(P, F, u), 0.0);
  EXPECT_DOUBLE_EQ(eval_J16(P, F, u), 0.5);
  // constant 0: f = 1, g = 0
  EXPECT_DOUBLE_EQ(eval_J16(P, F, SimpleFunction::constant(2, {0.0})), 1.0);
  // constant 1: f = 1/2, g-integral 1
  EXPECT_DOUBLE_EQ(eval_J16(P, F, SimpleFunction::constant(2, {1.0})), 1.5);
}

TEST(J16, RefinementPreservesIntegrals) {
  Rng rng = make_stream(1, 0);
  for (const auto& name : catalog_names()) {
    const auto F = catalog_functionals(name, 2);
    const auto P = MeasurePartition({0.1, 0.3, 0.6});
    const auto u = random_simple(3, 2, rng, 2.0);
    EXPECT_NEAR(eval_J16(P.refine(), F, u.refine()), eval_J16(P, F, u), 1e-14);
  }
}

TEST(J16, EvenUnderNegation) {
  Rng rng = make_stream(2, 0);
  const auto F = catalog_functionals("exp", 2);
  const auto P = MeasurePartition::uniform(5);
  for (int i = 0; i < 10; ++i) {
    const auto u = random_simple(5, 2, rng, 1.0);
    EXPECT_NEAR(eval_J16(P, F, u.negated()), eval_J16(P, F, u), 1e-14);
  }
}

TEST(J16, Hypotheses) {
  Rng rng = make_stream(3, 0);
  for (const auto& name : catalog_names()) {
    EXPECT_TRUE(check_hypotheses(catalog_functionals(name, 2), 4, 64, rng).pass()) << name;
  }
  EXPECT_THROW(catalog_functionals("nope"), Error);
}

TEST(Mix, SplicesCells) {
  const SimpleFunction u{{{1.0}, {2.0}, {3.0}}};
  const SimpleFunction v{{{-1.0}, {-2.0}, {-3.0}}};
  const auto w = mix(u, v, {0, 2});
  EXPECT_EQ(w.values[0][0], 1.0);
  EXPECT_EQ(w.values[1][0], -2.0);
  EXPECT_EQ(w.values[2][0], 3.0);
}

TEST(Sets, DecomposableClosure) {
  Rng rng = make_stream(4, 0);
  const DecomposableSetSpec X = bounded(6, 1.5);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 50; ++trial) {
    auto u = random_simple(6, 2, rng, 0.5);
    auto v = random_simple(6, 2, rng, 0.5);
    for (auto* w : {&u, &v}) {
      for (auto& p : w->values) {
        const double n = norm(p);
        if (n > 1.4) {
          for (double& c : p) c *= 1.4 / n;
        }
      }
    }
    std::vector<std::size_t> cells;
    for (std::size_t i = 0; i < 6; ++i) {
      if (coin(rng)) cells.push_back(i);
    }
    ASSERT_TRUE(X.contains(u));
    EXPECT_TRUE(X.contains(mix(u, v, cells)));
    EXPECT_TRUE(X.contains(u.negated()));
  }
  EXPECT_FALSE(X.contains_constants());
  EXPECT_TRUE(DecomposableSetSpec::unbounded(3).contains_constants());
}

TEST(Sets, BoundsFamilyFiltering) {
  EXPECT_TRUE(bounds_family_is_filtering({{1.0, 2.0}, {2.0, 1.0}, {2.0, 2.0}}));
  EXPECT_FALSE(bounds_family_is_filtering({{1.0, 2.0}, {2.0, 1.0}}));
  // nested family h_k = k is a chain
  EXPECT_TRUE(bounds_family_is_filtering({{1.0}, {2.0}, {3.0}}));
}

TEST(Descent, BeatsConstantsWithBalancedGroups) {
  const auto F = catalog_functionals("inverse");
  const auto P = MeasurePartition::uniform(4);
  const auto X = DecomposableSetSpec::unbounded(4);
  const auto u = SimpleFunction::constant(4, {0.0});
  const auto v = descent_oracle(P, F, u, X);
  EXPECT_LT(eval_J16(P, F, v), eval_J16(P, F, u) - 1e-12);
  EXPECT_NEAR(integral_g(P, F, v), 0.0, 1e-12);
  // magnitude at least 10 (1 + 0) - 1
  for (const auto& p : v.values) EXPECT_GE(std::abs(p[0]), 9.0);
  EXPECT_NEAR(eval_J16(P, F, v), 0.1, 1e-15);
}

TEST(Descent, UnevenWeights) {
  const auto F = catalog_functionals("inverse");
  const auto P = MeasurePartition({0.7, 0.2, 0.1});
  const auto X = DecomposableSetSpec::unbounded(3);
  Rng rng = make_stream(5, 0);
  for (int i = 0; i < 20; ++i) {
    const auto u = random_simple(3, 1, rng, 3.0);
    const auto v = descent_oracle(P, F, u, X);
    EXPECT_LT(eval_J16(P, F, v), eval_J16(P, F, u));
    EXPECT_NEAR(integral_g(P, F, v), 0.0, 1e-9);
  }
}

TEST(Descent, IteratedStaysPositiveAndDecreases) {
  // exp-tailed f underflows the absolute strict margin after two steps
  for (const auto& [name, steps] : {std::pair<std::string, std::size_t>{"inverse", 4}, {"exp", 2}}) {
    const auto F = catalog_functionals(name);
    const auto P = MeasurePartition::uniform(8);
    const auto trace =
        iterate_descent(P, F, SimpleFunction::constant(8, {0.0}), DecomposableSetSpec::unbounded(8), steps);
    ASSERT_EQ(trace.size(), steps + 1);
    for (std::size_t k = 1; k < trace.size(); ++k) {
      EXPECT_LT(trace[k].J, trace[k - 1].J) << name;
      EXPECT_GT(trace[k].J, 0.0) << name;
    }
    EXPECT_LT(trace.back().J, 1e-3) << name;
  }
}

TEST(Descent, BlockedCases) {
  const auto F = catalog_functionals("inverse");
  auto expect_blocked = [&](const MeasurePartition& P, const DecomposableSetSpec& X) {
    try {
      (void)descent_oracle(P, F, SimpleFunction::constant(P.size(), {0.0}), X);
      ADD_FAILURE() << "descent not blocked";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::descent_blocked);
    }
  };
  expect_blocked(MeasurePartition::uniform(1), DecomposableSetSpec::unbounded(1));
  expect_blocked(MeasurePartition::uniform(4), bounded(4, 2.0));
}

TEST(NoMin, RandomCandidatesAreBeaten) {
  const auto F = catalog_functionals("inverse");
  const auto P = MeasurePartition::uniform(6);
  Rng rng = make_stream(6, 0);
  std::vector<SimpleFunction> candidates;
  for (int i = 0; i < 100; ++i) candidates.push_back(random_simple(6, 1, rng, 5.0));
  candidates.push_back(SimpleFunction::constant(6, {0.0}));
  const auto report = no_min_audit(P, F, DecomposableSetSpec::unbounded(6), candidates, rng);
  EXPECT_EQ(report.alarms, 0u);
  EXPECT_TRUE(report.per_cell_min_unsatisfiable);
  ASSERT_EQ(report.rows.size(), candidates.size());
  for (const auto& row : report.rows) EXPECT_TRUE(row.beaten);
  EXPECT_TRUE(report.rows.back().phi_zero);
}

TEST(NoMin, RequiresConstantsAndSymmetry) {
  const auto F = catalog_functionals("inverse");
  const auto P = MeasurePartition::uniform(2);
  Rng rng = make_stream(7, 0);
  auto asym = DecomposableSetSpec::unbounded(2);
  asym.symmetric = false;
  for (const auto& X : {bounded(2, 3.0), asym}) {
    try {
      (void)no_min_audit(P, F, X, {}, rng);
      ADD_FAILURE() << "gate accepted X";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::hypothesis_violated);
    }
  }
}

TEST(LambdaMinimax, TwoCellsAgree) {
  const auto F = catalog_functionals("inverse");
  const auto r = lambda_interval_minimax_check(MeasurePartition::uniform(2), F, bounded(2, 1.0));
  EXPECT_NEAR(r.lhs, 0.5, 1e-12);
  EXPECT_NEAR(r.rhs, 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(r.lambda_lo, -1.0);
  EXPECT_DOUBLE_EQ(r.lambda_hi, 1.0);
  EXPECT_LE(r.sampling_gap, 0.1);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.samples, 201u * 201u);
}

TEST(LambdaMinimax, SingleCellIsAnAtomAndTheSidesDiffer) {
  // One cell of mass 1 is an atom: X_h is not decomposable over a non-atomic
  // measure, and the two sides genuinely differ (0.5 vs about 0.859).
  const auto F = catalog_functionals("inverse");
  const auto r = lambda_interval_minimax_check(MeasurePartition::uniform(1), F, bounded(1, 1.0));
  EXPECT_NEAR(r.lhs, 0.5, 1e-12);
  EXPECT_NEAR(r.rhs, kSingleCellRhs, r.sampling_gap);
  EXPECT_GE(r.rhs, kSingleCellRhs - 1e-15);  // grid minimum cannot undercut the true minimum
  EXPECT_FALSE(r.pass);
}

TEST(LambdaMinimax, CoarseGridIsInconclusive) {
  const auto F = catalog_functionals("inverse");
  MinimaxCheckOptions o;
  o.grid_points = 5;
  const auto r = lambda_interval_minimax_check(MeasurePartition::uniform(2), F, bounded(2, 1.0), o);
  EXPECT_GT(r.sampling_gap, o.max_gap);
  EXPECT_TRUE(r.inconclusive);
  EXPECT_FALSE(r.pass);
}

TEST(LambdaMinimax, SampledInfimumMatchesRhsWithoutPenalty) {
  // with Phi cancelled on two cells, the sampled infimum of J is 0.5
  const auto F = catalog_functionals("inverse");
  EXPECT_NEAR(sampled_infimum(MeasurePartition::uniform(2), F, bounded(2, 1.0), 201), 0.5, 1e-12);
}
