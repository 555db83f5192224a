#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "varlab/catalog.hpp"
#include "varlab/errors.hpp"
#include "varlab/solve.hpp"

using namespace varlab;

namespace {

// Frozen from an independent bracketing root solve of 4x^3 - x - 0.1 = 0 and
// an independent BFGS + Newton solve of the m = 63 grid problem at 2 pi^2.
constexpr double kDwRoot = 0.5440169573456447;
constexpr double kDwValue = -0.11478988427082659;
constexpr double kPdeMinEnergy = -0.8442834796276311;
constexpr double kPdeMinPeak = 0.8008327229449418;

const double kPi2 = std::numbers::pi * std::numbers::pi;

Vector point(const FunctionalOracle& J, double x) { return J.space->make({x}); }

double max_abs(const Vector& v) {
  double m = 0.0;
  for (double c : v.coords()) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

TEST(LocalDescend, DoubleWellFromThePositiveSide) {
  const auto J = catalog::doublewell1d();
  const EnergyParams p{1.0, J.space->zero()};
  std::vector<double> trace;
  const auto cp = local_descend(J, p, point(J, 0.3), {}, &trace);
  EXPECT_TRUE(cp.converged);
  EXPECT_NEAR(cp.x[0], 0.5, 1e-8);
  EXPECT_NEAR(cp.energy, -1.0 / 16.0, 1e-12);
  ASSERT_FALSE(trace.empty());
  EXPECT_DOUBLE_EQ(trace.front(), energy(J, p, point(J, 0.3)));
  // accepted iterates never increase the energy beyond rounding
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1] + 1e-14);
}

TEST(LocalDescend, CriticalStartTakesNoSteps) {
  const auto J = catalog::doublewell1d();
  const auto cp = local_descend(J, {1.0, J.space->zero()}, point(J, 0.0), {});
  EXPECT_TRUE(cp.converged);
  EXPECT_EQ(cp.iterations, 0u);
  EXPECT_EQ(cp.x[0], 0.0);
}

TEST(LocalDescend, ZeroFunctionalLandsOnY) {
  const auto space = Space::dirichlet_h10(Grid1D(15));
  const auto J = catalog::zero(space);
  std::vector<double> c(15);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::sin(0.7 * static_cast<double>(i));
  const Vector y = space->make(c);
  const auto cp = local_descend(J, {3.0, y}, space->zero(), {});
  EXPECT_TRUE(cp.converged);
  EXPECT_LE(space->distance(cp.x, y), 1e-8);
}

TEST(LocalDescend, EnergyIsMonotoneOnThePdeProblem) {
  const auto J = catalog::pde_cubic(31);
  const EnergyParams p{2.0 * kPi2, J.space->zero()};
  std::vector<double> c;
  for (double x : J.space->grid()->nodes()) c.push_back(0.1 * std::sin(std::numbers::pi * x) + 0.05 * x);
  std::vector<double> trace;
  const auto cp = local_descend(J, p, J.space->make(c), {}, &trace);
  EXPECT_TRUE(cp.converged);
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1] + 1e-13);
  EXPECT_LT(cp.energy, 0.0);
}

TEST(GlobalMinima, DoubleWellSymmetric) {
  const auto J = catalog::doublewell1d();
  MultistartOptions o;
  o.seed = 1;
  const auto r = find_global_minima(J, {1.0, J.space->zero()}, o, {});
  ASSERT_EQ(r.distinct_minima_count, 2u);
  std::vector<double> xs{r.points[0].x[0], r.points[1].x[0]};
  std::sort(xs.begin(), xs.end());
  EXPECT_NEAR(xs[0], -0.5, 1e-8);
  EXPECT_NEAR(xs[1], 0.5, 1e-8);
  EXPECT_NEAR(r.points[0].energy, r.points[1].energy, 1e-12);
  EXPECT_EQ(r.points[0].kind, PointKind::global_min);
  EXPECT_EQ(r.diagnostics.starts, o.n_starts);
  // global minima are listed first
  bool seen_other = false;
  for (const auto& cp : r.points) {
    if (cp.kind != PointKind::global_min) seen_other = true;
    else EXPECT_FALSE(seen_other);
  }
}

TEST(GlobalMinima, TiltedDoubleWellIsUnique) {
  const auto J = catalog::doublewell1d();
  const auto r = find_global_minima(J, {1.0, point(J, 0.1)}, {}, {});
  ASSERT_EQ(r.distinct_minima_count, 1u);
  EXPECT_NEAR(r.points[0].x[0], kDwRoot, 1e-9);
  EXPECT_NEAR(r.points[0].energy, kDwValue, 1e-12);
}

TEST(GlobalMinima, ReproducibleForFixedSeed) {
  const auto J = catalog::pde_cubic(15);
  MultistartOptions o;
  o.seed = 42;
  o.n_starts = 12;
  const EnergyParams p{2.0 * kPi2, J.space->zero()};
  const auto a = find_global_minima(J, p, o, {});
  const auto b = find_global_minima(J, p, o, {});
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].energy, b.points[i].energy);
    EXPECT_EQ(a.points[i].basin_seed, b.points[i].basin_seed);
  }
}

TEST(GlobalMinima, PdeAboveThresholdHasTwoSymmetricMinima) {
  const auto J = catalog::pde_cubic(63);
  const auto r = find_global_minima(J, {2.0 * kPi2, J.space->zero()}, {}, {});
  ASSERT_EQ(r.distinct_minima_count, 2u);
  const auto& a = r.points[0];
  const auto& b = r.points[1];
  EXPECT_NEAR(a.energy, kPdeMinEnergy, 1e-9);
  EXPECT_NEAR(b.energy, kPdeMinEnergy, 1e-9);
  EXPECT_NEAR(max_abs(a.x), kPdeMinPeak, 1e-6);
  // odd symmetry: the two minima are negatives of each other
  EXPECT_LE(J.space->distance(a.x, -b.x), 1e-6);
}

TEST(GlobalMinima, PdeBelowThresholdOnlyZero) {
  const auto J = catalog::pde_cubic(63);
  const double l1 = discrete_laplacian_lowest_eigenvalue(*J.space->grid());
  const auto r = find_global_minima(J, {0.5 * l1, J.space->zero()}, {}, {});
  ASSERT_EQ(r.distinct_minima_count, 1u);
  EXPECT_LE(J.space->norm(r.points[0].x), 1e-6);
}

TEST(GlobalMinima, ExtraStartsAreTagged) {
  const auto J = catalog::doublewell1d();
  MultistartOptions o;
  o.n_starts = 2;
  o.extra_starts = {point(J, 0.0)};
  const auto r = find_global_minima(J, {1.0, J.space->zero()}, o, {});
  ASSERT_EQ(r.starts.size(), 3u);
  EXPECT_EQ(r.starts[2].result.basin_seed, "extra:0");
  EXPECT_EQ(r.starts[0].result.basin_seed, "random:0");
}

TEST(GlobalMinima, NoConvergenceIsReported) {
  const auto J = catalog::doublewell1d();
  SolverTolerances tol;
  tol.max_iterations = 0;
  tol.newton_max_dim = 0;
  MultistartOptions o;
  o.n_starts = 4;
  try {
    (void)find_global_minima(J, {1.0, J.space->zero()}, o, tol);
    ADD_FAILURE() << "expected no_convergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_convergence);
  }
}

TEST(MountainPass, DoubleWellSaddleAtZero) {
  const auto J = catalog::doublewell1d();
  const EnergyParams p{1.0, J.space->zero()};
  const auto a = local_descend(J, p, point(J, -0.3), {});
  const auto b = local_descend(J, p, point(J, 0.3), {});
  const auto mp = mountain_pass(J, p, a, b, {});
  EXPECT_EQ(mp.kind, PointKind::mountain_pass);
  EXPECT_NEAR(mp.x[0], 0.0, 1e-8);
  EXPECT_GT(mp.energy, a.energy);
  EXPECT_LE(mp.residual, 1e-8);
  // one negative direction
  const auto eig = energy_hessian_eigenvalues(J, p, mp.x);
  EXPECT_LT(eig(0), 0.0);
  const auto eig_min = energy_hessian_eigenvalues(J, p, b.x);
  EXPECT_GT(eig_min(0), 0.0);
}

TEST(MountainPass, PdeRecoversZero) {
  const auto J = catalog::pde_cubic(63);
  const EnergyParams p{2.0 * kPi2, J.space->zero()};
  const auto r = find_global_minima(J, p, {}, {});
  ASSERT_EQ(r.distinct_minima_count, 2u);
  const auto mp = mountain_pass(J, p, r.points[0], r.points[1], {});
  EXPECT_LE(J.space->norm(mp.x), 1e-6);
  EXPECT_LT(verify_solution(J, p, mp.x, {}).weak_residual, 1e-8);
  const auto eig = energy_hessian_eigenvalues(J, p, mp.x);
  EXPECT_LT(eig(0), 0.0);
  // Morse index one: the second eigenvalue lambda_2 = 4 pi^2 > 2 pi^2
  EXPECT_GT(eig(1), 0.0);
}

TEST(MountainPass, CoincidentEndpointsHaveNoBarrier) {
  const auto J = catalog::doublewell1d();
  const EnergyParams p{1.0, J.space->zero()};
  const auto b = local_descend(J, p, point(J, 0.3), {});
  try {
    (void)mountain_pass(J, p, b, b, {});
    ADD_FAILURE() << "expected no_barrier";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_barrier);
  }
}

TEST(MountainPass, ConvexEnergyHasNoBarrier) {
  // J = 0: Phi is strictly convex, so two distinct points are never separated
  const auto space = Space::euclidean(2);
  const auto J = catalog::zero(space);
  const EnergyParams p{1.0, space->zero()};
  CriticalPoint a;
  a.x = space->make({1.0, 0.0});
  a.energy = energy(J, p, a.x);
  CriticalPoint b;
  b.x = space->make({-1.0, 0.5});
  b.energy = energy(J, p, b.x);
  EXPECT_THROW((void)mountain_pass(J, p, a, b, {}), Error);
}

TEST(DeflatedNewton, FindsTheThirdRootOfTheDoubleWell) {
  const auto J = catalog::doublewell1d();
  const EnergyParams p{1.0, J.space->zero()};
  std::vector<CriticalPoint> known{local_descend(J, p, point(J, -0.3), {}), local_descend(J, p, point(J, 0.3), {})};
  const auto cp = deflated_newton(J, p, known, point(J, 0.2), {});
  ASSERT_TRUE(cp.converged);
  EXPECT_NEAR(cp.x[0], 0.0, 1e-8);
}

TEST(DeflatedNewton, DoesNotReturnAKnownRoot) {
  const auto J = catalog::doublewell1d();
  const EnergyParams p{1.0, J.space->zero()};
  std::vector<CriticalPoint> known{local_descend(J, p, point(J, -0.3), {}), local_descend(J, p, point(J, 0.3), {}),
                                   local_descend(J, p, point(J, 0.0), {})};
  const auto cp = deflated_newton(J, p, known, point(J, 0.45), {});
  // all three roots are known, so nothing new can converge
  EXPECT_FALSE(cp.converged);
}

TEST(Verify, DistinguishesSolutionsFromOtherPoints) {
  const auto J = catalog::doublewell1d();
  const EnergyParams p{1.0, J.space->zero()};
  EXPECT_TRUE(verify_solution(J, p, point(J, 0.5), {}).is_equation_solution);
  EXPECT_TRUE(verify_solution(J, p, point(J, -0.5), {}).is_equation_solution);
  const auto v = verify_solution(J, p, point(J, 0.4), {});
  EXPECT_FALSE(v.is_equation_solution);
  // x - lambda J'(x) = 0.4 - (0.8 - 0.256)
  EXPECT_NEAR(v.residual, std::abs(0.4 - 0.8 + 4.0 * 0.064), 1e-14);
}

TEST(Verify, WeakResidualTestsAgainstHatFunctions) {
  const auto J = catalog::pde_cubic(7);
  const EnergyParams p{2.0 * kPi2, J.space->zero()};
  const Vector x = J.space->make({0.1, 0.2, 0.3, 0.4, 0.3, 0.2, 0.1});
  const auto v = verify_solution(J, p, x, {});
  const Vector g = J.space->gram(energy_gradient(J, p, x));
  EXPECT_NEAR(v.weak_residual, max_abs(g), 1e-14);
}

TEST(Hessian, JacobianIsSymmetricInTheMetric) {
  const auto J = catalog::pde_cubic(11);
  const EnergyParams p{2.0 * kPi2, J.space->zero()};
  std::vector<double> c(11);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.3 * std::cos(static_cast<double>(i));
  const Vector x = J.space->make(c);
  const Eigen::MatrixXd jac = gradient_jacobian(J, p, x);
  Eigen::MatrixXd G(11, 11);
  for (std::size_t j = 0; j < 11; ++j) {
    Vector e = J.space->zero();
    e[j] = 1.0;
    const Vector col = J.space->gram(e);
    for (std::size_t i = 0; i < 11; ++i) G(i, j) = col[i];
  }
  const Eigen::MatrixXd H = G * jac;
  EXPECT_LE((H - H.transpose()).cwiseAbs().maxCoeff(), 1e-6 * H.cwiseAbs().maxCoeff());
}
