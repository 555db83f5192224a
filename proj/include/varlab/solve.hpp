#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "varlab/energy.hpp"

namespace varlab {

struct SolverTolerances {
  double residual_tol = 1e-8;
  double cluster_dist_tol = 1e-4;
  // cluster_energy_tol = cluster_energy_rel * (1 + |best energy|)
  double cluster_energy_rel = 1e-9;
  std::size_t max_iterations = 100000;
  double hess_tol = 1e-6;
  double barrier_margin_rel = 1e-12;
  std::size_t path_nodes = 33;
  double path_step = 0.5;
  // Newton refinement with a finite-difference Jacobian is used up to this dimension.
  std::size_t newton_max_dim = 2000;

  double cluster_energy_tol(double best) const { return cluster_energy_rel * (1.0 + std::abs(best)); }
};

enum class PointKind { global_min, mountain_pass, other };

const char* to_string(PointKind kind);

struct CriticalPoint {
  Vector x;
  double energy = 0.0;
  double residual = 0.0;  // |x - lambda grad J(x) - y|
  PointKind kind = PointKind::other;
  std::string basin_seed;  // where the start point came from
  bool converged = false;
  std::size_t iterations = 0;
};

// Gradient descent on Phi with Armijo backtracking (Barzilai-Borwein trial
// steps), then Newton polishing when the dimension allows. The optional trace
// receives Phi at every accepted iterate, starting with Phi(x0).
CriticalPoint local_descend(const FunctionalOracle& J, const EnergyParams& p, const Vector& x0,
                            const SolverTolerances& tol, std::vector<double>* energy_trace = nullptr);

struct MultistartOptions {
  std::size_t n_starts = 32;
  std::uint64_t seed = 0;
  // Radius of the start ball; taken from the coercivity sweep when absent.
  std::optional<double> ball_radius;
  double sweep_r0 = 0.125;
  std::size_t sweep_levels = 12;
  std::size_t sweep_directions = 16;
  // Additional deterministic starts appended after the random ones.
  std::vector<Vector> extra_starts;
};

struct StartRecord {
  std::size_t index;
  Vector start;
  CriticalPoint result;
};

struct SolveDiagnostics {
  std::size_t starts = 0;
  std::size_t converged = 0;
  std::size_t unconverged = 0;
  std::size_t total_iterations = 0;
  double ball_radius = 0.0;
};

struct SolveReport {
  std::vector<CriticalPoint> points;  // global minima first
  std::size_t distinct_minima_count = 0;
  double lambda = 0.0;
  Vector y;
  SolveDiagnostics diagnostics;
  std::vector<StartRecord> starts;
};

// Multistart descent, clustering by (cluster_dist_tol, cluster_energy_tol).
// Every cluster within cluster_energy_tol of the best energy is a global minimum.
SolveReport find_global_minima(const FunctionalOracle& J, const EnergyParams& p, const MultistartOptions& options,
                               const SolverTolerances& tol);

// Discretized-path mountain pass between two distinct minima, finished with
// Newton when the dimension allows. Throws no_barrier when the path carries no
// ridge above the endpoints.
CriticalPoint mountain_pass(const FunctionalOracle& J, const EnergyParams& p, const CriticalPoint& a,
                            const CriticalPoint& b, const SolverTolerances& tol);

// Newton on G(x) = grad Phi(x) * prod_k (1 + 1/|x - x_k|^2). The returned point
// has converged == false if Newton stalled or fell back onto a known root.
CriticalPoint deflated_newton(const FunctionalOracle& J, const EnergyParams& p, const std::vector<CriticalPoint>& known,
                              const Vector& x0, const SolverTolerances& tol);

struct Verification {
  double residual = 0.0;       // space norm of x - lambda grad J(x) - y
  double weak_residual = 0.0;  // max_i |<x - lambda grad J(x) - y, phi_i>| over basis functions
  bool is_equation_solution = false;
};

Verification verify_solution(const FunctionalOracle& J, const EnergyParams& p, const Vector& x,
                             const SolverTolerances& tol);

// Central-difference Jacobian of x -> grad Phi(x) in coordinates.
Eigen::MatrixXd gradient_jacobian(const FunctionalOracle& J, const EnergyParams& p, const Vector& x);

// Eigenvalues (ascending) of the symmetrized coordinate Hessian G * Jacobian.
// Its inertia is that of the second variation of Phi.
Eigen::VectorXd energy_hessian_eigenvalues(const FunctionalOracle& J, const EnergyParams& p, const Vector& x);

}  // namespace varlab
