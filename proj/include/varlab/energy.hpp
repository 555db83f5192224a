#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "varlab/random.hpp"
#include "varlab/space.hpp"

namespace varlab {

enum class Parity { even, odd, none };

const char* to_string(Parity parity);

// Value and Riesz gradient of a C^1 functional J on a finite-dimensional
// space: <grad(x), v> = dJ(x)[v]. Oracles hold no mutable state and may be
// evaluated concurrently.
struct FunctionalOracle {
  std::string label;
  SpacePtr space;
  Parity parity = Parity::none;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> grad;
};

// f(x, xi) and its antiderivative F(x, xi) = int_0^xi f(x, t) dt.
struct NonlinearitySpec {
  std::string label;
  std::function<double(double, double)> f;
  std::function<double(double, double)> F;
  double growth_exponent = 0.0;  // metadata only
  // Set for f(xi) = xi - xi^3, which has a vectorized evaluation path.
  bool is_cubic = false;
};

// Discrete J_f(u) = h sum_i F(x_i, u_i) on the H^1_0 grid space, with Riesz
// gradient riesz(h f(x_i, u_i)).
FunctionalOracle pde_functional(const NonlinearitySpec& spec, const SpacePtr& h10_space);

// Parameters of Phi(x) = 1/2 |x|^2 - lambda J(x) - <x, y>.
struct EnergyParams {
  double lambda = 1.0;
  Vector y;
};

double energy(const FunctionalOracle& J, const EnergyParams& p, const Vector& x);
// x - lambda grad J(x) - y; its zeros solve x = lambda J'(x) + y.
Vector energy_gradient(const FunctionalOracle& J, const EnergyParams& p, const Vector& x);

// Open interval ]lower, upper[; an absent upper end means +infinity.
struct LambdaInterval {
  double lower = 0.0;
  std::optional<double> upper;

  bool empty() const { return upper && *upper <= lower; }
  bool contains(double lambda) const { return lambda > lower && (!upper || lambda < *upper); }
};

struct BetaStarOptions {
  std::size_t directions = 32;
  std::size_t refined_directions = 4;
  std::size_t scan_points = 48;
  double t_min = 1e-6;
  double t_max = 1e3;
  double bracket_tol = 1e-10;
  double divergence_cap = 1e12;
  std::size_t refine_iterations = 400;
  std::uint64_t seed = 0;
};

struct BetaStarEstimate {
  double beta_star = 0.0;
  Vector certificate;  // J(certificate)/|certificate|^2 == beta_star
};

// Lower estimate of sup_{x != 0} J(x)/|x|^2. Throws beta_star_infinite when
// the ratio exceeds divergence_cap.
BetaStarEstimate estimate_beta_star(const FunctionalOracle& J, const BetaStarOptions& options);

struct AlphaStarOptions {
  double r0 = 1.0;
  std::size_t levels = 11;  // radii r0 * 2^k, k < levels
  std::size_t directions = 32;
  std::optional<double> analytic_override;
  std::uint64_t seed = 0;
};

struct RadiusRatio {
  double radius;
  double max_ratio;  // max over sampled sphere points of J(x)/|x|^2
};

struct AlphaStarEstimate {
  double alpha_star = 0.0;
  bool reliable = true;
  bool overridden = false;
  std::vector<RadiusRatio> sweep;
};

AlphaStarEstimate estimate_alpha_star(const FunctionalOracle& J, const AlphaStarOptions& options);

struct GrowthConstants {
  BetaStarEstimate beta;
  AlphaStarEstimate alpha;

  double beta_star() const { return beta.beta_star; }
  double alpha_star() const { return alpha.alpha_star; }
  // ]1/(2 beta*), 1/(2 alpha*)[ with 1/0 = +infinity.
  LambdaInterval lambda_interval() const;
};

GrowthConstants estimate_growth_constants(const FunctionalOracle& J, const BetaStarOptions& beta_options,
                                          const AlphaStarOptions& alpha_options);

// Refuses unless 0 < beta* < infinity and alpha* < beta*.
void require_three_solution_hypotheses(const GrowthConstants& constants);
void require_admissible_lambda(const GrowthConstants& constants, double lambda);

struct CoercivitySample {
  double radius;
  double min_energy;  // over sampled points of the sphere of that radius
};

std::vector<CoercivitySample> coercivity_sweep(const FunctionalOracle& J, const EnergyParams& p, double r0,
                                               std::size_t levels, std::size_t directions, std::uint64_t seed);

// Smallest swept radius whose sphere minimum exceeds energy(0) = 0; the
// largest radius if none does.
double start_ball_radius(const std::vector<CoercivitySample>& sweep);

// Unit-norm sampling directions: half with i.i.d. Gaussian coordinates, half
// smoothed through the Riesz map so low-frequency directions are represented.
std::vector<Vector> sample_directions(const Space& space, std::size_t count, Rng& rng);

// Centered finite difference of J along v.
double directional_difference(const FunctionalOracle& J, const Vector& x, const Vector& v, double eps);

}  // namespace varlab
