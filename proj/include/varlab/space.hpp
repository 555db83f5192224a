#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace varlab {

// Uniform mesh of (0,1) with m interior nodes; h = 1/(m+1) is derived from m
// so that h*(m+1) == 1 holds by construction.
struct Grid1D {
  std::size_t m = 2;

  explicit Grid1D(std::size_t interior_nodes);

  double h() const { return 1.0 / static_cast<double>(m + 1); }
  double node(std::size_t i) const { return static_cast<double>(i + 1) / static_cast<double>(m + 1); }
  std::vector<double> nodes() const;
};

// Smallest eigenvalue of the stiffness matrix against the lumped mass h*I:
// (4/h^2) sin^2(pi h / 2).
double discrete_laplacian_lowest_eigenvalue(const Grid1D& grid);

// Coefficients of an element of a particular space. The space id travels with
// the data so that mixing spaces is caught at the first binary operation.
class Vector {
 public:
  Vector() = default;
  Vector(std::vector<double> coords, std::uint64_t space_id)
      : coords_(std::move(coords)), space_id_(space_id) {}

  std::size_t size() const { return coords_.size(); }
  std::uint64_t space_id() const { return space_id_; }

  std::span<double> coords() { return coords_; }
  std::span<const double> coords() const { return coords_; }
  double& operator[](std::size_t i) { return coords_[i]; }
  double operator[](std::size_t i) const { return coords_[i]; }

  bool all_finite() const;

  Vector operator-() const;
  Vector& operator+=(const Vector& other);
  Vector& operator-=(const Vector& other);
  Vector& operator*=(double alpha);

  // this += alpha * x
  void axpy(double alpha, const Vector& x);

  friend Vector operator+(Vector a, const Vector& b) { return a += b; }
  friend Vector operator-(Vector a, const Vector& b) { return a -= b; }
  friend Vector operator*(double alpha, Vector v) { return v *= alpha; }

 private:
  std::vector<double> coords_;
  std::uint64_t space_id_ = 0;
};

void check_same_space(const Vector& a, const Vector& b);

// A finite-dimensional real inner-product space given by a Gram action G:
// <u, v> = u . (G v). Immutable once built; safe to share across threads.
class Space {
 public:
  enum class Kind { euclidean, dirichlet_h10, dense };

  static std::shared_ptr<const Space> euclidean(std::size_t dim);
  // Piecewise-linear H^1_0(0,1) with <u,v> = int u'v'; G = (1/h) tridiag(-1,2,-1).
  static std::shared_ptr<const Space> dirichlet_h10(Grid1D grid);
  // Arbitrary SPD Gram matrix; Riesz solves use a dense Cholesky factor.
  static std::shared_ptr<const Space> dense(const Eigen::MatrixXd& gram);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::uint64_t id() const { return id_; }
  const std::optional<Grid1D>& grid() const { return grid_; }

  Vector zero() const;
  // Validates length and finiteness.
  Vector make(std::vector<double> coords) const;

  double inner(const Vector& u, const Vector& v) const;
  double norm_squared(const Vector& u) const { return inner(u, u); }
  double norm(const Vector& u) const;
  double distance(const Vector& u, const Vector& v) const;

  // Metric image G u, i.e. the coordinates of the functional <u, .>.
  Vector gram(const Vector& u) const;
  // Inverse of gram: returns r with <r, v> = dual . v for every v.
  Vector riesz(const Vector& dual) const;

  void check(const Vector& v) const;

 private:
  Space(Kind kind, std::size_t dim);

  Kind kind_;
  std::size_t dim_;
  std::uint64_t id_;
  std::optional<Grid1D> grid_;
  // Thomas factorization of tridiag(-1,2,-1): modified super-diagonal and pivots.
  std::vector<double> thomas_upper_;
  std::vector<double> thomas_pivot_;
  Eigen::MatrixXd dense_gram_;
  Eigen::LLT<Eigen::MatrixXd> dense_factor_;
};

using SpacePtr = std::shared_ptr<const Space>;

}  // namespace varlab
