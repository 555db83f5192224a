#include "varlab/space.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <string>

#include "varlab/errors.hpp"
#include "varlab/kernels.hpp"

namespace varlab {
namespace {

std::uint64_t next_space_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace

Grid1D::Grid1D(std::size_t interior_nodes) : m(interior_nodes) {
  require(interior_nodes >= 2, "Grid1D needs at least two interior nodes");
}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = node(i);
  return out;
}

double discrete_laplacian_lowest_eigenvalue(const Grid1D& grid) {
  const double h = grid.h();
  const double s = std::sin(std::numbers::pi * h / 2.0);
  return 4.0 / (h * h) * s * s;
}

bool Vector::all_finite() const {
  for (double c : coords_) {
    if (!std::isfinite(c)) return false;
  }
  return true;
}

void check_same_space(const Vector& a, const Vector& b) {
  if (a.space_id() != b.space_id() || a.size() != b.size()) {
    fail(ErrorCode::contract, "vectors belong to different spaces (ids " + std::to_string(a.space_id()) + " vs " +
                                  std::to_string(b.space_id()) + ")");
  }
}

Vector Vector::operator-() const {
  Vector out = *this;
  for (double& c : out.coords_) c = -c;
  return out;
}

Vector& Vector::operator+=(const Vector& other) {
  axpy(1.0, other);
  return *this;
}

Vector& Vector::operator-=(const Vector& other) {
  axpy(-1.0, other);
  return *this;
}

Vector& Vector::operator*=(double alpha) {
  for (double& c : coords_) c *= alpha;
  return *this;
}

void Vector::axpy(double alpha, const Vector& x) {
  check_same_space(*this, x);
  kernels::axpy(alpha, x.coords(), coords());
}

Space::Space(Kind kind, std::size_t dim) : kind_(kind), dim_(dim), id_(next_space_id()) {
  require(dim > 0, "space dimension must be positive");
}

std::shared_ptr<const Space> Space::euclidean(std::size_t dim) {
  return std::shared_ptr<const Space>(new Space(Kind::euclidean, dim));
}

std::shared_ptr<const Space> Space::dirichlet_h10(Grid1D grid) {
  auto space = std::shared_ptr<Space>(new Space(Kind::dirichlet_h10, grid.m));
  space->grid_ = grid;
  const std::size_t m = grid.m;
  space->thomas_upper_.resize(m);
  space->thomas_pivot_.resize(m);
  double pivot = 2.0;
  space->thomas_pivot_[0] = pivot;
  space->thomas_upper_[0] = -1.0 / pivot;
  for (std::size_t i = 1; i < m; ++i) {
    pivot = 2.0 + space->thomas_upper_[i - 1];
    space->thomas_pivot_[i] = pivot;
    space->thomas_upper_[i] = -1.0 / pivot;
  }
  return space;
}

std::shared_ptr<const Space> Space::dense(const Eigen::MatrixXd& gram) {
  require(gram.rows() == gram.cols() && gram.rows() > 0, "Gram matrix must be square and non-empty");
  require((gram - gram.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + gram.cwiseAbs().maxCoeff()),
          "Gram matrix must be symmetric");
  auto space = std::shared_ptr<Space>(new Space(Kind::dense, static_cast<std::size_t>(gram.rows())));
  space->dense_gram_ = gram;
  space->dense_factor_.compute(gram);
  require(space->dense_factor_.info() == Eigen::Success, "Gram matrix is not positive definite");
  return space;
}

Vector Space::zero() const { return Vector(std::vector<double>(dim_, 0.0), id_); }

Vector Space::make(std::vector<double> coords) const {
  require(coords.size() == dim_, "vector length " + std::to_string(coords.size()) + " does not match space dimension " +
                                     std::to_string(dim_));
  Vector v(std::move(coords), id_);
  require(v.all_finite(), "vector has non-finite entries");
  return v;
}

void Space::check(const Vector& v) const {
  if (v.space_id() != id_ || v.size() != dim_) {
    fail(ErrorCode::contract, "vector does not belong to space " + std::to_string(id_));
  }
}

double Space::inner(const Vector& u, const Vector& v) const {
  check(u);
  check(v);
  const auto& k = kernels::table();
  switch (kind_) {
    case Kind::euclidean:
      return k.dot(u.coords().data(), v.coords().data(), dim_);
    case Kind::dirichlet_h10:
      // Symmetric difference form: exactly symmetric in (u, v).
      return k.difference_dot(u.coords().data(), v.coords().data(), dim_) / grid_->h();
    case Kind::dense: {
      const Eigen::Map<const Eigen::VectorXd> a(u.coords().data(), static_cast<Eigen::Index>(dim_));
      const Eigen::Map<const Eigen::VectorXd> b(v.coords().data(), static_cast<Eigen::Index>(dim_));
      return 0.5 * (a.dot(dense_gram_ * b) + b.dot(dense_gram_ * a));
    }
  }
  return 0.0;
}

double Space::norm(const Vector& u) const { return std::sqrt(std::max(0.0, norm_squared(u))); }

double Space::distance(const Vector& u, const Vector& v) const { return norm(u - v); }

Vector Space::gram(const Vector& u) const {
  check(u);
  switch (kind_) {
    case Kind::euclidean:
      return u;
    case Kind::dirichlet_h10: {
      Vector out = zero();
      kernels::table().second_difference(u.coords().data(), out.coords().data(), dim_);
      out *= 1.0 / grid_->h();
      return out;
    }
    case Kind::dense: {
      Vector out = zero();
      const Eigen::Map<const Eigen::VectorXd> a(u.coords().data(), static_cast<Eigen::Index>(dim_));
      Eigen::Map<Eigen::VectorXd>(out.coords().data(), static_cast<Eigen::Index>(dim_)) = dense_gram_ * a;
      return out;
    }
  }
  return u;
}

Vector Space::riesz(const Vector& dual) const {
  check(dual);
  switch (kind_) {
    case Kind::euclidean:
      return dual;
    case Kind::dirichlet_h10: {
      // (1/h) T r = d  <=>  T r = h d, T = tridiag(-1, 2, -1).
      const double h = grid_->h();
      Vector r = zero();
      auto x = r.coords();
      const auto d = dual.coords();
      x[0] = h * d[0] / thomas_pivot_[0];
      for (std::size_t i = 1; i < dim_; ++i) x[i] = (h * d[i] + x[i - 1]) / thomas_pivot_[i];
      for (std::size_t i = dim_ - 1; i-- > 0;) x[i] -= thomas_upper_[i] * x[i + 1];
      return r;
    }
    case Kind::dense: {
      Vector r = zero();
      const Eigen::Map<const Eigen::VectorXd> d(dual.coords().data(), static_cast<Eigen::Index>(dim_));
      Eigen::Map<Eigen::VectorXd>(r.coords().data(), static_cast<Eigen::Index>(dim_)) = dense_factor_.solve(d);
      return r;
    }
  }
  return dual;
}

}  // namespace varlab
