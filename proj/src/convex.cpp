#include "varlab/convex.hpp"

#include <algorithm>
#include <cmath>

#include "varlab/errors.hpp"

namespace varlab {

const char* to_string(ConvexSetSpec::Kind kind) {
  switch (kind) {
    case ConvexSetSpec::Kind::whole_space: return "whole_space";
    case ConvexSetSpec::Kind::affine_subspace: return "affine_subspace";
    case ConvexSetSpec::Kind::ball: return "ball";
    case ConvexSetSpec::Kind::halfspace_intersection: return "halfspace_intersection";
  }
  return "whole_space";
}

ConvexSetSpec ConvexSetSpec::whole_space(SpacePtr space) {
  require(space != nullptr, "convex set needs a space");
  return ConvexSetSpec(Kind::whole_space, std::move(space));
}

ConvexSetSpec ConvexSetSpec::affine_subspace(SpacePtr space, Vector point, std::vector<Vector> basis) {
  require(space != nullptr, "convex set needs a space");
  space->check(point);
  ConvexSetSpec c(Kind::affine_subspace, std::move(space));
  c.point_ = std::move(point);
  // Modified Gram-Schmidt, run twice for stability; dependent vectors are dropped.
  for (Vector& b : basis) {
    c.space_->check(b);
    const double original = c.space_->norm(b);
    require(original > 0.0, "affine subspace basis vectors must be non-zero");
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& q : c.basis_) b.axpy(-c.space_->inner(q, b), q);
    }
    const double n = c.space_->norm(b);
    if (n <= 1e-12 * original) continue;
    b *= 1.0 / n;
    c.basis_.push_back(std::move(b));
  }
  return c;
}

ConvexSetSpec ConvexSetSpec::ball(SpacePtr space, Vector center, double radius) {
  require(space != nullptr, "convex set needs a space");
  space->check(center);
  require(std::isfinite(radius) && radius > 0.0, "ball radius must be positive and finite");
  ConvexSetSpec c(Kind::ball, std::move(space));
  c.point_ = std::move(center);
  c.radius_ = radius;
  return c;
}

ConvexSetSpec ConvexSetSpec::halfspace_intersection(SpacePtr space, std::vector<Vector> normals,
                                                    std::vector<double> offsets) {
  require(space != nullptr, "convex set needs a space");
  require(normals.size() == offsets.size(), "halfspace normals and offsets differ in length");
  for (std::size_t k = 0; k < normals.size(); ++k) {
    space->check(normals[k]);
    require(space->norm(normals[k]) > 0.0, "halfspace normals must be non-zero");
    require(std::isfinite(offsets[k]), "halfspace offsets must be finite");
  }
  ConvexSetSpec c(Kind::halfspace_intersection, std::move(space));
  c.normals_ = std::move(normals);
  c.offsets_ = std::move(offsets);
  // Emptiness shows up as Dykstra failing to land inside.
  const Vector probe = c.project(c.space_->zero());
  require(c.contains(probe, 1e-8), "halfspace intersection appears to be empty");
  return c;
}

namespace {

Vector project_halfspace(const Space& X, const Vector& y, const Vector& a, double b) {
  const double excess = X.inner(a, y) - b;
  if (excess <= 0.0) return y;
  Vector out = y;
  out.axpy(-excess / X.norm_squared(a), a);
  return out;
}

}  // namespace

Vector ConvexSetSpec::project(const Vector& y) const {
  space_->check(y);
  switch (kind_) {
    case Kind::whole_space:
      return y;
    case Kind::affine_subspace: {
      const Vector d = y - point_;
      Vector out = point_;
      for (const Vector& q : basis_) out.axpy(space_->inner(q, d), q);
      return out;
    }
    case Kind::ball: {
      const Vector d = y - point_;
      const double n = space_->norm(d);
      if (n <= radius_) return y;
      Vector out = point_;
      out.axpy(radius_ / n, d);
      return out;
    }
    case Kind::halfspace_intersection: {
      if (contains(y, 0.0)) return y;
      // Dykstra's alternating projections with correction terms.
      const std::size_t k = normals_.size();
      Vector x = y;
      std::vector<Vector> corrections(k, space_->zero());
      for (int sweep = 0; sweep < 100000; ++sweep) {
        const Vector before = x;
        for (std::size_t i = 0; i < k; ++i) {
          const Vector shifted = x + corrections[i];
          Vector next = project_halfspace(*space_, shifted, normals_[i], offsets_[i]);
          corrections[i] = shifted - next;
          x = std::move(next);
        }
        if (space_->distance(x, before) <= 1e-15 * (1.0 + space_->norm(x)) && contains(x, 1e-13)) break;
      }
      // Land exactly inside: clip any residual rounding violation.
      for (std::size_t i = 0; i < k; ++i) {
        if (space_->inner(normals_[i], x) > offsets_[i]) x = project_halfspace(*space_, x, normals_[i], offsets_[i]);
      }
      return x;
    }
  }
  return y;
}

bool ConvexSetSpec::contains(const Vector& y, double tol) const {
  space_->check(y);
  switch (kind_) {
    case Kind::whole_space:
      return y.all_finite();
    case Kind::affine_subspace: {
      Vector d = y - point_;
      for (const Vector& q : basis_) d.axpy(-space_->inner(q, d), q);
      return space_->norm(d) <= tol * (1.0 + space_->norm(y));
    }
    case Kind::ball:
      return space_->distance(y, point_) <= radius_ * (1.0 + tol);
    case Kind::halfspace_intersection:
      for (std::size_t i = 0; i < normals_.size(); ++i) {
        const double scale = space_->norm(normals_[i]) * (1.0 + space_->norm(y));
        if (space_->inner(normals_[i], y) - offsets_[i] > tol * scale) return false;
      }
      return true;
  }
  return false;
}

}  // namespace varlab
