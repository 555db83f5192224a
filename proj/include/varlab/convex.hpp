#pragma once

#include <string>
#include <vector>

#include "varlab/space.hpp"

namespace varlab {

// Closed convex subset C of a space with its metric projection. Inner
// products, norms and projections all use the space's own inner product.
class ConvexSetSpec {
 public:
  enum class Kind { whole_space, affine_subspace, ball, halfspace_intersection };

  static ConvexSetSpec whole_space(SpacePtr space);
  // point + span(basis); an empty basis gives the singleton {point}.
  static ConvexSetSpec affine_subspace(SpacePtr space, Vector point, std::vector<Vector> basis);
  static ConvexSetSpec ball(SpacePtr space, Vector center, double radius);
  // { y : <normals[k], y> <= offsets[k] for all k }. Must be non-empty.
  static ConvexSetSpec halfspace_intersection(SpacePtr space, std::vector<Vector> normals, std::vector<double> offsets);

  Kind kind() const { return kind_; }
  const SpacePtr& space() const { return space_; }

  Vector project(const Vector& y) const;
  bool contains(const Vector& y, double tol = 1e-10) const;

 private:
  ConvexSetSpec(Kind kind, SpacePtr space) : kind_(kind), space_(std::move(space)) {}

  Kind kind_;
  SpacePtr space_;
  Vector point_;                // affine point or ball center
  std::vector<Vector> basis_;   // orthonormal in the space inner product
  double radius_ = 0.0;
  std::vector<Vector> normals_;
  std::vector<double> offsets_;
};

const char* to_string(ConvexSetSpec::Kind kind);

}  // namespace varlab
