#include <cmath>

#include <gtest/gtest.h>

#include "varlab/convex.hpp"
#include "varlab/errors.hpp"
#include "varlab/random.hpp"

using namespace varlab;

namespace {

Vector random_vector(const Space& s, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> c(s.dim());
  for (double& x : c) x = d(rng);
  return s.make(std::move(c));
}

std::vector<ConvexSetSpec> sample_sets(const SpacePtr& s) {
  Rng rng = make_stream(5, 0);
  std::vector<ConvexSetSpec> sets;
  sets.push_back(ConvexSetSpec::whole_space(s));
  sets.push_back(ConvexSetSpec::affine_subspace(s, random_vector(*s, rng), {random_vector(*s, rng), random_vector(*s, rng)}));
  sets.push_back(ConvexSetSpec::affine_subspace(s, random_vector(*s, rng), {}));
  sets.push_back(ConvexSetSpec::ball(s, random_vector(*s, rng), 0.7));
  std::vector<Vector> normals{random_vector(*s, rng), random_vector(*s, rng), random_vector(*s, rng)};
  sets.push_back(ConvexSetSpec::halfspace_intersection(s, normals, {0.5, 0.2, 1.0}));
  return sets;
}

}  // namespace

TEST(Convex, ProjectionIsIdempotentAndInside) {
  for (const SpacePtr& s : {Space::euclidean(4), Space::dirichlet_h10(Grid1D(9))}) {
    for (const auto& C : sample_sets(s)) {
      SCOPED_TRACE(to_string(C.kind()));
      Rng rng = make_stream(17, 0);
      for (int trial = 0; trial < 20; ++trial) {
        const Vector y = random_vector(*s, rng, 3.0);
        const Vector p = C.project(y);
        EXPECT_TRUE(C.contains(p, 1e-8));
        EXPECT_LE(s->distance(C.project(p), p), 1e-8 * (1.0 + s->norm(p)));
      }
    }
  }
}

TEST(Convex, ProjectionIsNearestPoint) {
  // variational inequality <y - P y, z - P y> <= 0 for z in C
  const auto s = Space::dirichlet_h10(Grid1D(9));
  for (const auto& C : sample_sets(s)) {
    SCOPED_TRACE(to_string(C.kind()));
    Rng rng = make_stream(23, 0);
    for (int trial = 0; trial < 10; ++trial) {
      const Vector y = random_vector(*s, rng, 3.0);
      const Vector p = C.project(y);
      const Vector z = C.project(random_vector(*s, rng, 3.0));
      EXPECT_LE(s->inner(y - p, z - p), 1e-7 * (1.0 + s->norm(y - p) * s->norm(z - p)));
    }
  }
}

TEST(Convex, BallAndAffineClosedForms) {
  const auto s = Space::euclidean(2);
  const auto B = ConvexSetSpec::ball(s, s->zero(), 2.0);
  const Vector p = B.project(s->make({3.0, 4.0}));
  EXPECT_NEAR(p[0], 1.2, 1e-15);
  EXPECT_NEAR(p[1], 1.6, 1e-15);
  EXPECT_TRUE(B.contains(s->make({1.0, 1.0})));
  EXPECT_FALSE(B.contains(s->make({2.0, 1.0})));

  const auto L = ConvexSetSpec::affine_subspace(s, s->make({0.0, 1.0}), {s->make({1.0, 1.0})});
  const Vector q = L.project(s->make({2.0, 0.0}));
  // line y = x + 1; foot of the perpendicular from (2,0) is (0.5, 1.5)
  EXPECT_NEAR(q[0], 0.5, 1e-14);
  EXPECT_NEAR(q[1], 1.5, 1e-14);
}

TEST(Convex, WholeSpaceProjectionIsIdentity) {
  const auto s = Space::euclidean(3);
  const auto C = ConvexSetSpec::whole_space(s);
  const Vector y = s->make({1.0, -2.0, 3.0});
  EXPECT_EQ(s->distance(C.project(y), y), 0.0);
}

TEST(Convex, EmptyHalfspaceIntersectionIsRejected) {
  const auto s = Space::euclidean(1);
  EXPECT_THROW(ConvexSetSpec::halfspace_intersection(s, {s->make({1.0}), s->make({-1.0})}, {-1.0, -1.0}), Error);
}

TEST(Convex, NegativeRadiusIsRejected) {
  const auto s = Space::euclidean(1);
  EXPECT_THROW(ConvexSetSpec::ball(s, s->zero(), -1.0), Error);
}
