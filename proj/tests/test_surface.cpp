#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace polyrecon;

namespace {

double area(const std::array<Point3, 3>& t) { return 0.5 * length(cross(t[1] - t[0], t[2] - t[0])); }

std::vector<Point3> square_grid(double x0, double y0, double side, int n) {
  std::vector<Point3> p;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p.push_back({x0 + side * i / (n - 1), y0 + side * j / (n - 1), 0});
  return p;
}

/// Patches of the six faces of an axis-aligned box, from a grid of points.
std::vector<TrianglePatch> box_patches(const Point3& lo, const Point3& hi, int n, double alpha) {
  std::vector<TrianglePatch> out;
  for (const auto& h : oracle::box_halfspaces(lo, hi)) {
    std::vector<Point3> pts;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double s = double(i) / (n - 1), t = double(j) / (n - 1);
        Point3 p;
        if (h.normal.x != 0) p = {h.origin.x, lo.y + s * (hi.y - lo.y), lo.z + t * (hi.z - lo.z)};
        if (h.normal.y != 0) p = {lo.x + s * (hi.x - lo.x), h.origin.y, lo.z + t * (hi.z - lo.z)};
        if (h.normal.z != 0) p = {lo.x + s * (hi.x - lo.x), lo.y + t * (hi.y - lo.y), h.origin.z};
        pts.push_back(p);
      }
    out.push_back(triangulate_patch(h.origin, h.normal, pts, alpha, h.id));
  }
  return out;
}

}  // namespace

TEST(Delaunay, EmptyCircumcircleProperty) {
  Rng rng(8);
  std::vector<Vec2> pts;
  for (int i = 0; i < 300; ++i) pts.push_back({rng.uniform(), rng.uniform()});
  const auto tris = delaunay_2d(pts);
  ASSERT_FALSE(tris.empty());
  // Euler: 2n - 2 - h triangles for n points with h on the hull.
  EXPECT_LE(tris.size(), 2 * pts.size());
  for (const auto& t : tris) {
    const Vec2 &a = pts[t[0]], &b = pts[t[1]], &c = pts[t[2]];
    const double o = detail::orient2d(a, b, c);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i == t[0] || i == t[1] || i == t[2]) continue;
      const double in = detail::incircle(a, b, c, pts[i]);
      EXPECT_LE(o > 0 ? in : -in, 1e-12) << "point " << i << " inside a circumcircle";
    }
  }
}

TEST(TriangulatePatch, SquareGivesTwoTriangles) {
  const std::vector<Point3> sq{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  const auto p = triangulate_patch({0, 0, 0}, {0, 0, 1}, sq, 10.0);
  ASSERT_EQ(p.triangles.size(), 2u);
  EXPECT_NEAR(area(p.triangles[0]) + area(p.triangles[1]), 1.0, 1e-12);
}

TEST(TriangulatePatch, AlphaSeparatesDistantClusters) {
  auto pts = square_grid(0, 0, 1, 6);
  const auto far = square_grid(5, 0, 1, 6);
  pts.insert(pts.end(), far.begin(), far.end());
  const auto p = triangulate_patch({0, 0, 0}, {0, 0, 1}, pts, 1.0);
  double total = 0;
  for (const auto& t : p.triangles) {
    total += area(t);
    const bool left = t[0].x <= 1 + 1e-9 && t[1].x <= 1 + 1e-9 && t[2].x <= 1 + 1e-9;
    const bool right = t[0].x >= 5 - 1e-9 && t[1].x >= 5 - 1e-9 && t[2].x >= 5 - 1e-9;
    EXPECT_TRUE(left || right) << "triangle bridges the gap";
  }
  EXPECT_NEAR(total, 2.0, 1e-9);
}

TEST(TriangulatePatch, DegenerateInputsGiveEmptyPatch) {
  EXPECT_TRUE(triangulate_patch({0, 0, 0}, {0, 0, 1}, std::vector<Point3>{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, 10).triangles.empty());
  EXPECT_TRUE(triangulate_patch({0, 0, 0}, {0, 0, 1}, std::vector<Point3>{{0, 0, 0}, {1, 0, 0}}, 10).triangles.empty());
}

TEST(TriangulatePatch, VerticesLieOnThePlane) {
  Rng rng(4);
  const Vec3 n = normalize(Vec3{1, 2, 3});
  const auto [u, v] = plane_basis(n);
  std::vector<Point3> pts;
  for (int i = 0; i < 200; ++i) pts.push_back(u * rng.uniform() + v * rng.uniform() + n * rng.uniform(-1e-3, 1e-3));
  const auto p = triangulate_patch({0, 0, 0}, n, pts, 0.3);
  ASSERT_FALSE(p.triangles.empty());
  for (const auto& t : p.triangles)
    for (const auto& x : t) EXPECT_NEAR(dot(n, x), 0, 1e-12);
}

TEST(SegmentBlocked, DirectHitAndParallelMiss) {
  std::vector<TrianglePatch> patches{triangulate_patch({0, 0, 0}, {0, 0, 1}, square_grid(0, 0, 1, 5), 1.0)};
  EXPECT_TRUE(segment_blocked({0.5, 0.5, 1}, {0.5, 0.5, -1}, patches, 0.01));
  EXPECT_FALSE(segment_blocked({0, 0, 1}, {1, 1, 1}, patches, 0.01));
  EXPECT_FALSE(segment_blocked({3, 3, 1}, {3, 3, -1}, patches, 0.01));  // crosses the plane outside the patch
  EXPECT_FALSE(segment_blocked({0.5, 0.5, 1}, {0.5, 0.5, -1}, {}, 0.01));
}

TEST(SegmentBlocked, GuardPreventsSelfOcclusion) {
  const double eps = 0.02, guard = 1.5 * eps;
  const auto patches = box_patches({0, 0, 0}, {1, 1, 1}, 11, 0.3);
  // Two samples on the top face, one of them pushed slightly below it by noise.
  EXPECT_FALSE(segment_blocked({0.2, 0.2, 1.0}, {0.8, 0.6, 1.0}, patches, guard));
  EXPECT_FALSE(segment_blocked({0.2, 0.2, 1.0}, {0.8, 0.6, 0.999}, patches, guard));
  // Across an edge of the convex cube: the face samples see each other.
  EXPECT_FALSE(segment_blocked({0.5, 0.5, 1.0}, {1.0, 0.5, 0.5}, patches, guard));
  EXPECT_FALSE(segment_blocked({0.5, 0.5, 1.0}, {0.5, 0.5, 0.0}, patches, guard));
}

TEST(SegmentBlocked, SymmetricAndMatchesBruteForce) {
  const double guard = 0.03;
  auto patches = box_patches({0, 0, 0}, {1, 1, 1}, 9, 0.3);
  const auto other = box_patches({2, 0, 0}, {3, 1, 1}, 9, 0.3);
  patches.insert(patches.end(), other.begin(), other.end());
  const SurfaceModel surface(patches, guard);
  Rng rng(99);
  int blocked = 0;
  for (int t = 0; t < 3000; ++t) {
    const Point3 a{rng.uniform(-0.5, 3.5), rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.5)};
    const Point3 b{rng.uniform(-0.5, 3.5), rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.5)};
    const bool fast = surface.segment_blocked(a, b);
    EXPECT_EQ(fast, surface.segment_blocked(b, a));
    EXPECT_EQ(fast, oracle::segment_blocked(a, b, patches, guard)) << "pair " << t;
    blocked += fast;
  }
  EXPECT_GT(blocked, 300);
}

TEST(SurfaceModel, FirstHitDistance) {
  const SurfaceModel surface(box_patches({0, 0, 0}, {1, 1, 1}, 6, 0.5), 0.0);
  const auto t = surface.first_hit({0.5, 0.5, 0.5}, {0, 0, 1}, 1e-9);
  ASSERT_TRUE(t);
  EXPECT_NEAR(*t, 0.5, 1e-12);
  const auto inward = surface.first_hit({0.5, 0.5, 1.0}, {0, 0, -1}, 1e-6);
  ASSERT_TRUE(inward);
  EXPECT_NEAR(*inward, 1.0, 1e-12);
  EXPECT_FALSE(surface.first_hit({0.5, 0.5, 2.0}, {0, 0, 1}, 1e-9));
}
