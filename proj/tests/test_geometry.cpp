#include <gtest/gtest.h>

#include <atomic>

#include "oracles.hpp"

using namespace polyrecon;

TEST(Vec3, BasicAlgebra) {
  const Vec3 a{1, 2, 3}, b{-2, 0.5, 4};
  EXPECT_DOUBLE_EQ(dot(a, b), -2 + 1 + 12);
  const Vec3 c = cross(a, b);
  EXPECT_NEAR(dot(c, a), 0, 1e-12);
  EXPECT_NEAR(dot(c, b), 0, 1e-12);
  EXPECT_NEAR(length(normalize(b)), 1, 1e-15);
  EXPECT_NEAR(angle_deg({1, 0, 0}, {0, 1, 0}), 90, 1e-12);
  EXPECT_FALSE(is_finite(Vec3{NAN, 0, 0}));
}

TEST(Vec3, PlaneBasisIsOrthonormal) {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const Vec3 n = normalize(Vec3{rng.normal(), rng.normal(), rng.normal()});
    const auto [u, v] = plane_basis(n);
    EXPECT_NEAR(length(u), 1, 1e-12);
    EXPECT_NEAR(length(v), 1, 1e-12);
    EXPECT_NEAR(dot(u, v), 0, 1e-12);
    EXPECT_NEAR(dot(u, n), 0, 1e-12);
    EXPECT_NEAR(dot(v, n), 0, 1e-12);
  }
}

TEST(Plane, IntersectThreeSolvesTheSystem) {
  const Plane a{{1, 0, 0}, {1, 0, 0}, {}}, b{{0, 2, 0}, {0, 1, 0}, {}}, c{{0, 0, 3}, normalize(Vec3{0, 1, 1}), {}};
  const auto x = intersect_three(a, b, c);
  ASSERT_TRUE(x);
  EXPECT_NEAR(a.signed_distance(*x), 0, 1e-12);
  EXPECT_NEAR(b.signed_distance(*x), 0, 1e-12);
  EXPECT_NEAR(c.signed_distance(*x), 0, 1e-12);
  EXPECT_FALSE(intersect_three(a, a, b));
}

TEST(Aabb, BoundsAndCentroid) {
  std::vector<Point3> p{{0, 0, 0}, {2, 1, -1}, {1, 3, 0}};
  const Aabb b = bounds_of(p);
  EXPECT_EQ(b.min.z, -1);
  EXPECT_EQ(b.max.y, 3);
  EXPECT_NEAR(b.diagonal(), std::sqrt(4 + 9 + 1), 1e-12);
  EXPECT_NEAR(centroid(p).x, 1, 1e-15);
  EXPECT_TRUE(Aabb{}.empty());
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs = differs || x != c.next();
  }
  EXPECT_TRUE(differs);
  EXPECT_NE(Rng::derive_seed(1, 0), Rng::derive_seed(1, 1));
  EXPECT_EQ(Rng::derive(9, 4).next(), Rng(Rng::derive_seed(9, 4)).next());
}

TEST(Rng, DistributionsStayInRange) {
  Rng r(7);
  double mean = 0;
  for (int i = 0; i < 20000; ++i) {
    const int k = r.uniform_int(3, 12);
    ASSERT_GE(k, 3);
    ASSERT_LE(k, 12);
    const double u = r.uniform();
    ASSERT_GE(u, 0);
    ASSERT_LT(u, 1);
    ASSERT_LT(r.index(5), 5u);
    mean += r.normal();
  }
  EXPECT_NEAR(mean / 20000, 0, 0.03);
}

TEST(KdTree, KnnMatchesBruteForce) {
  Rng rng(11);
  std::vector<Point3> pts;
  for (int i = 0; i < 500; ++i) pts.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
  pts.push_back(pts[17]);  // exact duplicate
  const KdTree3 tree = make_tree(pts);
  for (int q = 0; q < 50; ++q) {
    const Point3 x{rng.uniform(), rng.uniform(), rng.uniform()};
    const auto hits = tree.knn(to_array(x), 10);
    const auto ref = oracle::knn(pts, x, 10);
    ASSERT_EQ(hits.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_EQ(hits[i].index, ref[i]);
  }
  const auto near = tree.radius(to_array(pts[3]), 0.1);
  std::size_t expected = 0;
  for (const auto& p : pts) expected += distance(p, pts[3]) <= 0.1;
  EXPECT_EQ(near.size(), expected);
}

TEST(Parallel, ResultIndependentOfThreadCount) {
  std::vector<double> a(1000), b(1000);
  parallel_for(a.size(), 1, [&](std::size_t i) { a[i] = std::sin(static_cast<double>(i)); });
  parallel_for(b.size(), 4, [&](std::size_t i) { b[i] = std::sin(static_cast<double>(i)); });
  EXPECT_EQ(a, b);
}

TEST(Parallel, RethrowsWorkerErrors) {
  std::atomic<int> ran{0};
  EXPECT_THROW(parallel_for(100, 3,
                            [&](std::size_t i) {
                              ++ran;
                              if (i == 50) throw Error("boom");
                            }),
               Error);
  EXPECT_GT(ran.load(), 0);
}
