#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace polyrecon;

namespace {

struct Scene {
  std::vector<Plane> planes;
  StructuringResult structure;
  const StructuredCloud& cloud() const { return structure.cloud; }
};

Scene scene(const std::string& model, std::uint64_t seed = 0, std::size_t points = 10000) {
  const auto m = synthetic_model(model);
  const auto raw = sample_model(m, density_for(m, points), 0.002, seed);
  Scene s;
  s.planes = extract_planes(raw, {}, seed).planes;
  s.structure = structure_cloud(s.planes, raw, 0.01 * raw.bounds().diagonal(), 10);
  return s;
}

StructuredCloud labelled_points(const std::vector<std::pair<Point3, int>>& pts) {
  StructuredCloud s;
  s.eps = 0.05;
  for (const auto& [p, plane] : pts) s.points.push_back({p, {0, 0, 1}, PointLabel::planar, {plane}});
  return s;
}

/// True when the partition covers every index exactly once.
bool is_partition(const std::vector<std::vector<std::size_t>>& groups, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (const auto& g : groups)
    for (auto i : g) {
      if (i >= n) return false;
      ++seen[i];
    }
  return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

std::vector<std::vector<std::size_t>> point_sets(const std::vector<ConvexCluster>& c) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& x : c) out.push_back(x.points);
  return out;
}

}  // namespace

TEST(Fps, ProportionalQuotas) {
  std::vector<std::pair<Point3, int>> pts;
  Rng rng(2);
  for (int i = 0; i < 900; ++i) pts.push_back({{rng.uniform(), rng.uniform(), 0}, 0});
  for (int i = 0; i < 100; ++i) pts.push_back({{rng.uniform(), 0, rng.uniform()}, 1});
  const auto s = labelled_points(pts);
  const auto r = proportional_fps(s, 100);
  std::size_t first = 0, second = 0;
  for (auto i : r.indices) (s.points[i].planes[0] == 0 ? first : second)++;
  EXPECT_EQ(first, 90u);
  EXPECT_EQ(second, 10u);
  EXPECT_TRUE(r.below_minimum.empty());
  EXPECT_EQ(std::set<std::size_t>(r.indices.begin(), r.indices.end()).size(), r.indices.size());
}

TEST(Fps, TinyPlaneIsFlagged) {
  std::vector<std::pair<Point3, int>> pts;
  for (int i = 0; i < 200; ++i) pts.push_back({{0.005 * i, 0, 0}, 0});
  pts.push_back({{0, 1, 0}, 1});
  pts.push_back({{0, 1, 1}, 1});
  const auto r = proportional_fps(labelled_points(pts), 100);
  EXPECT_EQ(r.below_minimum, (std::vector<int>{1}));
  EXPECT_EQ(std::count_if(r.indices.begin(), r.indices.end(), [](std::size_t i) { return i >= 200; }), 2);
}

TEST(Fps, WithinFactorTwoOfOptimalSpread) {
  Rng rng(17);
  for (int t = 0; t < 10; ++t) {
    std::vector<Point3> pts;
    for (int i = 0; i < 14; ++i) pts.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
    const std::size_t k = 3 + rng.index(3);
    const auto pick = farthest_point_sampling(pts, k);
    ASSERT_EQ(pick.size(), k);
    EXPECT_EQ(pick.front(), 0u);
    EXPECT_GE(oracle::min_pairwise_distance(pts, pick), 0.5 * oracle::best_min_distance(pts, k) - 1e-12);
  }
  EXPECT_TRUE(farthest_point_sampling(std::vector<Point3>{}, 5).empty());
  EXPECT_EQ(farthest_point_sampling(std::vector<Point3>{{0, 0, 0}, {1, 0, 0}}, 5).size(), 2u);
}

TEST(VisibilityGraph, ConvexShapeIsNearlyComplete) {
  const auto sc = scene("cube");
  const ClusteringConfig cfg;
  const auto surface = build_surface(sc.cloud(), sc.planes, cfg);
  const auto fps = proportional_fps(sc.cloud(), 300);
  std::vector<Point3> pts;
  for (auto i : fps.indices) pts.push_back(sc.cloud().points[i].position);
  const auto g = build_visibility_graph(pts, surface, 2);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_FALSE(g.at(i, i));
    for (std::size_t j = 0; j < g.size(); ++j) ASSERT_EQ(g.at(i, j), g.at(j, i));
  }
  EXPECT_GE(g.density(), 0.99);
  std::vector<TrianglePatch> patches;
  for (std::size_t p = 0; p < surface.patch_count(); ++p) patches.push_back(surface.patch(p));
  Rng rng(1);
  for (int t = 0; t < 300; ++t) {
    const auto i = rng.index(g.size()), j = rng.index(g.size());
    if (i == j) continue;
    EXPECT_EQ(g.at(i, j), !oracle::segment_blocked(pts[i], pts[j], patches, surface.guard()));
  }
}

TEST(VisibilityGraph, OutwardPairsAreNotVisible) {
  const SurfaceModel none({}, 0.01);
  // Two samples on the outside of a concave corner face away from each other.
  const std::vector<Vec3> normals{{0, 0, 1}, {-1, 0, 0}};
  const auto g = build_visibility_graph({{0, 0, 0}, {0.5, 0, 0.5}}, none, 1, normals);
  EXPECT_FALSE(g.at(0, 1));
  const std::vector<Vec3> inward{{0, 0, -1}, {1, 0, 0}};
  EXPECT_TRUE(build_visibility_graph({{0, 0, 0}, {0.5, 0, 0.5}}, none, 1, inward).at(0, 1));
  EXPECT_THROW(build_visibility_graph({{0, 0, 0}}, none, 1, normals), Error);
}

TEST(VisibilityGraph, NoSurfaceMeansFullAffinity) {
  const SurfaceModel none({}, 0.01);
  const auto g = build_visibility_graph({{0, 0, 0}, {1, 1, 1}}, none);
  EXPECT_EQ(g.density(), 1.0);
}

TEST(Wcseg, OversegmentIsPartition) {
  const auto sc = scene("cube");
  ClusteringConfig cfg;
  const auto capped = wcseg_oversegment(sc.cloud(), cfg);
  EXPECT_TRUE(is_partition(capped, sc.cloud().size()));
  EXPECT_GT(capped.size(), 6u);
  cfg.wcseg_patch_radius = 0;
  const auto faces = wcseg_oversegment(sc.cloud(), cfg);
  EXPECT_TRUE(is_partition(faces, sc.cloud().size()));
  EXPECT_EQ(faces.size(), 6u);
}

TEST(Wcseg, PlanarInputs) {
  std::vector<std::pair<Point3, int>> pts;
  for (double x0 : {0.0, 5.0})
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) pts.push_back({{x0 + 0.05 * i, 0.05 * j, 0}, x0 > 0});
  auto s = labelled_points(pts);
  ClusteringConfig cfg;
  cfg.wcseg_patch_radius = 0;
  EXPECT_EQ(wcseg_oversegment(s, cfg).size(), 2u);
  s.points.resize(400);
  for (auto& p : s.points) p.planes = {0};
  EXPECT_EQ(wcseg_oversegment(s, cfg).size(), 1u);
}

TEST(Wcseg, CubeIsOneCluster) {
  const auto sc = scene("cube", 3);
  const ClusteringConfig cfg;
  const auto surface = build_surface(sc.cloud(), sc.planes, cfg);
  const auto r = cluster_wcseg(sc.cloud(), surface, cfg, 5);
  ASSERT_EQ(r.clusters.size(), 1u);
  EXPECT_EQ(r.clusters[0].planes.size(), 6u);
  EXPECT_EQ(r.clusters[0].points.size(), sc.cloud().size());
}

TEST(Wcseg, LShapeSplitsAtReflexEdge) {
  const auto sc = scene("l_shape", 1);
  const ClusteringConfig cfg;
  const auto surface = build_surface(sc.cloud(), sc.planes, cfg);
  const auto r = cluster_wcseg(sc.cloud(), surface, cfg, 5);
  ASSERT_EQ(r.clusters.size(), 2u);
  EXPECT_TRUE(is_partition(point_sets(r.clusters), sc.cloud().size()));
  const auto& pts = sc.cloud().points;
  // The two arm tips land in different clusters.
  std::array<std::array<int, 2>, 2> tips{};
  for (int c : {0, 1})
    for (auto i : r.clusters[static_cast<std::size_t>(c)].points) {
      tips[0][static_cast<std::size_t>(c)] += pts[i].position.x > 1.5;
      tips[1][static_cast<std::size_t>(c)] += pts[i].position.y > 1.5;
    }
  const int a_side = tips[0][0] > tips[0][1] ? 0 : 1;
  EXPECT_GE(tips[0][static_cast<std::size_t>(a_side)], 0.99 * (tips[0][0] + tips[0][1]));
  EXPECT_GE(tips[1][static_cast<std::size_t>(1 - a_side)], 0.99 * (tips[1][0] + tips[1][1]));
  // Both clusters reach the reflex edge.
  const double eps = sc.cloud().eps;
  for (const auto& c : r.clusters)
    EXPECT_TRUE(std::any_of(c.points.begin(), c.points.end(), [&](std::size_t i) {
      return std::hypot(pts[i].position.x - 1, pts[i].position.y - 1) < 2 * eps;
    }));
  // Each cluster is nearly convex under interior visibility; the union is not.
  std::vector<TrianglePatch> patches;
  for (std::size_t p = 0; p < surface.patch_count(); ++p) patches.push_back(surface.patch(p));
  Rng rng(3);
  auto convexity = [&](const std::vector<std::size_t>& idx) {
    int seen = 0;
    for (int t = 0; t < 300; ++t) {
      const auto& p = pts[idx[rng.index(idx.size())]];
      const auto& q = pts[idx[rng.index(idx.size())]];
      const bool inward = dot(q.position - p.position, p.normal) <= surface.guard() &&
                          dot(p.position - q.position, q.normal) <= surface.guard();
      seen += inward && !oracle::segment_blocked(p.position, q.position, patches, surface.guard());
    }
    return seen / 300.0;
  };
  for (const auto& c : r.clusters) EXPECT_GE(convexity(c.points), 0.95);
  std::vector<std::size_t> all(pts.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  EXPECT_LT(convexity(all), 0.9);
}

TEST(Wcseg, DeterministicAcrossThreads) {
  const auto sc = scene("cuboid_stack", 2);
  const ClusteringConfig cfg;
  const auto surface = build_surface(sc.cloud(), sc.planes, cfg);
  const auto a = cluster_wcseg(sc.cloud(), surface, cfg, 9, 1);
  const auto b = cluster_wcseg(sc.cloud(), surface, cfg, 9, 3);
  EXPECT_EQ(point_sets(a.clusters), point_sets(b.clusters));
}

TEST(Los, CubeIsOneCluster) {
  const auto sc = scene("cube", 4);
  ClusteringConfig cfg;
  cfg.k_total = 400;
  const auto surface = build_surface(sc.cloud(), sc.planes, cfg);
  const auto r = cluster_los(sc.cloud(), surface, cfg, 1);
  EXPECT_EQ(r.clusters.size(), 1u);
  EXPECT_NEAR(static_cast<double>(r.samples.size()), 400, 6);
  EXPECT_EQ(r.quality.size(), 15u);
}

TEST(Los, TwoCuboidsAreTwoClusters) {
  const auto sc = scene("two_cuboids", 4);
  ClusteringConfig cfg;
  cfg.k_total = 400;
  const auto surface = build_surface(sc.cloud(), sc.planes, cfg);
  const auto r = cluster_los(sc.cloud(), surface, cfg, 1);
  ASSERT_EQ(r.clusters.size(), 2u);
  for (const auto& c : r.clusters) {
    const bool left = sc.cloud().points[c.points[0]].position.x < 2;
    for (auto i : c.points) EXPECT_EQ(sc.cloud().points[i].position.x < 2, left);
    EXPECT_EQ(c.planes.size(), 6u);
  }
}

TEST(ShapeDiameter, ConeAndMedian) {
  const Vec3 axis = normalize(Vec3{1, 2, -1});
  const double half = deg2rad(30);
  const auto dirs = cone_directions(axis, half, 30);
  ASSERT_EQ(dirs.size(), 30u);
  EXPECT_NEAR(dot(dirs[0], axis), 1, 1e-12);
  for (const auto& d : dirs) {
    EXPECT_NEAR(length(d), 1, 1e-12);
    EXPECT_GE(dot(d, axis), std::cos(half) - 1e-12);
  }
  EXPECT_EQ(median_of({3, 1, 2}), 2);
  EXPECT_EQ(median_of({4, 1, 3, 2}), 2.5);
  EXPECT_EQ(median_of({}), -1);

  const auto sc = scene("cube");
  const ClusteringConfig cfg;
  const auto surface = build_surface(sc.cloud(), sc.planes, cfg);
  const StructuredPoint top{{0.5, 0.5, 1.0}, {0, 0, 1}, PointLabel::planar, {}};
  const double d = shape_diameter(top, surface, cfg);
  EXPECT_GE(d, 1 - 0.01);
  EXPECT_LE(d, 1 / std::cos(half) + 0.01);
  const StructuredPoint outward{{0.5, 0.5, 1.0}, {0, 0, -1}, PointLabel::planar, {}};
  EXPECT_LT(shape_diameter(outward, surface, cfg), 0);
}

TEST(Assign, NearestClusterWithLowestIndexOnTies) {
  const auto s = labelled_points({{{0, 0, 0}, 0}, {{2, 0, 0}, 0}, {{1, 0, 0}, 0}, {{0.2, 0, 0}, 0}, {{5, 0, 0}, 0}});
  const auto c = assign_structured_points({{1}, {0}}, s);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].points, (std::vector<std::size_t>{1, 2, 4}));
  EXPECT_EQ(c[1].points, (std::vector<std::size_t>{0, 3}));
  const auto dropped = assign_structured_points({{0}, {}, {1}}, s);
  EXPECT_EQ(dropped.size(), 2u);
  EXPECT_THROW(assign_structured_points({{}}, s), Error);
}

TEST(Config, Validation) {
  ClusteringConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.k_total = 50;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.k_min = 4;
  cfg.k_max = 3;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.wcseg_angle = 180;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.wcseg_min_region = 1;
  EXPECT_THROW(cfg.validate(), Error);
}
