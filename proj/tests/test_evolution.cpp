#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace polyrecon;

namespace {

struct Scene {
  std::vector<Plane> planes;
  StructuringResult structure;
  std::vector<ConvexCluster> clusters;
  double diag = 0;
  double eps = 0;
};

/// Extraction and structuring of a synthetic model; clusters from WCSEG, or
/// a single cluster holding everything.
Scene scene(const std::string& model, std::uint64_t seed, bool single = false) {
  const auto m = synthetic_model(model);
  const auto raw = sample_model(m, density_for(m, 10000), 0.002, seed);
  Scene s;
  s.diag = raw.bounds().diagonal();
  s.eps = 0.01 * s.diag;
  s.planes = extract_planes(raw, {}, seed).planes;
  s.structure = structure_cloud(s.planes, raw, s.eps, 10);
  if (single) {
    ConvexCluster all;
    all.points.resize(s.structure.cloud.size());
    std::iota(all.points.begin(), all.points.end(), std::size_t{0});
    for (std::size_t p = 0; p < s.planes.size(); ++p) all.planes.push_back(static_cast<int>(p));
    s.clusters.push_back(std::move(all));
  } else {
    const ClusteringConfig cc;
    const auto surface = build_surface(s.structure.cloud, s.planes, cc);
    s.clusters = cluster_wcseg(s.structure.cloud, surface, cc, seed).clusters;
  }
  return s;
}

ClusterProblem problem(const Scene& s, std::size_t cluster, EAConfig cfg = {}) {
  cfg = cfg.resolved(s.diag, s.eps);
  auto volume = build_target_volume(s.clusters[cluster], s.structure.cloud, cfg.voxel_cell, 2 * cfg.voxel_cell);
  return ClusterProblem(s.clusters[cluster], s.structure.cloud, s.planes, s.structure.graph, std::move(volume), cfg);
}

const Scene& cube_scene() {
  static const Scene s = scene("cube", 0, true);
  return s;
}

const Scene& l_scene() {
  static const Scene s = scene("l_shape", 1);
  return s;
}

/// Grid over [lo, hi]^3 that reports `value` everywhere inside.
SignedDistanceGrid flat_grid(double lo, double hi, double value) {
  return SignedDistanceGrid({lo, lo, lo}, hi - lo, {2, 2, 2}, std::vector<double>(8, value));
}

/// Hand-built problem: unit cube planes, the cut x + y <= 1.5 and x <= 3.
ClusterProblem cut_cube_problem() {
  auto hs = oracle::box_halfspaces({0, 0, 0}, {1, 1, 1});
  hs.push_back({{0.75, 0.75, 0}, normalize(Vec3{1, 1, 0}), 6});
  hs.push_back({{3, 0, 0}, {1, 0, 0}, 7});
  std::vector<Point3> pts{{0, 0, 0}, {1, 1, 1}, {0.5, 0.5, 0}};
  EAConfig cfg;
  cfg = cfg.resolved(std::sqrt(3.0), 0.01);
  return ClusterProblem(hs, {}, pts, flat_grid(-1, 2, -1), cfg);
}

Individual of(std::vector<PolytopeRef> p) {
  Individual ind;
  ind.polytopes = std::move(p);
  return ind;
}

PolytopeRef tag(int id) {
  auto e = std::make_shared<PolytopeEntry>();
  e->polytope.planes.push_back({{0, 0, 0}, {0, 0, 1}, id});
  return e;
}

bool is_non_decreasing(const std::vector<double>& t) { return std::is_sorted(t.begin(), t.end()); }

ScoredPolytope box(int cluster, Point3 lo, Point3 hi, double score, int id0) {
  auto p = make_polytope(oracle::box_halfspaces(lo, hi, id0));
  return {cluster, *p, score};
}

}  // namespace

TEST(TargetVolume, CubeInsideOutside) {
  const auto& s = cube_scene();
  const double cell = s.diag / 50;
  const auto vol = build_target_volume(s.clusters[0], s.structure.cloud, cell, 2 * cell);
  EXPECT_NEAR(vol({0.5, 0.5, 0.5}), -0.5, 0.1);
  EXPECT_LE(std::abs(vol({0.5, 0.5, 1.0})), cell);
  EXPECT_LE(std::abs(vol({0.0, 0.3, 0.6})), cell);
  EXPECT_GT(vol({1.05, 1.05, 1.05}), 0);
  EXPECT_GT(vol({5, 5, 5}), 0);
  // Lattice faces are strictly outside.
  const auto& d = vol.dims();
  for (long j = 0; j < d[1]; ++j)
    for (long k = 0; k < d[2]; ++k) EXPECT_GT(vol.node(0, j, k), 0);
  ConvexCluster tiny{{0, 1, 2, 3, 4}, {0}};
  EXPECT_THROW(build_target_volume(tiny, s.structure.cloud, cell, cell), Error);
  EXPECT_THROW(build_target_volume(s.clusters[0], s.structure.cloud, 0, cell), Error);
}

TEST(TargetVolume, GridInterpolatesAndRejectsBadShape) {
  // Values equal to x: trilinear interpolation is exact.
  std::vector<double> v;
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) v.push_back(0.5 * i);
  const SignedDistanceGrid g({0, 0, 0}, 0.5, {3, 3, 3}, v);
  EXPECT_NEAR(g({0.3, 0.7, 0.2}), 0.3, 1e-12);
  EXPECT_EQ(g({1.5, 0.5, 0.5}), 0.5);
  EXPECT_THROW(SignedDistanceGrid({0, 0, 0}, 1, {1, 2, 2}, std::vector<double>(4)), Error);
  EXPECT_THROW(SignedDistanceGrid({0, 0, 0}, 1, {2, 2, 2}, std::vector<double>(7)), Error);
}

TEST(ClusterProblem, CandidatesFaceOutward) {
  auto prob = problem(cube_scene(), 0);
  ASSERT_EQ(prob.candidates().size(), 6u);
  for (const auto& h : prob.candidates()) EXPECT_LT(h.eval({0.5, 0.5, 0.5}), 0);
  const Plane floor{{0, 0, 0}, {0, 0, 1}, {}};
  const std::vector<Point3> above{{0, 0, 0}, {0, 0, 1}, {1, 0, 1}};
  EXPECT_EQ(orient_for_cluster(floor, 3, above, 0.1).normal.z, -1);
  const std::vector<Point3> below{{0, 0, 0}, {0, 0, -1}};
  EXPECT_EQ(orient_for_cluster(floor, 3, below, 0.1).normal.z, 1);
}

TEST(ClusterProblem, ExactCubeScore) {
  auto prob = problem(cube_scene(), 0);
  const auto cube = prob.build({0, 1, 2, 3, 4, 5});
  ASSERT_TRUE(cube);
  EXPECT_EQ(cube->polytope.vertices.size(), 8u);
  Individual ind = of({cube});
  const double f = prob.score(ind);
  EXPECT_NEAR(f, 1.99, 0.01);
  EXPECT_NEAR(f, oracle::single_polytope_score(prob, cube->polytope), 1e-12);
  EXPECT_EQ(prob.surface_coverage(ind), 1.0);
  EXPECT_EQ(cube->volume, voxelize(cube->polytope, prob.config().voxel_cell).volume());
  EXPECT_NEAR(voxelize(cube->polytope, 0.01).volume(), 1.0, 0.03);
  // Far from the cluster: no coverage, no containment, only the size penalty.
  auto away = make_polytope(oracle::box_halfspaces({5, 5, 5}, {6, 6, 6}));
  Individual far = of({prob.evaluate(*away)});
  EXPECT_NEAR(prob.score(far), -0.01, 1e-12);
  Individual empty;
  EXPECT_EQ(prob.score(empty), -HUGE_VAL);
}

TEST(ClusterProblem, BuildRejectsUnboundedAndOutOfDomain) {
  auto prob = problem(cube_scene(), 0);
  EXPECT_FALSE(prob.build({0, 1, 2, 3, 4}));
  EXPECT_FALSE(prob.build({0, 2, 4}));
  EXPECT_TRUE(prob.build({5, 4, 3, 2, 1, 0, 0}));
  const Aabb& d = prob.domain();
  EXPECT_LT(d.min.x, -0.5);
  EXPECT_GT(d.max.z, 1.5);
  EXPECT_EQ(prob.distinct_polytopes(), 1u);
}

TEST(Operators, CrossoverKeepsPolytopeMultiset) {
  const Individual a = of({tag(1)}), b = of({tag(2)});
  Rng rng(0);
  const auto [x, y] = crossover(a, b, rng);
  EXPECT_EQ(x.polytopes, b.polytopes);
  EXPECT_EQ(y.polytopes, a.polytopes);
  EXPECT_THROW(crossover(a, Individual{}, rng), Error);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng r(seed);
    std::vector<PolytopeRef> pa, pb;
    for (std::size_t i = 0, n = 1 + r.index(6); i < n; ++i) pa.push_back(tag(static_cast<int>(i)));
    for (std::size_t i = 0, n = 1 + r.index(6); i < n; ++i) pb.push_back(tag(100 + static_cast<int>(i)));
    const auto [c, d] = crossover(of(pa), of(pb), r);
    EXPECT_FALSE(c.polytopes.empty());
    EXPECT_FALSE(d.polytopes.empty());
    std::multiset<const PolytopeEntry*> before, after;
    for (const auto& p : pa) before.insert(p.get());
    for (const auto& p : pb) before.insert(p.get());
    for (const auto& p : c.polytopes) after.insert(p.get());
    for (const auto& p : d.polytopes) after.insert(p.get());
    EXPECT_EQ(before, after);
  }
}

TEST(Operators, MutationRespectsSizeBounds) {
  auto prob = problem(cube_scene(), 0);
  Rng rng(4);
  const auto cube = prob.build({0, 1, 2, 3, 4, 5});
  Individual one = of({cube});
  mutate(one, prob, MutationKind::remove, rng);
  EXPECT_EQ(one.size(), 1u);
  Individual two = of({cube, cube});
  mutate(two, prob, MutationKind::remove, rng);
  EXPECT_EQ(two.size(), 1u);
  EXPECT_FALSE(two.scored);
  Individual full = of(std::vector<PolytopeRef>(10, cube));
  mutate(full, prob, MutationKind::add, rng);
  EXPECT_EQ(full.size(), 10u);
  mutate(one, prob, MutationKind::add, rng);
  EXPECT_EQ(one.size(), 2u);
  for (int t = 0; t < 50; ++t) {
    mutate(one, prob, rng);
    EXPECT_GE(one.size(), 1u);
    EXPECT_LE(one.size(), 10u);
    for (const auto& p : one.polytopes) EXPECT_FALSE(p->polytope.vertices.empty());
  }
}

TEST(Operators, ExtendAddsPlane) {
  auto prob = cut_cube_problem();
  const auto cube = prob.build({0, 1, 2, 3, 4, 5});
  ASSERT_TRUE(cube);
  const auto cut = extend_polytope(prob, *cube, 6);
  ASSERT_TRUE(cut);
  EXPECT_EQ(cut->polytope.plane_ids(), (std::vector<int>{0, 1, 2, 3, 4, 5, 6}));
  EXPECT_NEAR(polytope_volume(cut->polytope), 0.875, 1e-9);
  EXPECT_EQ(extend_polytope(prob, *cube, 2)->polytope.plane_ids(), cube->polytope.plane_ids());
  EXPECT_EQ(extend_polytope(prob, *cube, 7)->polytope.plane_ids(), cube->polytope.plane_ids());
  const auto wedge = prob.build({0, 2, 4, 5, 6});
  ASSERT_TRUE(wedge);
  EXPECT_NEAR(polytope_volume(wedge->polytope), 1.125, 1e-9);
  EXPECT_EQ(extend_polytope(prob, *wedge, 1)->polytope.plane_ids(), (std::vector<int>{0, 1, 2, 4, 5, 6}));
}

TEST(Operators, RandomPolytopeNeedsFourCandidates) {
  auto three = oracle::box_halfspaces({0, 0, 0}, {1, 1, 1});
  three.resize(3);
  EAConfig cfg;
  ClusterProblem prob(three, {}, {{0.5, 0.5, 0.5}}, flat_grid(-1, 2, -1), cfg.resolved(1.7, 0.01));
  Rng rng(0);
  EXPECT_FALSE(random_polytope(prob, rng));
  EXPECT_THROW(evolve(prob, 0), Error);
}

TEST(Operators, DisjointCuboidsDrawOwnPlanes) {
  const auto s = scene("two_cuboids", 2);
  ASSERT_EQ(s.clusters.size(), 2u);
  for (std::size_t c = 0; c < 2; ++c) {
    auto prob = problem(s, c);
    EXPECT_EQ(prob.candidates().size(), 6u);
    const std::set<int> own(s.clusters[c].planes.begin(), s.clusters[c].planes.end());
    Rng rng(c);
    for (int t = 0; t < 30; ++t) {
      const auto p = random_polytope_retry(prob, rng);
      ASSERT_TRUE(p);
      for (int id : p->polytope.plane_ids()) EXPECT_TRUE(own.count(id)) << "plane " << id;
    }
  }
}

TEST(Evolve, CubeConvergesForAllSeeds) {
  auto cfg = EAConfig{};
  cfg.population_size = 50;
  cfg.max_iterations = 50;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto prob = problem(cube_scene(), 0, cfg);
    const auto r = evolve(prob, seed);
    EXPECT_GE(r.best.score, 1.9) << "seed " << seed;
    ASSERT_EQ(r.best.size(), 1u);
    EXPECT_EQ(r.best.polytopes[0]->polytope.planes.size(), 6u);
    EXPECT_LE(r.generations, 50);
    EXPECT_EQ(r.trace.size(), static_cast<std::size_t>(r.generations));
    EXPECT_TRUE(is_non_decreasing(r.trace));
  }
}

TEST(Evolve, StallLimitStopsWithoutVariation) {
  EAConfig cfg;
  cfg.population_size = 20;
  cfg.stall_limit = 1;
  auto prob = problem(cube_scene(), 0, cfg);
  EvolutionHooks hooks;
  hooks.vary = false;
  const auto r = evolve(prob, 3, 1, hooks);
  EXPECT_EQ(r.generations, 2);
  EXPECT_EQ(r.trace[0], r.trace[1]);
}

TEST(Evolve, ElitismDeterminismAndBounds) {
  const auto& s = l_scene();
  ASSERT_EQ(s.clusters.size(), 2u);
  EAConfig cfg;
  cfg.max_iterations = 60;
  for (std::size_t c = 0; c < 2; ++c) {
    auto p1 = problem(s, c, cfg);
    auto p2 = problem(s, c, cfg);
    const auto a = evolve(p1, 7, 1);
    const auto b = evolve(p2, 7, 3);
    EXPECT_EQ(a.trace, b.trace);
    ASSERT_EQ(a.best.size(), b.best.size());
    for (std::size_t i = 0; i < a.best.size(); ++i)
      EXPECT_EQ(a.best.polytopes[i]->polytope.plane_ids(), b.best.polytopes[i]->polytope.plane_ids());
    EXPECT_TRUE(is_non_decreasing(a.trace));
    for (double f : a.trace) {
      EXPECT_GE(f, -p1.config().gamma);
      EXPECT_LE(f, p1.config().alpha + p1.config().beta);
    }
    EXPECT_EQ(a.best.polytope_scores.size(), a.best.size());
  }
}

TEST(Evolve, SharingPolytopesDoesNotChangeSearch) {
  const auto& s = l_scene();
  EAConfig off, on;
  off.max_iterations = on.max_iterations = 40;
  on.share_polytopes = true;
  auto a = problem(s, 0, off);
  auto b = problem(s, 0, on);
  const auto ra = evolve(a, 11);
  const auto rb = evolve(b, 11);
  EXPECT_EQ(ra.trace, rb.trace);
  EXPECT_EQ(ra.distinct_polytopes, rb.distinct_polytopes);
}

TEST(Evolve, MatchesExhaustiveOptimum) {
  for (const auto* s : {&cube_scene(), &l_scene()})
    for (std::size_t c = 0; c < s->clusters.size(); ++c) {
      auto prob = problem(*s, c);
      ASSERT_LE(prob.candidates().size(), 8u);
      const auto single = oracle::best_single_polytope(prob);
      const double any = oracle::best_polytope_multiset(prob);
      EXPECT_GE(any, single.score - 1e-12);
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto r = evolve(prob, seed);
        EXPECT_NEAR(r.best.score, any, 1e-9) << "cluster " << c << " seed " << seed;
        if (any - single.score < 1e-9) {
          ASSERT_EQ(r.best.size(), 1u);
          EXPECT_EQ(r.best.polytopes[0]->polytope.plane_ids(), single.planes);
        }
      }
    }
}

TEST(Filter, ThresholdDedupAndContainment) {
  const auto outer = box(0, {0, 0, 0}, {2, 2, 2}, 0.9, 0);
  const auto inner = box(0, {0.5, 0.5, 0.5}, {1, 1, 1}, 0.95, 10);
  const auto weak = box(1, {5, 5, 5}, {6, 6, 6}, 0.4, 20);
  const auto same = box(1, {7, 7, 7}, {8, 8, 8}, 0.6, 40);
  const auto apart = box(1, {7, 7, 7}, {8, 8, 8}, 0.8, 30);
  auto out = filter_polytopes({weak, inner, outer, same, apart}, 0.5);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].cluster, 0);
  EXPECT_EQ(out[0].polytope.plane_ids(), outer.polytope.plane_ids());
  // Same geometry under different ids: mutual containment keeps the first.
  EXPECT_EQ(out[1].polytope.plane_ids(), apart.polytope.plane_ids());
  // Equal plane sets: the higher score survives.
  auto dup = outer;
  dup.score = 0.7;
  out = filter_polytopes({dup, outer}, 0.5);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].score, 0.9);
  EXPECT_TRUE(filter_polytopes({weak}, 0.5).empty());
  EXPECT_EQ(filter_polytopes({weak}, 0.4).size(), 1u);
  EXPECT_TRUE(contained_in(inner.polytope, outer.polytope));
  EXPECT_FALSE(contained_in(outer.polytope, inner.polytope));
}

TEST(Filter, OrderAndIdempotence) {
  Rng rng(5);
  for (int t = 0; t < 30; ++t) {
    std::vector<ScoredPolytope> in;
    for (int i = 0; i < 8; ++i) {
      const Point3 lo{rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(0, 2)};
      const Point3 hi = lo + Vec3{rng.uniform(0.2, 2), rng.uniform(0.2, 2), rng.uniform(0.2, 2)};
      in.push_back(box(static_cast<int>(rng.index(3)), lo, hi, rng.uniform(), 6 * static_cast<int>(rng.index(5))));
    }
    const auto once = filter_polytopes(in, 0.3);
    const auto twice = filter_polytopes(once, 0.3);
    ASSERT_EQ(once.size(), twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
      EXPECT_EQ(once[i].polytope.plane_ids(), twice[i].polytope.plane_ids());
      EXPECT_EQ(once[i].score, twice[i].score);
      EXPECT_GE(once[i].score, 0.3);
      if (i > 0) {
        EXPECT_LE(once[i - 1].cluster, once[i].cluster);
        if (once[i - 1].cluster == once[i].cluster) {
          EXPECT_GE(once[i - 1].score, once[i].score);
        }
      }
      for (std::size_t j = 0; j < once.size(); ++j)
        if (i != j) {
          EXPECT_FALSE(contained_in(once[i].polytope, once[j].polytope));
        }
    }
  }
}

TEST(EAConfig, ResolveAndValidate) {
  EAConfig cfg;
  const auto r = cfg.resolved(5.0, 0.05);
  EXPECT_EQ(r.voxel_cell, 0.1);
  EXPECT_EQ(r.eps_geo, 0.1);
  EXPECT_EQ(r.eps_vol, 0.1);
  EXPECT_NO_THROW(r.validate());
  cfg.population_size = 3;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.mutation_rate = 1.5;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.walk_min = 5;
  cfg.walk_max = 4;
  EXPECT_THROW(cfg.validate(), Error);
}
