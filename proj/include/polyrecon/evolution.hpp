// Copyright 2026 The polyrecon Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "clustering.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "polytope.hpp"
#include "rng.hpp"
#include "structuring.hpp"
#include "target_volume.hpp"

namespace polyrecon {

/// Search and objective parameters. Zero lengths are derived by resolved().
struct EAConfig {
  int population_size = 150;
  int max_iterations = 300;
  int stall_limit = 40;
  double crossover_rate = 0.4;
  double mutation_rate = 0.7;
  double alpha = 1.0;  // surface coverage weight
  double beta = 1.0;   // containment weight
  double gamma = 0.1;  // size penalty weight
  int max_polytopes = 10;
  double eps_geo = 0;     // auto: 2 * structuring eps
  double eps_vol = 0;     // auto: voxel_cell
  double voxel_cell = 0;  // auto: diagonal / 50
  int tournament_size = 2;
  double filter_threshold = 0.5;
  bool normalize_fp = true;
  bool all_planes = false;
  bool share_polytopes = false;  // memoize polytopes across individuals
  int walk_min = 3;
  int walk_max = 12;
  int retries = 20;

  EAConfig resolved(double diagonal, double eps) const {
    EAConfig c = *this;
    if (c.voxel_cell <= 0) c.voxel_cell = diagonal / 50.0;
    if (c.eps_geo <= 0) c.eps_geo = 2.0 * eps;
    if (c.eps_vol <= 0) c.eps_vol = c.voxel_cell;
    return c;
  }

  void validate() const {
    if (population_size < 4) throw Error("ea: population_size must be >= 4");
    if (max_iterations < 1 || stall_limit < 1) throw Error("ea: max_iterations and stall_limit must be >= 1");
    if (crossover_rate < 0 || crossover_rate > 1 || mutation_rate < 0 || mutation_rate > 1)
      throw Error("ea: rates must lie in [0, 1]");
    if (alpha < 0 || beta < 0 || gamma < 0) throw Error("ea: weights must be >= 0");
    if (max_polytopes < 1) throw Error("ea: max_polytopes must be >= 1");
    if (tournament_size < 1) throw Error("ea: tournament_size must be >= 1");
    if (walk_min < 0 || walk_max < walk_min) throw Error("ea: invalid walk length range");
  }
};

/// A bounded candidate polytope with everything the objective needs cached.
struct PolytopeEntry {
  ConvexPolytope polytope;
  std::vector<std::uint64_t> near;  // bit per cluster point within eps_geo of the boundary
  std::size_t voxels = 0;
  std::size_t inside_voxels = 0;
  double containment = 0;  // inside_voxels / voxels
  double volume = 0;       // voxels * cell^3
};
using PolytopeRef = std::shared_ptr<const PolytopeEntry>;

struct Individual {
  std::vector<PolytopeRef> polytopes;
  double score = -HUGE_VAL;
  std::vector<double> polytope_scores;
  bool scored = false;

  std::size_t size() const { return polytopes.size(); }
};

/// Orients `plane` for a cluster: the normal is flipped when the cluster
/// points off the plane (|d| > off) lie on its positive side on average.
inline HalfSpace orient_for_cluster(const Plane& plane, int id, std::span<const Point3> cluster, double off) {
  HalfSpace h = HalfSpace::from(plane, id);
  double sum = 0, all = 0;
  std::size_t count = 0;
  for (const auto& p : cluster) {
    const double d = dot(h.normal, p - h.origin);
    all += d;
    if (std::abs(d) > off) {
      sum += d;
      ++count;
    }
  }
  if ((count > 0 ? sum : all) > 0) h.normal = -h.normal;
  return h;
}

/// Per-cluster search space and objective: oriented candidate planes, their
/// adjacency, the cluster points and the target volume. With share_polytopes
/// every polytope built so far is memoized by plane set.
class ClusterProblem {
 public:
  ClusterProblem(const ConvexCluster& cluster, const StructuredCloud& s, const std::vector<Plane>& planes,
                 const NeighborhoodGraph& graph, SignedDistanceGrid volume, const EAConfig& cfg)
      : cfg_(cfg), volume_(std::move(volume)) {
    for (auto i : cluster.points) points_.push_back(s.points[i].position);
    std::set<int> cand;
    if (cfg.all_planes) {
      for (std::size_t p = 0; p < planes.size(); ++p) cand.insert(static_cast<int>(p));
    } else {
      cand.insert(cluster.planes.begin(), cluster.planes.end());
      for (auto [a, b] : graph.edges) {
        if (std::binary_search(cluster.planes.begin(), cluster.planes.end(), a)) cand.insert(b);
        if (std::binary_search(cluster.planes.begin(), cluster.planes.end(), b)) cand.insert(a);
      }
    }
    for (int id : cand) {
      position_[id] = candidates_.size();
      candidates_.push_back(orient_for_cluster(planes[static_cast<std::size_t>(id)], id, points_, 2.0 * s.eps));
      if (std::binary_search(cluster.planes.begin(), cluster.planes.end(), id) || cfg.all_planes) core_.push_back(candidates_.size() - 1);
    }
    if (core_.empty())
      for (std::size_t i = 0; i < candidates_.size(); ++i) core_.push_back(i);
    adjacency_.resize(candidates_.size());
    for (auto [a, b] : graph.edges) {
      auto ia = position_.find(a), ib = position_.find(b);
      if (ia == position_.end() || ib == position_.end()) continue;
      adjacency_[ia->second].push_back(ib->second);
      adjacency_[ib->second].push_back(ia->second);
    }
    for (auto& l : adjacency_) std::sort(l.begin(), l.end());
    set_domain();
  }

  /// Problem from explicit oriented halfspaces, for small hand-built cases.
  ClusterProblem(std::vector<HalfSpace> candidates, std::vector<std::vector<std::size_t>> adjacency, std::vector<Point3> points,
                 SignedDistanceGrid volume, const EAConfig& cfg)
      : cfg_(cfg), volume_(std::move(volume)), points_(std::move(points)), candidates_(std::move(candidates)),
        adjacency_(std::move(adjacency)) {
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
      position_[candidates_[i].id] = i;
      core_.push_back(i);
    }
    adjacency_.resize(candidates_.size());
    set_domain();
  }

  const EAConfig& config() const { return cfg_; }
  /// Polytopes reaching outside this box count as unbounded.
  const Aabb& domain() const { return domain_; }
  const SignedDistanceGrid& volume() const { return volume_; }
  std::span<const Point3> points() const { return points_; }
  std::span<const HalfSpace> candidates() const { return candidates_; }
  const std::vector<std::vector<std::size_t>>& adjacency() const { return adjacency_; }
  std::span<const std::size_t> core() const { return core_; }

  /// Polytope over the given candidate positions, or nothing if it is
  /// unbounded, empty or reaches outside domain().
  PolytopeRef build(std::vector<std::size_t> positions) {
    std::sort(positions.begin(), positions.end());
    positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
    const bool share = cfg_.share_polytopes;
    if (share)
      if (auto it = by_input_.find(positions); it != by_input_.end()) return it->second;
    std::vector<HalfSpace> hs;
    for (auto p : positions) hs.push_back(candidates_[p]);
    PolytopeRef ref;
    auto poly = make_polytope(std::move(hs));
    if (poly && !within_domain(*poly)) poly.reset();
    if (poly) {
      auto ids = poly->plane_ids();
      if (auto it = by_facets_.find(ids); share && it != by_facets_.end()) {
        ref = it->second;
      } else {
        ref = evaluate(std::move(*poly));
        if (share)
          by_facets_.emplace(ids, ref);
        else
          seen_.insert(std::move(ids));
      }
    }
    if (share) by_input_.emplace(std::move(positions), ref);
    return ref;
  }

  /// Candidate positions of the polytope's facet planes.
  std::vector<std::size_t> positions_of(const PolytopeEntry& e) const {
    std::vector<std::size_t> out;
    for (const auto& h : e.polytope.planes) out.push_back(position_.at(h.id));
    return out;
  }

  std::size_t distinct_polytopes() const { return by_facets_.size() + seen_.size(); }

  /// Objective of an individual; fills the per-polytope containment scores.
  double score(Individual& ind) const {
    ind.polytope_scores.clear();
    if (ind.polytopes.empty()) {
      ind.score = -HUGE_VAL;
      ind.scored = true;
      return ind.score;
    }
    const std::size_t words = (points_.size() + 63) / 64;
    std::vector<std::uint64_t> covered(words, 0);
    double fp = 0;
    for (const auto& p : ind.polytopes) {
      for (std::size_t w = 0; w < words; ++w) covered[w] |= p->near[w];
      ind.polytope_scores.push_back(p->containment);
      fp += p->containment;
    }
    std::size_t hits = 0;
    for (auto w : covered) hits += static_cast<std::size_t>(std::popcount(w));
    const double fg = points_.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(points_.size());
    const double n = static_cast<double>(ind.polytopes.size());
    if (cfg_.normalize_fp) fp /= n;
    ind.score = cfg_.alpha * fg + cfg_.beta * fp - cfg_.gamma * n / static_cast<double>(cfg_.max_polytopes);
    ind.scored = true;
    return ind.score;
  }

  /// Fraction of cluster points within eps_geo of some polytope's boundary.
  double surface_coverage(const Individual& ind) const {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < points_.size(); ++i)
      for (const auto& p : ind.polytopes)
        if (p->near[i / 64] >> (i % 64) & 1U) {
          ++hits;
          break;
        }
    return points_.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(points_.size());
  }

 private:
  void set_domain() {
    domain_ = bounds_of(points_);
    if (domain_.empty()) return;
    const double m = domain_.diagonal() * kDomainMargin;
    domain_.min = domain_.min - Vec3{m, m, m};
    domain_.max = domain_.max + Vec3{m, m, m};
  }

  bool within_domain(const ConvexPolytope& p) const {
    for (const auto& v : p.vertices)
      if (v.x < domain_.min.x || v.y < domain_.min.y || v.z < domain_.min.z || v.x > domain_.max.x || v.y > domain_.max.y ||
          v.z > domain_.max.z)
        return false;
    return true;
  }

  static constexpr double kDomainMargin = 0.5;

 public:
  /// Cached objective data of a bounded polytope; no domain check.
  PolytopeRef evaluate(ConvexPolytope poly) const {
    auto e = std::make_shared<PolytopeEntry>();
    e->near.assign((points_.size() + 63) / 64, 0);
    for (std::size_t i = 0; i < points_.size(); ++i)
      if (std::abs(signed_distance(poly, points_[i])) < cfg_.eps_geo) e->near[i / 64] |= std::uint64_t{1} << (i % 64);
    const VoxelSet vs = voxelize(poly, cfg_.voxel_cell);
    e->voxels = vs.centers.size();
    for (const auto& c : vs.centers)
      if (volume_(c) < cfg_.eps_vol) ++e->inside_voxels;
    e->containment = e->voxels ? static_cast<double>(e->inside_voxels) / static_cast<double>(e->voxels) : 0.0;
    e->volume = vs.volume();
    e->polytope = std::move(poly);
    return e;
  }

 private:
  EAConfig cfg_;
  SignedDistanceGrid volume_;
  std::vector<Point3> points_;
  std::vector<HalfSpace> candidates_;
  std::map<int, std::size_t> position_;  // plane id -> candidate position
  std::vector<std::size_t> core_;
  std::vector<std::vector<std::size_t>> adjacency_;
  Aabb domain_;
  std::map<std::vector<std::size_t>, PolytopeRef> by_input_;
  std::map<std::vector<int>, PolytopeRef> by_facets_;
  std::set<std::vector<int>> seen_;
};

// ---------------------------------------------------------------- operators

/// Seeds with a uniform core plane and grows by a random breadth-first walk
/// over the plane adjacency, adding walk_min..walk_max planes. Walks whose
/// component holds fewer than 4 planes use all candidates instead.
inline PolytopeRef random_polytope(ClusterProblem& prob, Rng& rng) {
  const auto cand = prob.candidates();
  if (cand.size() < 4) return nullptr;
  const auto core = prob.core();
  const std::size_t seed = core[rng.index(core.size())];
  const auto& adj = prob.adjacency();
  std::vector<char> reach(cand.size(), 0);
  std::vector<std::size_t> q{seed};
  reach[seed] = 1;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (auto j : adj[q[i]])
      if (!reach[j]) {
        reach[j] = 1;
        q.push_back(j);
      }
  const bool complete = q.size() < 4;
  const int extra = rng.uniform_int(prob.config().walk_min, prob.config().walk_max);
  std::vector<std::size_t> chosen{seed};
  std::vector<char> in(cand.size(), 0);
  in[seed] = 1;
  for (int step = 0; step < extra; ++step) {
    std::vector<std::size_t> frontier;
    if (complete) {
      for (std::size_t j = 0; j < cand.size(); ++j)
        if (!in[j]) frontier.push_back(j);
    } else {
      std::set<std::size_t> f;
      for (auto c : chosen)
        for (auto j : adj[c])
          if (!in[j]) f.insert(j);
      frontier.assign(f.begin(), f.end());
    }
    if (frontier.empty()) break;
    const auto pick = frontier[rng.index(frontier.size())];
    in[pick] = 1;
    chosen.push_back(pick);
  }
  return prob.build(std::move(chosen));
}

inline PolytopeRef random_polytope_retry(ClusterProblem& prob, Rng& rng) {
  for (int t = 0; t < prob.config().retries; ++t)
    if (auto p = random_polytope(prob, rng)) return p;
  return nullptr;
}

/// Swaps a random non-empty contiguous range of each parent, so neither child
/// can end up empty.
inline std::pair<Individual, Individual> crossover(const Individual& a, const Individual& b, Rng& rng) {
  if (a.polytopes.empty() || b.polytopes.empty()) throw Error("crossover needs non-empty parents", "polytope_gen");
  auto range = [&](std::size_t n) {
    std::size_t i = rng.index(n), j = rng.index(n);
    if (i > j) std::swap(i, j);
    return std::pair{i, j + 1};
  };
  const auto [a0, a1] = range(a.size());
  const auto [b0, b1] = range(b.size());
  Individual ca, cb;
  ca.polytopes.assign(a.polytopes.begin(), a.polytopes.begin() + static_cast<long>(a0));
  ca.polytopes.insert(ca.polytopes.end(), b.polytopes.begin() + static_cast<long>(b0), b.polytopes.begin() + static_cast<long>(b1));
  ca.polytopes.insert(ca.polytopes.end(), a.polytopes.begin() + static_cast<long>(a1), a.polytopes.end());
  cb.polytopes.assign(b.polytopes.begin(), b.polytopes.begin() + static_cast<long>(b0));
  cb.polytopes.insert(cb.polytopes.end(), a.polytopes.begin() + static_cast<long>(a0), a.polytopes.begin() + static_cast<long>(a1));
  cb.polytopes.insert(cb.polytopes.end(), b.polytopes.begin() + static_cast<long>(b1), b.polytopes.end());
  return {std::move(ca), std::move(cb)};
}

enum class MutationKind { replace, add, remove, extend };

/// Adds candidate `plane` to the polytope's planes; nothing if the result is
/// unbounded or empty.
inline PolytopeRef extend_polytope(ClusterProblem& prob, const PolytopeEntry& e, std::size_t plane) {
  auto pos = prob.positions_of(e);
  pos.push_back(plane);
  return prob.build(std::move(pos));
}

/// Applies one mutation of the given kind. Failed steps leave `ind` unchanged.
inline void mutate(Individual& ind, ClusterProblem& prob, MutationKind kind, Rng& rng) {
  if (ind.polytopes.empty()) return;
  const auto n_max = static_cast<std::size_t>(prob.config().max_polytopes);
  switch (kind) {
    case MutationKind::replace: {
      const auto i = rng.index(ind.size());
      if (auto p = random_polytope_retry(prob, rng)) ind.polytopes[i] = std::move(p);
      break;
    }
    case MutationKind::add:
      if (ind.size() < n_max)
        if (auto p = random_polytope_retry(prob, rng)) ind.polytopes.push_back(std::move(p));
      break;
    case MutationKind::remove:
      if (ind.size() > 1) ind.polytopes.erase(ind.polytopes.begin() + static_cast<long>(rng.index(ind.size())));
      break;
    case MutationKind::extend: {
      const auto i = rng.index(ind.size());
      const auto plane = rng.index(prob.candidates().size());
      if (auto p = extend_polytope(prob, *ind.polytopes[i], plane)) ind.polytopes[i] = std::move(p);
      break;
    }
  }
  ind.scored = false;
}

inline void mutate(Individual& ind, ClusterProblem& prob, Rng& rng) {
  mutate(ind, prob, static_cast<MutationKind>(rng.index(4)), rng);
}

// ----------------------------------------------------------------- evolution

struct EvolutionResult {
  Individual best;
  std::vector<double> trace;  // best-ever score after each generation
  int generations = 0;
  std::size_t distinct_polytopes = 0;
};

/// Operator hooks; the defaults are the crossover and mutation above.
struct EvolutionHooks {
  bool vary = true;
};

namespace detail {

inline std::size_t tournament(const std::vector<Individual>& pop, int size, Rng& rng) {
  std::size_t best = rng.index(pop.size());
  for (int t = 1; t < size; ++t) {
    const std::size_t c = rng.index(pop.size());
    if (pop[c].score > pop[best].score || (pop[c].score == pop[best].score && c < best)) best = c;
  }
  return best;
}

/// Elite individual: the population's distinct polytopes with the highest
/// containment scores, as many as reach the filter threshold (at least 1,
/// at most max_polytopes).
inline Individual elite_individual(const std::vector<Individual>& pop, const EAConfig& cfg) {
  std::map<std::vector<int>, PolytopeRef> distinct;
  for (const auto& ind : pop)
    for (const auto& p : ind.polytopes) distinct.emplace(p->polytope.plane_ids(), p);
  std::vector<std::pair<std::vector<int>, PolytopeRef>> all(distinct.begin(), distinct.end());
  std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.second->containment > y.second->containment; });
  std::size_t above = 0;
  for (const auto& [ids, p] : all) above += p->containment >= cfg.filter_threshold;
  const std::size_t count = std::min<std::size_t>(std::max<std::size_t>(above, 1), static_cast<std::size_t>(cfg.max_polytopes));
  Individual e;
  for (std::size_t i = 0; i < count && i < all.size(); ++i) e.polytopes.push_back(all[i].second);
  return e;
}

inline void score_all(std::vector<Individual>& pop, const ClusterProblem& prob, int threads) {
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < pop.size(); ++i)
    if (!pop[i].scored) todo.push_back(i);
  parallel_for(todo.size(), threads, [&](std::size_t k) { prob.score(pop[todo[k]]); });
}

}  // namespace detail

/// Generational search for the best polytope set of one cluster. Returns the
/// best individual ever seen and the per-generation best-score trace.
inline EvolutionResult evolve(ClusterProblem& prob, std::uint64_t seed, int threads = 1, EvolutionHooks hooks = {}) {
  const EAConfig& cfg = prob.config();
  cfg.validate();
  if (prob.candidates().size() < 4) throw Error("cluster has fewer than 4 candidate planes", "polytope_gen");
  Rng rng(seed);
  std::vector<Individual> pop;
  pop.reserve(static_cast<std::size_t>(cfg.population_size));
  for (int i = 0; i < cfg.population_size; ++i) {
    Individual ind;
    const int n = rng.uniform_int(1, cfg.max_polytopes);
    for (int j = 0; j < n; ++j)
      if (auto p = random_polytope_retry(prob, rng)) ind.polytopes.push_back(std::move(p));
    pop.push_back(std::move(ind));
  }
  std::vector<std::size_t> filled;
  for (std::size_t i = 0; i < pop.size(); ++i)
    if (!pop[i].polytopes.empty()) filled.push_back(i);
  if (filled.empty()) throw Error("no bounded polytope constructible", "polytope_gen");
  for (auto& ind : pop)
    if (ind.polytopes.empty()) ind = pop[filled[rng.index(filled.size())]];
  detail::score_all(pop, prob, threads);

  auto argbest = [](const std::vector<Individual>& p) {
    std::size_t b = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
      if (p[i].score > p[b].score) b = i;
    return b;
  };
  EvolutionResult res;
  res.best = pop[argbest(pop)];
  res.trace.push_back(res.best.score);
  res.generations = 1;
  int stall = 0;
  while (res.generations < cfg.max_iterations && stall < cfg.stall_limit) {
    std::vector<Individual> next;
    next.reserve(pop.size());
    next.push_back(res.best);
    next.push_back(detail::elite_individual(pop, cfg));
    while (next.size() < pop.size()) {
      Individual a = pop[detail::tournament(pop, cfg.tournament_size, rng)];
      Individual b = pop[detail::tournament(pop, cfg.tournament_size, rng)];
      if (hooks.vary) {
        if (rng.bernoulli(cfg.crossover_rate)) {
          auto [x, y] = crossover(a, b, rng);
          a = std::move(x);
          b = std::move(y);
          a.scored = b.scored = false;
        }
        if (rng.bernoulli(cfg.mutation_rate)) mutate(a, prob, rng);
        if (rng.bernoulli(cfg.mutation_rate)) mutate(b, prob, rng);
      }
      next.push_back(std::move(a));
      if (next.size() < pop.size()) next.push_back(std::move(b));
    }
    pop = std::move(next);
    detail::score_all(pop, prob, threads);
    const std::size_t b = argbest(pop);
    if (pop[b].score > res.best.score) {
      res.best = pop[b];
      stall = 0;
    } else {
      ++stall;
    }
    res.trace.push_back(res.best.score);
    ++res.generations;
  }
  res.distinct_polytopes = prob.distinct_polytopes();
  return res;
}

// ------------------------------------------------------------------- filter

struct ScoredPolytope {
  int cluster = 0;
  ConvexPolytope polytope;
  double score = 0;  // containment summand
};

/// True when every vertex of `inner` lies inside or on `outer` (tolerance 1e-7).
inline bool contained_in(const ConvexPolytope& inner, const ConvexPolytope& outer) {
  for (const auto& v : inner.vertices)
    if (signed_distance(outer, v) < -1e-7) return false;
  return true;
}

/// Threshold, plane-set dedup and containment removal. Output is ordered by
/// cluster, then score descending, then plane ids.
inline std::vector<ScoredPolytope> filter_polytopes(std::vector<ScoredPolytope> in, double threshold) {
  std::erase_if(in, [&](const ScoredPolytope& p) { return p.score < threshold; });
  std::stable_sort(in.begin(), in.end(), [](const ScoredPolytope& a, const ScoredPolytope& b) {
    if (a.cluster != b.cluster) return a.cluster < b.cluster;
    if (a.score != b.score) return a.score > b.score;
    return a.polytope.plane_ids() < b.polytope.plane_ids();
  });
  std::vector<ScoredPolytope> uniq;
  std::set<std::vector<int>> seen;
  for (auto& p : in)
    if (seen.insert(p.polytope.plane_ids()).second) uniq.push_back(std::move(p));
  std::vector<char> removed(uniq.size(), 0);
  for (std::size_t i = 0; i < uniq.size(); ++i)
    for (std::size_t j = 0; j < uniq.size(); ++j) {
      if (i == j || removed[j] || !contained_in(uniq[i].polytope, uniq[j].polytope)) continue;
      if (j < i || !contained_in(uniq[j].polytope, uniq[i].polytope)) {
        removed[i] = 1;
        break;
      }
    }
  std::vector<ScoredPolytope> out;
  for (std::size_t i = 0; i < uniq.size(); ++i)
    if (!removed[i]) out.push_back(std::move(uniq[i]));
  return out;
}

inline std::vector<ScoredPolytope> scored_polytopes(const Individual& best, int cluster) {
  std::vector<ScoredPolytope> out;
  for (std::size_t i = 0; i < best.polytopes.size(); ++i)
    out.push_back({cluster, best.polytopes[i]->polytope, best.polytopes[i]->containment});
  return out;
}

}  // namespace polyrecon
