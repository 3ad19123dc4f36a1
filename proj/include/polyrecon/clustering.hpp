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
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "kdtree.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "spectral.hpp"
#include "structuring.hpp"
#include "surface.hpp"

namespace polyrecon {

enum class ClusteringMethod { los, wcseg };

/// Clustering parameters. Length-like WCSEG/visibility values are in units of
/// the structuring epsilon.
struct ClusteringConfig {
  int k_total = 3000;
  int k_min = 1;
  int k_max = 15;
  double alpha_q = 1.0;
  LaplacianKind laplacian = LaplacianKind::symmetric;
  double wcseg_angle = 20.0;
  int wcseg_knn = 10;
  double wcseg_patch_radius = 8.0;  // <= 0: unlimited
  double sdf_merge_threshold = 0.35;
  double visibility_threshold = 0.8;
  double wcseg_min_region = 0.01;  // fraction of structured points
  int wcseg_refine_rounds = 5;
  int visibility_pairs = 200;
  int sdf_rays = 30;
  double sdf_cone_angle = 60.0;  // full aperture, degrees
  double alpha_radius = 3.0;
  double guard = 1.5;

  void validate() const {
    if (k_total < 100) throw Error("clustering: k_total must be >= 100");
    if (k_min < 1 || k_max < k_min) throw Error("clustering: k range must be non-empty and start at >= 1");
    if (alpha_q < 0) throw Error("clustering: alpha_q must be >= 0");
    if (wcseg_knn < 1 || visibility_pairs < 1 || sdf_rays < 1) throw Error("clustering: counts must be positive");
    if (!(wcseg_min_region >= 0 && wcseg_min_region < 1) || wcseg_refine_rounds < 0)
      throw Error("clustering: wcseg_min_region must lie in [0, 1) and wcseg_refine_rounds be >= 0");
    if (!(wcseg_angle > 0 && wcseg_angle < 180)) throw Error("clustering: wcseg_angle must lie in (0, 180)");
    if (!(sdf_cone_angle > 0 && sdf_cone_angle < 180)) throw Error("clustering: sdf_cone_angle must lie in (0, 180)");
    if (!(alpha_radius > 0) || guard < 0) throw Error("clustering: alpha_radius > 0 and guard >= 0 required");
  }
};

/// Cluster of the structured cloud: point indices into O_s and the planes
/// owning at least one of them.
struct ConvexCluster {
  std::vector<std::size_t> points;
  std::vector<int> planes;
};

// ---------------------------------------------------------------- sampling

struct FpsResult {
  std::vector<std::size_t> indices;      // into O_s, grouped by plane
  std::vector<int> below_minimum;        // planes with fewer than 3 points
};

/// Greedy farthest-point order over `pts`, starting at index 0, ties to the
/// lowest index. Returns the first `k` picks (positions into pts).
inline std::vector<std::size_t> farthest_point_sampling(std::span<const Point3> pts, std::size_t k) {
  std::vector<std::size_t> out;
  const std::size_t n = pts.size();
  if (n == 0 || k == 0) return out;
  k = std::min(k, n);
  std::vector<double> d(n, HUGE_VAL);
  std::size_t cur = 0;
  for (std::size_t it = 0; it < k; ++it) {
    out.push_back(cur);
    std::size_t far = 0;
    double fd = -1;
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = std::min(d[i], distance2(pts[i], pts[cur]));
      if (d[i] > fd) {
        fd = d[i];
        far = i;
      }
    }
    cur = far;
  }
  return out;
}

/// Per-plane FPS with quotas proportional to the plane's share of O_s
/// (minimum 3 per plane). A point counts for its first plane.
inline FpsResult proportional_fps(const StructuredCloud& s, int k_total) {
  FpsResult r;
  if (s.points.empty()) return r;
  if (k_total < 1) throw Error("k_total must be positive", "convex_clustering");
  int planes = 0;
  for (const auto& p : s.points) planes = std::max(planes, p.planes.empty() ? 0 : p.planes.front() + 1);
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(planes));
  for (std::size_t i = 0; i < s.points.size(); ++i)
    if (!s.points[i].planes.empty()) members[static_cast<std::size_t>(s.points[i].planes.front())].push_back(i);
  const double total = static_cast<double>(s.points.size());
  for (int p = 0; p < planes; ++p) {
    const auto& m = members[static_cast<std::size_t>(p)];
    if (m.empty()) continue;
    if (m.size() < 3) r.below_minimum.push_back(p);
    const auto quota = static_cast<std::size_t>(
        std::max(3.0, std::round(static_cast<double>(k_total) * static_cast<double>(m.size()) / total)));
    std::vector<Point3> pts;
    pts.reserve(m.size());
    for (auto i : m) pts.push_back(s.points[i].position);
    for (auto j : farthest_point_sampling(pts, quota)) r.indices.push_back(m[j]);
  }
  return r;
}

// --------------------------------------------------------------- visibility

/// Alpha-shape patch per plane over every O_s point that belongs to it.
inline std::vector<TrianglePatch> build_patches(const StructuredCloud& s, const std::vector<Plane>& planes, double alpha) {
  std::vector<std::vector<Point3>> pts(planes.size());
  for (const auto& p : s.points)
    for (int id : p.planes) pts[static_cast<std::size_t>(id)].push_back(p.position);
  std::vector<TrianglePatch> out;
  for (std::size_t i = 0; i < planes.size(); ++i)
    if (pts[i].size() >= 3) out.push_back(triangulate_patch(planes[i], pts[i], alpha, static_cast<int>(i)));
  return out;
}

/// Each endpoint must lie no more than `slack` outside the other's tangent
/// plane, so the segment leaves both points into the interior.
inline bool faces_inward(const Point3& a, const Vec3& na, const Point3& b, const Vec3& nb, double slack) {
  return dot(b - a, na) <= slack && dot(a - b, nb) <= slack;
}

/// Line of sight through the interior between two oriented surface samples.
inline bool mutually_visible(const StructuredPoint& a, const StructuredPoint& b, const SurfaceModel& surface) {
  return faces_inward(a.position, a.normal, b.position, b.normal, surface.guard()) &&
         !surface.segment_blocked(a.position, b.position);
}

/// Affinity over the samples; with outward normals given, pairs must also
/// face each other through the interior.
inline VisibilityGraph build_visibility_graph(std::vector<Point3> samples, const SurfaceModel& surface, int threads = 1,
                                              std::span<const Vec3> normals = {}) {
  VisibilityGraph g;
  g.samples = std::move(samples);
  const std::size_t n = g.samples.size();
  if (!normals.empty() && normals.size() != n) throw Error("one normal per visibility sample required", "convex_clustering");
  g.affinity.assign(n * n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!normals.empty() && !faces_inward(g.samples[i], normals[i], g.samples[j], normals[j], surface.guard())) continue;
      if (!surface.segment_blocked(g.samples[i], g.samples[j])) g.affinity[i * n + j] = 1;
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g.affinity[j * n + i] = g.affinity[i * n + j];
  return g;
}

// -------------------------------------------------------------------- WCSEG

namespace detail {

inline std::vector<std::vector<std::size_t>> knn_lists(std::span<const Point3> pts, int k) {
  const KdTree3 tree = make_tree(pts);
  std::vector<std::vector<std::size_t>> nb(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (const auto& h : tree.knn(to_array(pts[i]), static_cast<std::size_t>(k) + 1))
      if (h.index != i) nb[i].push_back(h.index);
  return nb;
}

inline std::vector<int> membership(const std::vector<std::vector<std::size_t>>& groups, std::size_t n) {
  std::vector<int> owner(n, -1);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (auto i : groups[g]) owner[i] = static_cast<int>(g);
  return owner;
}

/// Sorted unique pairs (a < b) of groups joined by a k-NN edge.
inline std::set<std::pair<int, int>> group_adjacency(const std::vector<int>& owner, const std::vector<std::vector<std::size_t>>& nb) {
  std::set<std::pair<int, int>> adj;
  for (std::size_t i = 0; i < nb.size(); ++i)
    for (auto j : nb[i]) {
      const int a = owner[i], b = owner[j];
      if (a >= 0 && b >= 0 && a != b) adj.insert({std::min(a, b), std::max(a, b)});
    }
  return adj;
}

/// Fraction of sampled cross pairs (a in first, b in second) that see each
/// other. All pairs are used when there are at most `cap` of them.
inline double visible_fraction(std::span<const std::size_t> first, std::span<const std::size_t> second, const StructuredCloud& s,
                               const SurfaceModel& surface, int cap, Rng& rng) {
  if (first.empty() || second.empty()) return 0;
  const std::size_t total = first.size() * second.size();
  std::size_t seen = 0, tried = 0;
  if (total <= static_cast<std::size_t>(cap)) {
    for (auto a : first)
      for (auto b : second) {
        ++tried;
        seen += mutually_visible(s.points[a], s.points[b], surface);
      }
  } else {
    for (int t = 0; t < cap; ++t) {
      const auto a = first[rng.index(first.size())], b = second[rng.index(second.size())];
      ++tried;
      seen += mutually_visible(s.points[a], s.points[b], surface);
    }
  }
  return static_cast<double>(seen) / static_cast<double>(tried);
}

}  // namespace detail

/// Region growing over the k-NN graph of the planar points: a point joins the
/// region when its normal is within wcseg_angle of the region's mean normal
/// (and, with a positive patch radius, lies within that radius of the seed).
/// Crease and corner points then join the patch of their nearest planar point.
inline std::vector<std::vector<std::size_t>> wcseg_oversegment(const StructuredCloud& s, const ClusteringConfig& cfg) {
  const std::size_t n = s.points.size();
  std::vector<std::vector<std::size_t>> patches;
  if (n == 0) return patches;
  const auto pos = s.positions();
  std::vector<std::size_t> flat;
  std::vector<Point3> flat_pos;
  for (std::size_t i = 0; i < n; ++i)
    if (s.points[i].label == PointLabel::planar) {
      flat.push_back(i);
      flat_pos.push_back(pos[i]);
    }
  const auto nb = flat.empty() ? std::vector<std::vector<std::size_t>>{} : detail::knn_lists(flat_pos, cfg.wcseg_knn);
  const double cos_max = std::cos(deg2rad(cfg.wcseg_angle));
  const double radius = cfg.wcseg_patch_radius > 0 ? cfg.wcseg_patch_radius * s.eps : HUGE_VAL;
  std::vector<int> owner(n, -1);
  std::vector<std::size_t> queue;
  for (std::size_t seed = 0; seed < flat.size(); ++seed) {
    if (owner[flat[seed]] >= 0) continue;
    const int id = static_cast<int>(patches.size());
    patches.emplace_back();
    Vec3 sum = s.points[flat[seed]].normal;
    owner[flat[seed]] = id;
    queue.assign(1, seed);
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const std::size_t i = queue[q];
      patches.back().push_back(flat[i]);
      for (auto j : nb[i]) {
        if (owner[flat[j]] >= 0) continue;
        if (dot(normalize(sum), s.points[flat[j]].normal) < cos_max) continue;
        if (distance(flat_pos[j], flat_pos[seed]) > radius) continue;
        owner[flat[j]] = id;
        sum += s.points[flat[j]].normal;
        queue.push_back(j);
      }
    }
  }
  std::vector<std::size_t> planar;
  for (std::size_t i = 0; i < n; ++i)
    if (owner[i] >= 0) planar.push_back(i);
  if (planar.empty()) {
    patches.emplace_back(n);
    std::iota(patches.back().begin(), patches.back().end(), std::size_t{0});
    return patches;
  }
  std::vector<Point3> ppos;
  for (auto i : planar) ppos.push_back(pos[i]);
  const KdTree3 tree = make_tree(ppos);
  for (std::size_t i = 0; i < n; ++i) {
    if (owner[i] >= 0) continue;
    const auto h = tree.nearest(to_array(pos[i]));
    patches[static_cast<std::size_t>(owner[planar[h.index]])].push_back(i);
  }
  for (auto& p : patches) std::sort(p.begin(), p.end());
  return patches;
}

/// Agglomerative merge over patch adjacency: repeatedly joins the adjacent
/// pair of groups with the highest sampled mutual-visibility fraction, while
/// that fraction reaches the threshold (ties to the lowest index pair).
/// Groups below the minimum region size then join their most visible
/// neighbour, and single patches move to the adjacent group they see best
/// until no patch moves.
inline std::vector<std::vector<std::size_t>> wcseg_merge_visible(const std::vector<std::vector<std::size_t>>& patches,
                                                                 const SurfaceModel& surface, const StructuredCloud& s,
                                                                 const ClusteringConfig& cfg, std::uint64_t seed) {
  if (patches.size() <= 1) return patches;
  Rng rng(seed);
  const std::size_t np = patches.size();
  const auto nb = detail::knn_lists(s.positions(), cfg.wcseg_knn);
  std::vector<std::set<int>> patch_adj(np);
  for (auto [a, b] : detail::group_adjacency(detail::membership(patches, s.points.size()), nb)) {
    patch_adj[static_cast<std::size_t>(a)].insert(b);
    patch_adj[static_cast<std::size_t>(b)].insert(a);
  }
  std::vector<int> group(np);
  std::iota(group.begin(), group.end(), 0);
  auto points_of = [&](int g, int skip = -1) {
    std::vector<std::size_t> pts;
    for (std::size_t p = 0; p < np; ++p)
      if (group[p] == g && static_cast<int>(p) != skip) pts.insert(pts.end(), patches[p].begin(), patches[p].end());
    return pts;
  };
  auto group_adj = [&](int g) {
    std::set<int> out;
    for (std::size_t p = 0; p < np; ++p)
      if (group[p] == g)
        for (int q : patch_adj[p])
          if (group[static_cast<std::size_t>(q)] != g) out.insert(group[static_cast<std::size_t>(q)]);
    return out;
  };
  auto fraction = [&](const std::vector<std::size_t>& x, const std::vector<std::size_t>& y) {
    return detail::visible_fraction(x, y, s, surface, cfg.visibility_pairs, rng);
  };
  auto join = [&](int into, int from) {
    for (auto& g : group)
      if (g == from) g = into;
  };

  // Agglomeration on group-level scores, recomputed for the merged group.
  std::vector<std::vector<std::size_t>> members(patches);
  std::map<std::pair<int, int>, double> score;
  for (std::size_t a = 0; a < np; ++a)
    for (int b : patch_adj[a])
      if (static_cast<int>(a) < b) score[{static_cast<int>(a), b}] = fraction(members[a], members[static_cast<std::size_t>(b)]);
  while (!score.empty()) {
    auto best = score.begin();
    for (auto it = score.begin(); it != score.end(); ++it)
      if (it->second > best->second) best = it;
    if (best->second < cfg.visibility_threshold) break;
    const auto [a, b] = best->first;
    join(a, b);
    auto& ma = members[static_cast<std::size_t>(a)];
    ma.insert(ma.end(), members[static_cast<std::size_t>(b)].begin(), members[static_cast<std::size_t>(b)].end());
    members[static_cast<std::size_t>(b)].clear();
    std::erase_if(score, [&](const auto& e) { return e.first.first == a || e.first.second == a || e.first.first == b || e.first.second == b; });
    for (int c : group_adj(a)) score[std::minmax(a, c)] = fraction(ma, members[static_cast<std::size_t>(c)]);
  }

  // Undersized groups join the neighbour they see best.
  const auto min_size = static_cast<std::size_t>(std::ceil(cfg.wcseg_min_region * static_cast<double>(s.points.size())));
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t g = 0; g < np && !changed; ++g) {
      const auto& mg = members[g];
      if (mg.empty() || mg.size() >= min_size) continue;
      int target = -1;
      double bf = -1;
      for (int c : group_adj(static_cast<int>(g))) {
        const double f = fraction(mg, members[static_cast<std::size_t>(c)]);
        if (f > bf) {
          bf = f;
          target = c;
        }
      }
      if (target < 0) continue;
      join(target, static_cast<int>(g));
      auto& mt = members[static_cast<std::size_t>(target)];
      mt.insert(mt.end(), mg.begin(), mg.end());
      members[g].clear();
      changed = true;
    }
  }

  // Boundary refinement.
  for (int round = 0; round < cfg.wcseg_refine_rounds; ++round) {
    bool moved = false;
    for (std::size_t p = 0; p < np; ++p) {
      const int own = group[p];
      const auto rest = points_of(own, static_cast<int>(p));
      if (rest.empty()) continue;
      double best = fraction(patches[p], rest);
      int target = own;
      std::set<int> around;
      for (int q : patch_adj[p]) around.insert(group[static_cast<std::size_t>(q)]);
      for (int c : around) {
        if (c == own) continue;
        const double f = fraction(patches[p], points_of(c));
        if (f > best) {
          best = f;
          target = c;
        }
      }
      if (target == own) continue;
      group[p] = target;
      moved = true;
    }
    if (!moved) break;
  }

  std::vector<std::vector<std::size_t>> regions;
  for (std::size_t g = 0; g < np; ++g) {
    auto pts = points_of(static_cast<int>(g));
    if (pts.empty()) continue;
    std::sort(pts.begin(), pts.end());
    regions.push_back(std::move(pts));
  }
  return regions;
}

/// Unit directions of a cone of half-angle `half` (radians) around `axis`,
/// laid out on a golden-angle spiral; the first ray is the axis itself.
inline std::vector<Vec3> cone_directions(const Vec3& axis, double half, int count) {
  std::vector<Vec3> dirs;
  const Vec3 a = normalize(axis);
  auto [u, v] = plane_basis(a);
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double cz = 1.0 - (1.0 - std::cos(half)) * static_cast<double>(i) / std::max(1, count - 1);
    const double sz = std::sqrt(std::max(0.0, 1.0 - cz * cz));
    const double phi = golden * i;
    dirs.push_back(normalize(a * cz + u * (sz * std::cos(phi)) + v * (sz * std::sin(phi))));
  }
  return dirs;
}

/// Shape diameter at a point: median hit distance of the inward cone rays, or
/// a negative value when no ray hits.
inline double shape_diameter(const StructuredPoint& p, const SurfaceModel& surface, const ClusteringConfig& cfg) {
  std::vector<double> hits;
  for (const auto& d : cone_directions(-p.normal, 0.5 * deg2rad(cfg.sdf_cone_angle), cfg.sdf_rays))
    if (auto t = surface.first_hit(p.position, d, surface.guard())) hits.push_back(*t);
  if (hits.empty()) return -1;
  std::sort(hits.begin(), hits.end());
  const std::size_t m = hits.size();
  return m % 2 ? hits[m / 2] : 0.5 * (hits[m / 2 - 1] + hits[m / 2]);
}

inline double median_of(std::vector<double> v) {
  if (v.empty()) return -1;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

/// Merges adjacent clusters whose shape-diameter medians differ by at most
/// `threshold` relative to the larger one and which see each other.
inline std::vector<std::vector<std::size_t>> wcseg_volumetric_merge(std::vector<std::vector<std::size_t>> clusters,
                                                                    const StructuredCloud& s, const SurfaceModel& surface,
                                                                    const ClusteringConfig& cfg, std::uint64_t seed,
                                                                    int threads = 1) {
  if (clusters.size() <= 1) return clusters;
  std::vector<double> sdf(s.points.size());
  parallel_for(s.points.size(), threads, [&](std::size_t i) { sdf[i] = shape_diameter(s.points[i], surface, cfg); });
  auto cluster_median = [&](const std::vector<std::size_t>& c) {
    std::vector<double> v;
    for (auto i : c)
      if (sdf[i] >= 0) v.push_back(sdf[i]);
    return median_of(std::move(v));
  };
  Rng rng(seed);
  const auto nb = detail::knn_lists(s.positions(), cfg.wcseg_knn);
  bool merged = true;
  while (merged && clusters.size() > 1) {
    merged = false;
    const auto owner = detail::membership(clusters, s.points.size());
    for (auto [a, b] : detail::group_adjacency(owner, nb)) {
      const auto& ca = clusters[static_cast<std::size_t>(a)];
      const auto& cb = clusters[static_cast<std::size_t>(b)];
      const double ma = cluster_median(ca), mb = cluster_median(cb);
      if (ma < 0 || mb < 0) continue;
      const double rel = std::abs(ma - mb) / std::max({ma, mb, 1e-300});
      if (rel > cfg.sdf_merge_threshold) continue;
      if (detail::visible_fraction(ca, cb, s, surface, cfg.visibility_pairs, rng) < cfg.visibility_threshold) continue;
      auto& dst = clusters[static_cast<std::size_t>(a)];
      dst.insert(dst.end(), cb.begin(), cb.end());
      std::sort(dst.begin(), dst.end());
      clusters.erase(clusters.begin() + b);
      merged = true;
      break;
    }
  }
  return clusters;
}

// --------------------------------------------------------------- assignment

/// Every O_s point joins the cluster of its nearest clustered point; exact
/// distance ties go to the lowest cluster index. Empty clusters are dropped.
inline std::vector<ConvexCluster> assign_structured_points(const std::vector<std::vector<std::size_t>>& clusters,
                                                           const StructuredCloud& s) {
  std::vector<Point3> pts;
  std::vector<int> label;
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (auto i : clusters[c]) {
      pts.push_back(s.points[i].position);
      label.push_back(static_cast<int>(c));
    }
  if (pts.empty()) throw Error("no clustered points to assign from", "convex_clustering");
  const KdTree3 tree = make_tree(pts);
  std::vector<ConvexCluster> out(clusters.size());
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const auto q = to_array(s.points[i].position);
    const auto h = tree.nearest(q);
    int best = label[h.index];
    for (const auto& t : tree.radius(q, std::sqrt(h.dist2)))
      if (t.dist2 == h.dist2) best = std::min(best, label[t.index]);
    out[static_cast<std::size_t>(best)].points.push_back(i);
  }
  std::vector<ConvexCluster> kept;
  for (auto& c : out) {
    if (c.points.empty()) continue;
    std::set<int> planes;
    for (auto i : c.points)
      for (int p : s.points[i].planes) planes.insert(p);
    c.planes.assign(planes.begin(), planes.end());
    kept.push_back(std::move(c));
  }
  return kept;
}

// ------------------------------------------------------------------ drivers

struct ClusteringResult {
  ClusteringMethod method = ClusteringMethod::los;
  std::vector<ConvexCluster> clusters;
  std::vector<std::size_t> samples;                 // LoS: O_sr indices
  std::vector<std::pair<int, double>> quality;      // LoS: (k, Q)
  std::size_t patch_count = 0;                      // WCSEG: over-segmentation size
  std::size_t visible_clusters = 0;                 // WCSEG: after visibility merge
  std::vector<std::string> warnings;
};

inline SurfaceModel build_surface(const StructuredCloud& s, const std::vector<Plane>& planes, const ClusteringConfig& cfg) {
  return SurfaceModel(build_patches(s, planes, cfg.alpha_radius * s.eps), cfg.guard * s.eps);
}

inline ClusteringResult cluster_los(const StructuredCloud& s, const SurfaceModel& surface, const ClusteringConfig& cfg,
                                    std::uint64_t seed, int threads = 1) {
  ClusteringResult r;
  r.method = ClusteringMethod::los;
  const int k_total = std::min<int>(cfg.k_total, static_cast<int>(s.points.size()));
  auto fps = proportional_fps(s, std::max(1, k_total));
  for (int p : fps.below_minimum) r.warnings.push_back("plane " + std::to_string(p) + " has fewer than 3 structured points");
  r.samples = fps.indices;
  std::vector<Point3> pts;
  std::vector<Vec3> normals;
  for (auto i : r.samples) {
    pts.push_back(s.points[i].position);
    normals.push_back(s.points[i].normal);
  }
  const auto graph = build_visibility_graph(pts, surface, threads, normals);
  const auto est = estimate_cluster_count(graph, cfg.k_min, cfg.k_max, cfg.alpha_q, cfg.laplacian, seed);
  r.quality = est.scores;
  std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(est.k));
  for (std::size_t i = 0; i < r.samples.size(); ++i) groups[static_cast<std::size_t>(est.labels[i])].push_back(r.samples[i]);
  r.clusters = assign_structured_points(groups, s);
  return r;
}

inline ClusteringResult cluster_wcseg(const StructuredCloud& s, const SurfaceModel& surface, const ClusteringConfig& cfg,
                                      std::uint64_t seed, int threads = 1) {
  ClusteringResult r;
  r.method = ClusteringMethod::wcseg;
  const auto patches = wcseg_oversegment(s, cfg);
  r.patch_count = patches.size();
  auto merged = wcseg_merge_visible(patches, surface, s, cfg, Rng::derive_seed(seed, 1));
  r.visible_clusters = merged.size();
  merged = wcseg_volumetric_merge(std::move(merged), s, surface, cfg, Rng::derive_seed(seed, 2), threads);
  r.clusters = assign_structured_points(merged, s);
  return r;
}

}  // namespace polyrecon
