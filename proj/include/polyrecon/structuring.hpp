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
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "geometry.hpp"
#include "kdtree.hpp"
#include "parallel.hpp"
#include "plane_extraction.hpp"

namespace polyrecon {

enum class PointLabel { planar, crease, corner };

struct StructuredPoint {
  Point3 position;
  Vec3 normal;
  PointLabel label = PointLabel::planar;
  std::vector<int> planes;  // 1 for planar, 2 for crease, >= 3 for corner
};

/// Denoised, resampled cloud O_s.
struct StructuredCloud {
  std::vector<StructuredPoint> points;
  double eps = 0;

  std::size_t size() const { return points.size(); }
  std::vector<Point3> positions() const {
    std::vector<Point3> p;
    p.reserve(points.size());
    for (const auto& s : points) p.push_back(s.position);
    return p;
  }
};

/// Undirected plane adjacency graph G_N.
struct NeighborhoodGraph {
  std::size_t plane_count = 0;
  std::vector<std::pair<int, int>> edges;  // i < j, sorted

  bool has_edge(int a, int b) const {
    if (a > b) std::swap(a, b);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(a, b));
  }
  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(plane_count);
    for (auto [a, b] : edges) {
      adj[static_cast<std::size_t>(a)].push_back(b);
      adj[static_cast<std::size_t>(b)].push_back(a);
    }
    for (auto& l : adj) std::sort(l.begin(), l.end());
    return adj;
  }
};

/// Projects the plane's inliers onto an occupancy grid of cell size sqrt(2)*eps
/// and returns the occupied cell centers (on the plane), ordered by cell.
/// The grid frame is plane_basis(normal) anchored at the projected inlier centroid.
inline std::vector<Point3> project_occupancy(const Plane& plane, const OrientedCloud& cloud, double eps) {
  std::vector<Point3> out;
  if (plane.inliers.empty() || !(eps > 0)) return out;
  const double cs = std::sqrt(2.0) * eps;
  const Vec3 n = normalize(plane.normal);
  auto [u, v] = plane_basis(n);
  Vec3 c{};
  for (auto i : plane.inliers) c += cloud.positions[i];
  c = c / static_cast<double>(plane.inliers.size());
  const Point3 anchor = c - n * dot(n, c - plane.origin);
  std::vector<std::pair<double, double>> uv;
  uv.reserve(plane.inliers.size());
  double umin = HUGE_VAL, vmin = HUGE_VAL;
  for (auto i : plane.inliers) {
    const Vec3 r = cloud.positions[i] - anchor;
    uv.emplace_back(dot(r, u), dot(r, v));
    umin = std::min(umin, uv.back().first);
    vmin = std::min(vmin, uv.back().second);
  }
  std::set<std::pair<long, long>> cells;
  for (auto [a, b] : uv)
    cells.insert({static_cast<long>(std::floor((a - umin) / cs)), static_cast<long>(std::floor((b - vmin) / cs))});
  out.reserve(cells.size());
  for (auto [a, b] : cells)
    out.push_back(anchor + u * (umin + (static_cast<double>(a) + 0.5) * cs) + v * (vmin + (static_cast<double>(b) + 0.5) * cs));
  return out;
}

/// Planes i and j are adjacent when at least two points of each take part in
/// k-NN edges of the raw cloud that join plane i to plane j.
inline NeighborhoodGraph build_neighborhood_graph(const std::vector<Plane>& planes, const OrientedCloud& cloud, int k) {
  if (k < 1) throw Error("k-NN graph needs k >= 1");
  NeighborhoodGraph g;
  g.plane_count = planes.size();
  std::vector<int> owner(cloud.size(), -1);
  for (std::size_t p = 0; p < planes.size(); ++p)
    for (auto i : planes[p].inliers) owner[i] = static_cast<int>(p);
  const KdTree3 tree = make_tree(cloud.positions);
  // participants[(a, b)] = (points of a, points of b) touching a cross edge.
  std::map<std::pair<int, int>, std::pair<std::set<std::size_t>, std::set<std::size_t>>> part;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (owner[i] < 0) continue;
    for (const auto& h : tree.knn(to_array(cloud.positions[i]), static_cast<std::size_t>(k) + 1)) {
      const std::size_t j = h.index;
      if (j == i || owner[j] < 0 || owner[j] == owner[i]) continue;
      const int a = std::min(owner[i], owner[j]), b = std::max(owner[i], owner[j]);
      auto& e = part[{a, b}];
      const std::size_t pa = owner[i] == a ? i : j, pb = owner[i] == a ? j : i;
      e.first.insert(pa);
      e.second.insert(pb);
    }
  }
  for (const auto& [key, sets] : part)
    if (sets.first.size() >= 2 && sets.second.size() >= 2) g.edges.push_back(key);
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

struct FeatureOptions {
  double parallel_angle = 1.0;      // degrees; crease skipped below this
  double max_condition = 1e4;       // corner solve rejected above this
  double corner_reach = 2.0;        // corner proximity gate, in units of the crease gate
};

/// Builds O_s: the planar occupancy points, crease samples every 2*eps along
/// each graph edge (kept where both planes have an occupied cell within
/// 2*sqrt(2)*eps), and corners for graph triangles with a well-conditioned
/// three-plane intersection near all three planes' samples.
inline StructuredCloud extract_features(const std::vector<Plane>& planes, const NeighborhoodGraph& graph,
                                        const std::vector<std::vector<Point3>>& occupied, double eps,
                                        std::vector<std::string>* warnings = nullptr, FeatureOptions opt = {}) {
  StructuredCloud out;
  out.eps = eps;
  for (std::size_t p = 0; p < planes.size(); ++p)
    for (const auto& x : occupied[p]) out.points.push_back({x, normalize(planes[p].normal), PointLabel::planar, {static_cast<int>(p)}});

  std::vector<KdTree3> trees;
  trees.reserve(planes.size());
  for (const auto& occ : occupied) trees.push_back(make_tree(occ));
  const double keep = 2.0 * std::sqrt(2.0) * eps;
  auto near_plane = [&](int p, const Point3& x, double reach = 1.0) {
    const auto h = trees[static_cast<std::size_t>(p)].nearest(to_array(x));
    return h.index != SIZE_MAX && h.dist2 <= reach * reach * keep * keep;
  };

  for (auto [i, j] : graph.edges) {
    const Plane &a = planes[static_cast<std::size_t>(i)], &b = planes[static_cast<std::size_t>(j)];
    const double ang = angle_deg(a.normal, b.normal);
    if (ang < opt.parallel_angle || ang > 180.0 - opt.parallel_angle) {
      if (warnings) warnings->push_back("near-parallel planes " + std::to_string(i) + " and " + std::to_string(j) + ": crease skipped");
      continue;
    }
    const Vec3 d = normalize(cross(a.normal, b.normal));
    const auto& oa = occupied[static_cast<std::size_t>(i)];
    const auto& ob = occupied[static_cast<std::size_t>(j)];
    if (oa.empty() || ob.empty()) continue;
    const Point3 mid = (centroid(oa) + centroid(ob)) * 0.5;
    auto foot = intersect_three(a.normal, a.offset(), b.normal, b.offset(), d, dot(d, mid));
    if (!foot) continue;
    double tmin = HUGE_VAL, tmax = -HUGE_VAL;
    for (const auto* occ : {&oa, &ob})
      for (const auto& x : *occ) {
        const double t = dot(x - *foot, d);
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
      }
    const double step = 2.0 * eps;
    const auto count = static_cast<long>(std::floor((tmax - tmin) / step));
    for (long m = 0; m <= count; ++m) {
      const Point3 x = *foot + d * (tmin + static_cast<double>(m) * step);
      if (near_plane(i, x) && near_plane(j, x)) {
        out.points.push_back({x, normalize(a.normal + b.normal), PointLabel::crease, {i, j}});
      }
    }
  }

  const auto adj = graph.adjacency();
  std::vector<StructuredPoint> corners;
  for (auto [i, j] : graph.edges)
    for (int k : adj[static_cast<std::size_t>(j)]) {
      if (k <= j || !graph.has_edge(i, k)) continue;
      const Plane &a = planes[static_cast<std::size_t>(i)], &b = planes[static_cast<std::size_t>(j)],
                  &c = planes[static_cast<std::size_t>(k)];
      Eigen::Matrix3d m;
      m << a.normal.x, a.normal.y, a.normal.z, b.normal.x, b.normal.y, b.normal.z, c.normal.x, c.normal.y, c.normal.z;
      Eigen::JacobiSVD<Eigen::Matrix3d> svd(m);
      const auto sv = svd.singularValues();
      if (sv(2) <= 0 || sv(0) / sv(2) > opt.max_condition) continue;
      auto x = intersect_three(a, b, c);
      const double r = opt.corner_reach;
      if (!x || !near_plane(i, *x, r) || !near_plane(j, *x, r) || !near_plane(k, *x, r)) continue;
      bool merged = false;
      for (auto& q : corners)
        if (distance(q.position, *x) <= eps) {
          for (int p : {i, j, k})
            if (std::find(q.planes.begin(), q.planes.end(), p) == q.planes.end()) q.planes.push_back(p);
          merged = true;
          break;
        }
      if (!merged) corners.push_back({*x, {}, PointLabel::corner, {i, j, k}});
    }
  for (auto& q : corners) {
    Vec3 n{};
    std::sort(q.planes.begin(), q.planes.end());
    for (int p : q.planes) n += planes[static_cast<std::size_t>(p)].normal;
    q.normal = normalize(n);
    out.points.push_back(std::move(q));
  }
  return out;
}

struct StructuringResult {
  StructuredCloud cloud;
  NeighborhoodGraph graph;
  std::vector<std::vector<Point3>> occupied;
  std::vector<std::string> warnings;
};

/// Full structuring step: per-plane occupancy, neighbourhood graph, features.
inline StructuringResult structure_cloud(const std::vector<Plane>& planes, const OrientedCloud& cloud, double eps, int k,
                                         int threads = 1) {
  StructuringResult r;
  r.occupied.resize(planes.size());
  parallel_for(planes.size(), threads, [&](std::size_t p) { r.occupied[p] = project_occupancy(planes[p], cloud, eps); });
  r.graph = build_neighborhood_graph(planes, cloud, k);
  r.cloud = extract_features(planes, r.graph, r.occupied, eps, &r.warnings);
  return r;
}

}  // namespace polyrecon
