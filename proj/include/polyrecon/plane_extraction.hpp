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
#include <iterator>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "geometry.hpp"
#include "kdtree.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace polyrecon {

/// Input point cloud: positions with unit normals of the same length.
struct OrientedCloud {
  std::vector<Point3> positions;
  std::vector<Vec3> normals;

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
  Aabb bounds() const { return bounds_of(positions); }
};

/// Plane detection parameters. Zero or negative values for the length
/// parameters mean "derive from the bounding-box diagonal" (see resolved()).
struct ExtractionConfig {
  double eps_fit = 0;           // RANSAC inlier distance; auto: 0.01 * diagonal
  double theta_fit = 20;        // degrees, max normal deviation for inliers
  double dbscan_radius = 0;     // auto: 0.03 * diagonal
  int dbscan_min_pts = 6;
  double feature_normal_weight = 0;  // auto: 0.5 * radius / sin(theta_fit)
  int min_inliers = 50;
  double merge_angle = 5;       // degrees
  double merge_offset = 0;      // auto: 2 * eps_fit
  int max_iterations = 10000;
  double success_probability = 0.999;

  ExtractionConfig resolved(double diagonal) const {
    ExtractionConfig c = *this;
    if (c.eps_fit <= 0) c.eps_fit = 0.01 * diagonal;
    if (c.dbscan_radius <= 0) c.dbscan_radius = 0.03 * diagonal;
    if (c.feature_normal_weight <= 0) c.feature_normal_weight = 0.5 * c.dbscan_radius / std::sin(deg2rad(c.theta_fit));
    if (c.merge_offset <= 0) c.merge_offset = 2.0 * c.eps_fit;
    return c;
  }

  void validate() const {
    if (!(theta_fit > 0 && theta_fit < 90)) throw Error("extraction: theta_fit must lie in (0, 90)");
    if (!(merge_angle > 0 && merge_angle < 45)) throw Error("extraction: merge_angle must lie in (0, 45)");
    if (dbscan_min_pts < 1 || min_inliers < 3) throw Error("extraction: min_pts >= 1 and min_inliers >= 3 required");
  }
};

struct DbscanResult {
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> noise;
};

/// DBSCAN over the 6-D features (position, w * normal). A point is core when
/// its radius neighbourhood (itself included) holds at least min_pts points.
/// Clusters are numbered in order of their lowest core point.
inline DbscanResult dbscan_cluster(const OrientedCloud& cloud, const ExtractionConfig& cfg_in) {
  DbscanResult res;
  if (cloud.empty()) return res;
  const ExtractionConfig cfg = cfg_in.resolved(cloud.bounds().diagonal());
  const double w = cfg.feature_normal_weight;
  std::vector<KdTree<6>::Point> feats(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.positions[i];
    const auto& n = cloud.normals[i];
    feats[i] = {p.x, p.y, p.z, w * n.x, w * n.y, w * n.z};
  }
  const KdTree<6> tree(feats);
  constexpr int kUnvisited = -2, kNoise = -1;
  std::vector<int> label(cloud.size(), kUnvisited);
  std::vector<std::size_t> queue;
  int next = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (label[i] != kUnvisited) continue;
    auto nb = tree.radius(feats[i], cfg.dbscan_radius);
    if (static_cast<int>(nb.size()) < cfg.dbscan_min_pts) {
      label[i] = kNoise;
      continue;
    }
    const int c = next++;
    label[i] = c;
    queue.clear();
    for (const auto& h : nb) queue.push_back(h.index);
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const std::size_t j = queue[q];
      if (label[j] == kNoise) label[j] = c;  // border point
      if (label[j] != kUnvisited) continue;
      label[j] = c;
      auto nb2 = tree.radius(feats[j], cfg.dbscan_radius);
      if (static_cast<int>(nb2.size()) >= cfg.dbscan_min_pts)
        for (const auto& h : nb2) queue.push_back(h.index);
    }
  }
  res.clusters.resize(static_cast<std::size_t>(next));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (label[i] >= 0)
      res.clusters[static_cast<std::size_t>(label[i])].push_back(i);
    else
      res.noise.push_back(i);
  }
  return res;
}

/// Least-squares plane through the selected points: centroid and the
/// eigenvector of the smallest covariance eigenvalue.
inline std::pair<Point3, Vec3> fit_plane_least_squares(std::span<const Point3> positions, std::span<const std::size_t> idx) {
  Vec3 c{};
  for (auto i : idx) c += positions[i];
  c = c / static_cast<double>(idx.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (auto i : idx) {
    const Vec3 d = positions[i] - c;
    const Eigen::Vector3d e(d.x, d.y, d.z);
    cov += e * e.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  const Eigen::Vector3d n = es.eigenvectors().col(0);
  return {c, normalize(Vec3{n.x(), n.y(), n.z()})};
}

namespace detail {

inline bool plane_inlier(const OrientedCloud& cloud, std::size_t i, const Point3& o, const Vec3& n, double eps, double cos_theta) {
  return std::abs(dot(n, cloud.positions[i] - o)) <= eps && std::abs(dot(n, cloud.normals[i])) >= cos_theta;
}

/// Orients the normal along the mean inlier normal and sets the inlier list.
inline Plane finish_plane(const OrientedCloud& cloud, Point3 origin, Vec3 normal, std::vector<std::size_t> inliers) {
  Vec3 mean{};
  for (auto i : inliers) mean += cloud.normals[i];
  if (dot(mean, normal) < 0) normal = -normal;
  std::sort(inliers.begin(), inliers.end());
  return Plane{origin, normal, std::move(inliers)};
}

}  // namespace detail

/// RANSAC plane fit on `points` with adaptive iteration count, followed by a
/// least-squares refit over the best consensus set. Inliers must lie within
/// eps_fit and have a normal within theta_fit of the plane normal (either
/// sign). Returns nothing when fewer than min_inliers points support the best
/// plane. Deterministic in rng_seed.
inline std::optional<Plane> ransac_fit_plane(std::span<const std::size_t> points, const OrientedCloud& cloud,
                                             const ExtractionConfig& cfg_in, Rng& rng) {
  const std::size_t n = points.size();
  if (n < 3) return std::nullopt;
  const ExtractionConfig cfg = cfg_in.resolved(cloud.bounds().diagonal());
  const double cos_t = std::cos(deg2rad(cfg.theta_fit));
  std::size_t best_count = 0;
  Point3 best_o;
  Vec3 best_n;
  double needed = cfg.max_iterations;
  double scale2 = 0;
  {
    Aabb b;
    for (auto i : points) b.extend(cloud.positions[i]);
    scale2 = std::max(b.diagonal() * b.diagonal(), 1e-300);
  }
  for (int it = 0; it < cfg.max_iterations && it < needed; ++it) {
    std::size_t a = rng.index(n), b = rng.index(n), c = rng.index(n);
    if (a == b || b == c || a == c) continue;
    const Point3 &pa = cloud.positions[points[a]], &pb = cloud.positions[points[b]], &pc = cloud.positions[points[c]];
    const Vec3 cr = cross(pb - pa, pc - pa);
    if (length2(cr) <= 1e-20 * scale2 * scale2) continue;
    const Vec3 nn = normalize(cr);
    std::size_t count = 0;
    for (auto i : points)
      if (detail::plane_inlier(cloud, i, pa, nn, cfg.eps_fit, cos_t)) ++count;
    if (count > best_count) {
      best_count = count;
      best_o = pa;
      best_n = nn;
      const double w = static_cast<double>(count) / static_cast<double>(n);
      const double denom = std::log(1.0 - w * w * w);
      needed = denom < 0 ? std::log(1.0 - cfg.success_probability) / denom : 1.0;
    }
  }
  if (best_count < 3) return std::nullopt;

  std::vector<std::size_t> inl;
  for (auto i : points)
    if (detail::plane_inlier(cloud, i, best_o, best_n, cfg.eps_fit, cos_t)) inl.push_back(i);
  Point3 o = best_o;
  Vec3 nrm = best_n;
  for (int refit = 0; refit < 3 && inl.size() >= 3; ++refit) {
    auto [c, nn] = fit_plane_least_squares(cloud.positions, inl);
    std::vector<std::size_t> next;
    for (auto i : points)
      if (detail::plane_inlier(cloud, i, c, nn, cfg.eps_fit, cos_t)) next.push_back(i);
    o = c;
    nrm = nn;
    const bool same = next == inl;
    inl = std::move(next);
    if (same) break;
  }
  if (static_cast<int>(inl.size()) < cfg.min_inliers || inl.size() < 3) return std::nullopt;
  return detail::finish_plane(cloud, o, nrm, std::move(inl));
}

inline std::optional<Plane> ransac_fit_plane(std::span<const std::size_t> points, const OrientedCloud& cloud,
                                             const ExtractionConfig& cfg, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return ransac_fit_plane(points, cloud, cfg, rng);
}

/// Greedy merge of plane pairs whose normals are within merge_angle and whose
/// origins lie within merge_offset of each other's plane. A merge is only
/// accepted when the least-squares refit keeps every combined inlier within
/// eps_fit. Inlier sets stay disjoint and keep covering the input inliers.
inline std::vector<Plane> merge_coplanar(std::vector<Plane> planes, const OrientedCloud& cloud, const ExtractionConfig& cfg_in) {
  const ExtractionConfig cfg = cfg_in.resolved(cloud.bounds().diagonal());
  std::vector<bool> gone(planes.size(), false);
  for (std::size_t i = 0; i < planes.size(); ++i) {
    if (gone[i]) continue;
    bool merged = true;
    while (merged) {
      merged = false;
      for (std::size_t j = i + 1; j < planes.size(); ++j) {
        if (gone[j]) continue;
        const Plane &a = planes[i], &b = planes[j];
        if (angle_deg(a.normal, b.normal) > cfg.merge_angle) continue;
        if (std::abs(a.signed_distance(b.origin)) > cfg.merge_offset || std::abs(b.signed_distance(a.origin)) > cfg.merge_offset)
          continue;
        std::vector<std::size_t> all = a.inliers;
        all.insert(all.end(), b.inliers.begin(), b.inliers.end());
        auto [c, n] = fit_plane_least_squares(cloud.positions, all);
        bool ok = true;
        for (auto k : all)
          if (std::abs(dot(n, cloud.positions[k] - c)) > cfg.eps_fit) {
            ok = false;
            break;
          }
        if (!ok) continue;
        planes[i] = detail::finish_plane(cloud, c, n, std::move(all));
        gone[j] = true;
        merged = true;
      }
    }
  }
  std::vector<Plane> out;
  for (std::size_t i = 0; i < planes.size(); ++i)
    if (!gone[i]) out.push_back(std::move(planes[i]));
  return out;
}

struct ExtractionResult {
  std::vector<Plane> planes;
  std::vector<std::size_t> residual;
  std::size_t cluster_count = 0;
};

/// DBSCAN pre-clustering, repeated per-cluster RANSAC on each cluster's
/// residual (stream rng_seed + cluster index), then coplanar merging.
inline ExtractionResult extract_planes(const OrientedCloud& cloud, const ExtractionConfig& cfg_in, std::uint64_t rng_seed,
                                       int threads = 1) {
  if (cloud.empty()) throw Error("empty point cloud", "plane_extraction");
  cfg_in.validate();
  const ExtractionConfig cfg = cfg_in.resolved(cloud.bounds().diagonal());
  ExtractionResult res;
  const DbscanResult db = dbscan_cluster(cloud, cfg);
  res.cluster_count = db.clusters.size();

  std::vector<std::vector<Plane>> per_cluster(db.clusters.size());
  parallel_for(db.clusters.size(), threads, [&](std::size_t c) {
    Rng rng(rng_seed + c);
    std::vector<std::size_t> remaining = db.clusters[c];
    while (static_cast<int>(remaining.size()) >= cfg.min_inliers) {
      auto plane = ransac_fit_plane(remaining, cloud, cfg, rng);
      if (!plane) break;
      std::vector<std::size_t> rest;
      std::set_difference(remaining.begin(), remaining.end(), plane->inliers.begin(), plane->inliers.end(),
                          std::back_inserter(rest));
      remaining = std::move(rest);
      per_cluster[c].push_back(std::move(*plane));
    }
  });
  std::vector<Plane> planes;
  for (auto& v : per_cluster)
    for (auto& p : v) planes.push_back(std::move(p));
  res.planes = merge_coplanar(std::move(planes), cloud, cfg);
  if (res.planes.empty()) throw Error("no planar structure detected", "plane_extraction");

  std::vector<char> used(cloud.size(), 0);
  for (const auto& p : res.planes)
    for (auto i : p.inliers) used[i] = 1;
  for (std::size_t i = 0; i < cloud.size(); ++i)
    if (!used[i]) res.residual.push_back(i);
  return res;
}

}  // namespace polyrecon
