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
#include <array>
#include <cmath>
#include <vector>

#include "clustering.hpp"
#include "geometry.hpp"
#include "kdtree.hpp"
#include "structuring.hpp"

namespace polyrecon {

/// Regular lattice of signed distances (negative inside), trilinearly
/// interpolated. Queries outside the lattice report the outside value.
class SignedDistanceGrid {
 public:
  SignedDistanceGrid() = default;
  SignedDistanceGrid(Point3 origin, double cell, std::array<long, 3> dims, std::vector<double> values)
      : origin_(origin), cell_(cell), dims_(dims), values_(std::move(values)) {
    if (dims_[0] < 2 || dims_[1] < 2 || dims_[2] < 2) throw Error("signed distance grid needs >= 2 nodes per axis");
    if (values_.size() != static_cast<std::size_t>(dims_[0] * dims_[1] * dims_[2])) throw Error("grid value count mismatch");
  }

  const Point3& origin() const { return origin_; }
  double cell_size() const { return cell_; }
  const std::array<long, 3>& dims() const { return dims_; }
  const std::vector<double>& values() const { return values_; }

  double node(long i, long j, long k) const { return values_[static_cast<std::size_t>((k * dims_[1] + j) * dims_[0] + i)]; }
  Point3 node_position(long i, long j, long k) const {
    return origin_ + Vec3{static_cast<double>(i) * cell_, static_cast<double>(j) * cell_, static_cast<double>(k) * cell_};
  }

  double operator()(const Point3& x) const {
    const Vec3 r = (x - origin_) / cell_;
    const double g[3] = {r.x, r.y, r.z};
    long base[3];
    double frac[3];
    for (int a = 0; a < 3; ++a) {
      if (!(g[a] >= 0) || g[a] > static_cast<double>(dims_[a] - 1)) return outside_value(x);
      base[a] = std::min(static_cast<long>(std::floor(g[a])), dims_[a] - 2);
      frac[a] = g[a] - static_cast<double>(base[a]);
    }
    double v = 0;
    for (int c = 0; c < 8; ++c) {
      const long di = c & 1, dj = (c >> 1) & 1, dk = (c >> 2) & 1;
      const double w = (di ? frac[0] : 1 - frac[0]) * (dj ? frac[1] : 1 - frac[1]) * (dk ? frac[2] : 1 - frac[2]);
      if (w != 0) v += w * node(base[0] + di, base[1] + dj, base[2] + dk);
    }
    return v;
  }

 private:
  double outside_value(const Point3& x) const {
    Vec3 hi = origin_ + Vec3{static_cast<double>(dims_[0] - 1), static_cast<double>(dims_[1] - 1), static_cast<double>(dims_[2] - 1)} * cell_;
    const Vec3 d{std::max({origin_.x - x.x, 0.0, x.x - hi.x}), std::max({origin_.y - x.y, 0.0, x.y - hi.y}),
                 std::max({origin_.z - x.z, 0.0, x.z - hi.z})};
    return std::max(cell_, length(d));
  }

  Point3 origin_;
  double cell_ = 1;
  std::array<long, 3> dims_{2, 2, 2};
  std::vector<double> values_;
};

inline constexpr int kTargetNeighbours = 6;

/// Signed distance estimate from the K nearest oriented points: the
/// inverse-distance weighted mean of dot(n_i, x - p_i).
inline double oriented_point_distance(const KdTree3& tree, std::span<const Point3> pos, std::span<const Vec3> nrm, const Point3& x,
                                      int k = kTargetNeighbours) {
  double sw = 0, sv = 0;
  for (const auto& h : tree.knn(to_array(x), static_cast<std::size_t>(k))) {
    const double w = 1.0 / (std::sqrt(h.dist2) + 1e-12);
    sw += w;
    sv += w * dot(nrm[h.index], x - pos[h.index]);
  }
  return sw > 0 ? sv / sw : HUGE_VAL;
}

/// Target volume of a cluster: a grid over its bounding box grown by `pad`,
/// boundary nodes forced strictly positive.
inline SignedDistanceGrid build_target_volume(const ConvexCluster& cluster, const StructuredCloud& s, double cell, double pad) {
  if (cluster.points.size() < 10) throw Error("insufficient support for a target volume", "polytope_gen");
  if (!(cell > 0)) throw Error("target volume cell must be positive", "polytope_gen");
  std::vector<Point3> pos;
  std::vector<Vec3> nrm;
  for (auto i : cluster.points) {
    pos.push_back(s.points[i].position);
    nrm.push_back(s.points[i].normal);
  }
  Aabb box = bounds_of(pos);
  const Vec3 grow{pad, pad, pad};
  const Point3 lo = box.min - grow;
  const Vec3 ext = box.extent() + grow * 2.0;
  const std::array<long, 3> dims{std::max(2L, static_cast<long>(std::ceil(ext.x / cell)) + 1),
                                 std::max(2L, static_cast<long>(std::ceil(ext.y / cell)) + 1),
                                 std::max(2L, static_cast<long>(std::ceil(ext.z / cell)) + 1)};
  const KdTree3 tree = make_tree(pos);
  std::vector<double> values(static_cast<std::size_t>(dims[0] * dims[1] * dims[2]));
  for (long k = 0; k < dims[2]; ++k)
    for (long j = 0; j < dims[1]; ++j)
      for (long i = 0; i < dims[0]; ++i) {
        const Point3 x = lo + Vec3{static_cast<double>(i), static_cast<double>(j), static_cast<double>(k)} * cell;
        double v = oriented_point_distance(tree, pos, nrm, x);
        const bool boundary = i == 0 || j == 0 || k == 0 || i == dims[0] - 1 || j == dims[1] - 1 || k == dims[2] - 1;
        if (boundary && v <= 0) v = cell;
        values[static_cast<std::size_t>((k * dims[1] + j) * dims[0] + i)] = v;
      }
  return SignedDistanceGrid(lo, cell, dims, std::move(values));
}

}  // namespace polyrecon
