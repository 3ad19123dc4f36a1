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
#include <optional>
#include <tuple>
#include <span>
#include <vector>

#include "delaunay.hpp"
#include "geometry.hpp"

namespace polyrecon {

/// Piece-wise triangulated approximation of the sampled region of one plane.
struct TrianglePatch {
  Point3 origin;
  Vec3 normal{0, 0, 1};
  int plane = -1;
  std::vector<std::array<Point3, 3>> triangles;
};

/// Alpha shape of `points` on `plane`: project, triangulate (Delaunay) and keep
/// triangles with circumradius <= alpha and area above 1e-12. Fewer than
/// three points or a collinear set give an empty patch.
inline TrianglePatch triangulate_patch(const Point3& origin, const Vec3& normal, std::span<const Point3> points, double alpha,
                                       int plane_id = -1) {
  TrianglePatch patch;
  patch.origin = origin;
  patch.normal = normalize(normal);
  patch.plane = plane_id;
  if (points.size() < 3) return patch;
  auto [u, v] = plane_basis(patch.normal);
  std::vector<Vec2> uv;
  std::vector<Point3> proj;
  uv.reserve(points.size());
  proj.reserve(points.size());
  for (const auto& p : points) {
    const Point3 q = p - patch.normal * dot(patch.normal, p - origin);
    proj.push_back(q);
    uv.push_back({dot(q - origin, u), dot(q - origin, v)});
  }
  for (const auto& t : delaunay_2d(uv)) {
    const Point3 &a = proj[t[0]], &b = proj[t[1]], &c = proj[t[2]];
    const double ab = distance(a, b), bc = distance(b, c), ca = distance(c, a);
    const double area = 0.5 * length(cross(b - a, c - a));
    if (area <= 1e-12) continue;
    const double circumradius = ab * bc * ca / (4.0 * area);
    if (circumradius <= alpha) patch.triangles.push_back({a, b, c});
  }
  return patch;
}

inline TrianglePatch triangulate_patch(const Plane& plane, std::span<const Point3> points, double alpha, int plane_id = -1) {
  return triangulate_patch(plane.origin, plane.normal, points, alpha, plane_id);
}

/// Set of triangle patches with a per-patch uniform grid over the triangles'
/// in-plane bounding boxes. Answers segment occlusion and ray queries.
class SurfaceModel {
 public:
  SurfaceModel() = default;
  SurfaceModel(std::vector<TrianglePatch> patches, double guard) : guard_(guard) {
    for (auto& p : patches) {
      if (p.triangles.empty()) continue;
      index_.push_back(build(std::move(p)));
    }
    Aabb box;
    for (const auto& ix : index_)
      for (const auto& t : ix.patch.triangles)
        for (const auto& v : t) box.extend(v);
    scale_ = 1.0 + box.diagonal();
  }

  double guard() const { return guard_; }
  std::size_t patch_count() const { return index_.size(); }
  const TrianglePatch& patch(std::size_t i) const { return index_[i].patch; }

  /// True iff the segment (a, b), shortened by the guard offset at both ends,
  /// meets a triangle. A plane is only tested against its triangles when the
  /// segment actually crosses it; segments lying in a patch plane never hit
  /// that patch, and neither do segments with an endpoint within the guard
  /// distance of the patch. Symmetric in (a, b).
  bool segment_blocked(Point3 a, Point3 b) const {
    if (b.x < a.x || (b.x == a.x && (b.y < a.y || (b.y == a.y && b.z < a.z)))) std::swap(a, b);
    const Vec3 d = b - a;
    const double len = length(d);
    if (len <= 2.0 * guard_) return false;
    const Point3 s = a + d * (guard_ / len);
    const Point3 e = b - d * (guard_ / len);
    const double tol = 1e-9 * scale_;
    for (const auto& ix : index_) {
      const double ds = dot(ix.patch.normal, s - ix.patch.origin);
      const double de = dot(ix.patch.normal, e - ix.patch.origin);
      if (std::abs(ds) <= tol && std::abs(de) <= tol) continue;
      if ((ds > tol && de > tol) || (ds < -tol && de < -tol)) continue;
      const double t = std::abs(ds - de) > 0 ? ds / (ds - de) : 0.0;
      if (hits(ix, s + (e - s) * t) && !near_patch(ix, a) && !near_patch(ix, b)) return true;
    }
    return false;
  }

  /// Distance along the unit direction `dir` from `o` to the first triangle
  /// hit farther than `min_t`, if any.
  std::optional<double> first_hit(const Point3& o, const Vec3& dir, double min_t) const {
    double best = HUGE_VAL;
    for (const auto& ix : index_) {
      const double den = dot(ix.patch.normal, dir);
      if (std::abs(den) < 1e-12) continue;
      const double t = dot(ix.patch.normal, ix.patch.origin - o) / den;
      if (t <= min_t || t >= best) continue;
      if (hits(ix, o + dir * t)) best = t;
    }
    if (best == HUGE_VAL) return std::nullopt;
    return best;
  }

 private:
  struct Tri2 {
    Vec2 a, b, c;
  };
  struct Index {
    TrianglePatch patch;
    Vec3 u, v;
    std::vector<Tri2> tris;
    double minx = 0, miny = 0, cell = 1;
    long nx = 1, ny = 1;
    std::vector<std::size_t> start;  // CSR offsets, nx*ny+1
    std::vector<std::size_t> items;

    long clampx(double x) const { return std::clamp(static_cast<long>(std::floor((x - minx) / cell)), 0L, nx - 1); }
    long clampy(double y) const { return std::clamp(static_cast<long>(std::floor((y - miny) / cell)), 0L, ny - 1); }
  };

  static Index build(TrianglePatch p) {
    Index ix;
    std::tie(ix.u, ix.v) = plane_basis(p.normal);
    double minx = HUGE_VAL, miny = HUGE_VAL, maxx = -HUGE_VAL, maxy = -HUGE_VAL;
    for (const auto& t : p.triangles) {
      Tri2 q;
      Vec2* dst[3] = {&q.a, &q.b, &q.c};
      for (int k = 0; k < 3; ++k) {
        const Vec3 r = t[k] - p.origin;
        *dst[k] = {dot(r, ix.u), dot(r, ix.v)};
        minx = std::min(minx, dst[k]->x);
        miny = std::min(miny, dst[k]->y);
        maxx = std::max(maxx, dst[k]->x);
        maxy = std::max(maxy, dst[k]->y);
      }
      ix.tris.push_back(q);
    }
    const double w = std::max(maxx - minx, 1e-12), h = std::max(maxy - miny, 1e-12);
    const double target = std::sqrt(w * h / std::max<double>(1.0, static_cast<double>(ix.tris.size()) / 2.0));
    ix.cell = std::max(target, std::max(w, h) / 512.0);
    ix.minx = minx;
    ix.miny = miny;
    ix.nx = std::max(1L, static_cast<long>(std::ceil(w / ix.cell)));
    ix.ny = std::max(1L, static_cast<long>(std::ceil(h / ix.cell)));
    std::vector<std::vector<std::size_t>> buckets(static_cast<std::size_t>(ix.nx * ix.ny));
    for (std::size_t i = 0; i < ix.tris.size(); ++i) {
      const auto& q = ix.tris[i];
      const double lx = std::min({q.a.x, q.b.x, q.c.x}), hx = std::max({q.a.x, q.b.x, q.c.x});
      const double ly = std::min({q.a.y, q.b.y, q.c.y}), hy = std::max({q.a.y, q.b.y, q.c.y});
      const long x0 = ix.clampx(lx), x1 = ix.clampx(hx), y0 = ix.clampy(ly), y1 = ix.clampy(hy);
      for (long y = y0; y <= y1; ++y)
        for (long x = x0; x <= x1; ++x) buckets[static_cast<std::size_t>(y * ix.nx + x)].push_back(i);
    }
    ix.start.push_back(0);
    for (const auto& b : buckets) {
      ix.items.insert(ix.items.end(), b.begin(), b.end());
      ix.start.push_back(ix.items.size());
    }
    ix.patch = std::move(p);
    return ix;
  }

  static double dist2_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab{b.x - a.x, b.y - a.y}, ap{p.x - a.x, p.y - a.y};
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    const double t = len2 > 0 ? std::clamp((ap.x * ab.x + ap.y * ab.y) / len2, 0.0, 1.0) : 0.0;
    const double dx = ap.x - t * ab.x, dy = ap.y - t * ab.y;
    return dx * dx + dy * dy;
  }

  /// Whether p lies within the guard distance of some triangle of the patch.
  bool near_patch(const Index& ix, const Point3& p) const {
    const Vec3 r = p - ix.patch.origin;
    const double dz = dot(ix.patch.normal, r);
    const double room = guard_ * guard_ - dz * dz;
    if (room < 0) return false;
    const Vec2 q{dot(r, ix.u), dot(r, ix.v)};
    const double rad = std::sqrt(room);
    for (long y = ix.clampy(q.y - rad); y <= ix.clampy(q.y + rad); ++y)
      for (long x = ix.clampx(q.x - rad); x <= ix.clampx(q.x + rad); ++x) {
        const auto b = static_cast<std::size_t>(y * ix.nx + x);
        for (std::size_t k = ix.start[b]; k < ix.start[b + 1]; ++k) {
          const Tri2& t = ix.tris[ix.items[k]];
          if (in_triangle(t, q)) return true;
          if (std::min({dist2_to_segment(q, t.a, t.b), dist2_to_segment(q, t.b, t.c), dist2_to_segment(q, t.c, t.a)}) <= room)
            return true;
        }
      }
    return false;
  }

  static bool in_triangle(const Tri2& t, const Vec2& p) {
    const double d = detail::orient2d(t.a, t.b, t.c);
    if (d == 0) return false;
    // Inclusive with a small relative slack so that points on shared edges
    // (creases) count as hits.
    const double eps = 1e-9 * std::abs(d);
    const double w0 = detail::orient2d(t.b, t.c, p), w1 = detail::orient2d(t.c, t.a, p), w2 = detail::orient2d(t.a, t.b, p);
    if (d > 0) return w0 >= -eps && w1 >= -eps && w2 >= -eps;
    return w0 <= eps && w1 <= eps && w2 <= eps;
  }

  bool hits(const Index& ix, const Point3& x) const {
    const Vec3 r = x - ix.patch.origin;
    const Vec2 p{dot(r, ix.u), dot(r, ix.v)};
    const double slack = 1e-9 * ix.cell;
    if (p.x < ix.minx - slack || p.y < ix.miny - slack || p.x > ix.minx + static_cast<double>(ix.nx) * ix.cell + slack ||
        p.y > ix.miny + static_cast<double>(ix.ny) * ix.cell + slack)
      return false;
    const long cx = ix.clampx(p.x), cy = ix.clampy(p.y);
    const auto c = static_cast<std::size_t>(cy * ix.nx + cx);
    for (std::size_t k = ix.start[c]; k < ix.start[c + 1]; ++k)
      if (in_triangle(ix.tris[ix.items[k]], p)) return true;
    return false;
  }

  std::vector<Index> index_;
  double guard_ = 0;
  double scale_ = 1;
};

/// One-shot form of SurfaceModel::segment_blocked.
inline bool segment_blocked(const Point3& a, const Point3& b, std::vector<TrianglePatch> patches, double guard) {
  return SurfaceModel(std::move(patches), guard).segment_blocked(a, b);
}

}  // namespace polyrecon
