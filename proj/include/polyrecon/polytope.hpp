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
#include <optional>
#include <span>
#include <vector>

#include "geometry.hpp"

namespace polyrecon {

/// Half-space {x : dot(normal, x - origin) <= 0}. `id` refers back to the
/// model plane it was taken from (-1 when anonymous).
struct HalfSpace {
  Point3 origin;
  Vec3 normal;
  int id = -1;

  static HalfSpace from(const Plane& p, int id = -1) { return {p.origin, p.normal, id}; }
  double offset() const { return dot(normal, origin); }
  /// Positive outside.
  double eval(const Point3& x) const { return dot(normal, x - origin); }
};

enum class HullStatus { ok, empty, unbounded };

struct VertexResult {
  HullStatus status = HullStatus::empty;
  std::vector<Point3> vertices;
};

struct VoxelSet {
  double cell_size = 0;
  std::vector<Point3> centers;
  double volume() const { return static_cast<double>(centers.size()) * cell_size * cell_size * cell_size; }
};

/// H-representation with its V-representation. Instances built by
/// make_polytope() are bounded, have non-empty interior and only keep the
/// half-spaces that support a facet.
struct ConvexPolytope {
  std::vector<HalfSpace> planes;
  std::vector<Point3> vertices;

  /// Sorted model plane ids; the identity used for de-duplication.
  std::vector<int> plane_ids() const {
    std::vector<int> ids;
    ids.reserve(planes.size());
    for (const auto& h : planes) ids.push_back(h.id);
    std::sort(ids.begin(), ids.end());
    return ids;
  }
};

/// min over member planes of dot(p_n, p_o - x): positive inside, zero on the
/// boundary, negative outside.
inline double signed_distance(std::span<const HalfSpace> planes, const Point3& x) {
  if (planes.empty()) throw Error("degenerate polytope");
  double d = HUGE_VAL;
  for (const auto& h : planes) d = std::min(d, -h.eval(x));
  return d;
}

inline double signed_distance(const ConvexPolytope& p, const Point3& x) { return signed_distance(p.planes, x); }

namespace detail {

struct ClipFace {
  int plane;  // index into the plane list, or -1..-6 for the initial box
  std::vector<Point3> poly;
};

/// Convex hull of coplanar points in the (u, v) frame, counter-clockwise,
/// collinear points dropped. Andrew's monotone chain.
inline std::vector<Point3> planar_hull(std::vector<Point3> pts, const Vec3& n, double tol) {
  auto [u, v] = plane_basis(n);
  struct P2 {
    double a, b;
    Point3 p;
  };
  std::vector<P2> q;
  q.reserve(pts.size());
  for (const auto& p : pts) q.push_back({dot(p, u), dot(p, v), p});
  std::sort(q.begin(), q.end(), [](const P2& l, const P2& r) { return l.a < r.a || (l.a == r.a && l.b < r.b); });
  std::vector<P2> uq;
  for (const auto& p : q)
    if (uq.empty() || std::hypot(p.a - uq.back().a, p.b - uq.back().b) > tol) uq.push_back(p);
  if (uq.size() < 3) return {};
  auto turn = [](const P2& o, const P2& a, const P2& b) { return (a.a - o.a) * (b.b - o.b) - (a.b - o.b) * (b.a - o.a); };
  std::vector<P2> h(2 * uq.size());
  std::size_t k = 0;
  const double area_tol = tol * tol;
  for (std::size_t i = 0; i < uq.size(); ++i) {
    while (k >= 2 && turn(h[k - 2], h[k - 1], uq[i]) <= area_tol) --k;
    h[k++] = uq[i];
  }
  for (std::size_t i = uq.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && turn(h[k - 2], h[k - 1], uq[i - 1]) <= area_tol) --k;
    h[k++] = uq[i - 1];
  }
  h.resize(k > 0 ? k - 1 : 0);
  if (h.size() < 3) return {};
  std::vector<Point3> out;
  out.reserve(h.size());
  for (const auto& p : h) out.push_back(p.p);
  return out;
}

inline double faces_volume(const std::vector<ClipFace>& faces) {
  double vol = 0;
  for (const auto& f : faces)
    for (std::size_t i = 1; i + 1 < f.poly.size(); ++i) vol += dot(f.poly[0], cross(f.poly[i], f.poly[i + 1]));
  return std::abs(vol) / 6.0;
}

}  // namespace detail

/// Extreme points of the intersection of the half-spaces. Works by clipping a
/// large box (1e4 times the spread of the plane origins) by each half-space in
/// turn; any surviving box vertex means the intersection is unbounded, and an
/// intersection without interior is reported as empty. Vertices come back in
/// lexicographic order.
inline VertexResult halfspaces_to_vertices(std::span<const HalfSpace> planes) {
  VertexResult res;
  if (planes.size() < 4) {
    res.status = HullStatus::unbounded;
    return res;
  }
  Vec3 c{};
  for (const auto& h : planes) c += h.origin;
  c = c / static_cast<double>(planes.size());
  double spread = 0;
  for (const auto& h : planes) spread = std::max(spread, distance(h.origin, c));
  const double scale = 1.0 + spread;
  const double R = 1e4 * scale;
  const double tol = 1e-9 * scale;

  std::vector<detail::ClipFace> faces;
  {
    const Vec3 lo = c - Vec3{R, R, R}, hi = c + Vec3{R, R, R};
    auto P = [&](int i) { return Point3{(i & 1) ? hi.x : lo.x, (i & 2) ? hi.y : lo.y, (i & 4) ? hi.z : lo.z}; };
    // Each box face as a quad; orientation is irrelevant for clipping.
    const int quads[6][4] = {{0, 2, 6, 4}, {1, 5, 7, 3}, {0, 4, 5, 1}, {2, 3, 7, 6}, {0, 1, 3, 2}, {4, 6, 7, 5}};
    for (int f = 0; f < 6; ++f) faces.push_back({-1 - f, {P(quads[f][0]), P(quads[f][1]), P(quads[f][2]), P(quads[f][3])}});
  }

  for (std::size_t pi = 0; pi < planes.size(); ++pi) {
    const HalfSpace& h = planes[pi];
    const Vec3 n = normalize(h.normal);
    const double off = dot(n, h.origin);
    std::vector<Point3> cap;
    std::vector<detail::ClipFace> next;
    next.reserve(faces.size() + 1);
    for (const auto& f : faces) {
      std::vector<Point3> out;
      const std::size_t m = f.poly.size();
      for (std::size_t i = 0; i < m; ++i) {
        const Point3& p = f.poly[i];
        const Point3& q = f.poly[(i + 1) % m];
        const double dp = dot(n, p) - off, dq = dot(n, q) - off;
        if (dp <= tol) out.push_back(p);
        if (std::abs(dp) <= tol) cap.push_back(p);
        if ((dp < -tol && dq > tol) || (dp > tol && dq < -tol)) {
          const double t = dp / (dp - dq);
          const Point3 x = p + (q - p) * t;
          out.push_back(x);
          cap.push_back(x);
        }
      }
      if (out.size() >= 3) next.push_back({f.plane, std::move(out)});
    }
    if (cap.size() >= 3) {
      auto hull = detail::planar_hull(std::move(cap), n, tol);
      if (hull.size() >= 3) next.push_back({static_cast<int>(pi), std::move(hull)});
    }
    faces = std::move(next);
    if (faces.empty()) return res;
  }

  if (detail::faces_volume(faces) <= 1e-12 * scale * scale * scale) return res;

  std::vector<Point3> verts;
  for (const auto& f : faces)
    for (const auto& p : f.poly) {
      if (std::abs(p.x - c.x) > 0.5 * R || std::abs(p.y - c.y) > 0.5 * R || std::abs(p.z - c.z) > 0.5 * R) {
        res.status = HullStatus::unbounded;
        return res;
      }
      verts.push_back(p);
    }
  std::sort(verts.begin(), verts.end(), [](const Point3& a, const Point3& b) {
    return a.x < b.x || (a.x == b.x && (a.y < b.y || (a.y == b.y && a.z < b.z)));
  });
  const double merge = 1e-8 * scale;
  for (const auto& p : verts) {
    bool dup = false;
    for (const auto& q : res.vertices)
      if (distance2(p, q) <= merge * merge) {
        dup = true;
        break;
      }
    if (!dup) res.vertices.push_back(p);
  }
  res.status = HullStatus::ok;
  return res;
}

inline VertexResult halfspaces_to_vertices(std::span<const Plane> planes) {
  std::vector<HalfSpace> hs;
  hs.reserve(planes.size());
  for (std::size_t i = 0; i < planes.size(); ++i) hs.push_back(HalfSpace::from(planes[i], static_cast<int>(i)));
  return halfspaces_to_vertices(std::span<const HalfSpace>(hs));
}

/// Vertex indices of each facet, counter-clockwise seen from outside, one
/// polygon per supporting half-space (in `planes` order). Half-spaces that do
/// not support a 2-D facet, and repeats of an already listed facet, get an
/// empty polygon.
inline std::vector<std::vector<std::size_t>> hull_facets(std::span<const HalfSpace> planes,
                                                         std::span<const Point3> vertices) {
  std::vector<std::vector<std::size_t>> facets(planes.size());
  if (vertices.empty()) return facets;
  const Aabb box = bounds_of(vertices);
  const double tol = 1e-7 * (1.0 + box.diagonal());
  std::vector<std::vector<std::size_t>> seen;
  for (std::size_t f = 0; f < planes.size(); ++f) {
    const Vec3 n = normalize(planes[f].normal);
    std::vector<std::size_t> on;
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (std::abs(dot(n, vertices[i] - planes[f].origin)) <= tol) on.push_back(i);
    if (on.size() < 3) continue;
    if (std::find(seen.begin(), seen.end(), on) != seen.end()) continue;
    seen.push_back(on);
    Vec3 ctr{};
    for (auto i : on) ctr += vertices[i];
    ctr = ctr / static_cast<double>(on.size());
    auto [u, v] = plane_basis(n);
    std::sort(on.begin(), on.end(), [&](std::size_t a, std::size_t b) {
      const Vec3 da = vertices[a] - ctr, db = vertices[b] - ctr;
      return std::atan2(dot(da, v), dot(da, u)) < std::atan2(dot(db, v), dot(db, u));
    });
    // (u, v, n) is right-handed, so increasing angle is counter-clockwise
    // around the outward normal.
    double area = 0;
    for (std::size_t i = 1; i + 1 < on.size(); ++i)
      area += length(cross(vertices[on[i]] - vertices[on[0]], vertices[on[i + 1]] - vertices[on[0]]));
    if (area <= tol * tol) continue;
    facets[f] = std::move(on);
  }
  return facets;
}

/// Builds a bounded polytope from half-spaces, keeping only those that
/// support a facet (sorted by id). Returns nothing for unbounded or empty
/// intersections.
inline std::optional<ConvexPolytope> make_polytope(std::vector<HalfSpace> planes) {
  auto vr = halfspaces_to_vertices(std::span<const HalfSpace>(planes));
  if (vr.status != HullStatus::ok) return std::nullopt;
  auto facets = hull_facets(planes, vr.vertices);
  ConvexPolytope p;
  for (std::size_t i = 0; i < planes.size(); ++i)
    if (!facets[i].empty()) {
      planes[i].normal = normalize(planes[i].normal);
      p.planes.push_back(planes[i]);
    }
  std::stable_sort(p.planes.begin(), p.planes.end(), [](const HalfSpace& a, const HalfSpace& b) { return a.id < b.id; });
  p.vertices = std::move(vr.vertices);
  return p;
}

/// Exact volume via the divergence theorem over the facets.
inline double polytope_volume(const ConvexPolytope& p) {
  auto facets = hull_facets(p.planes, p.vertices);
  double vol = 0;
  for (const auto& f : facets)
    for (std::size_t i = 1; i + 1 < f.size(); ++i)
      vol += dot(p.vertices[f[0]], cross(p.vertices[f[i]], p.vertices[f[i + 1]]));
  return vol / 6.0;
}

inline Point3 vertex_centroid(std::span<const Point3> v) {
  Vec3 c{};
  for (const auto& p : v) c += p;
  return v.empty() ? c : c / static_cast<double>(v.size());
}

/// Cell centers of an axis-aligned lattice anchored at the bounding-box
/// minimum whose center lies inside or on the polytope. If the box is thinner
/// than one cell along any axis the vertex centroid is the single cell.
inline VoxelSet voxelize(const ConvexPolytope& p, double cell_size) {
  if (p.vertices.empty()) throw Error("cannot voxelize an unbounded polytope");
  if (!(cell_size > 0)) throw Error("cell size must be positive");
  VoxelSet vs;
  vs.cell_size = cell_size;
  const Aabb box = bounds_of(p.vertices);
  const Vec3 ext = box.extent();
  if (ext.x < cell_size || ext.y < cell_size || ext.z < cell_size) {
    vs.centers.push_back(vertex_centroid(p.vertices));
    return vs;
  }
  const auto count = [&](double e) { return static_cast<long>(std::ceil(e / cell_size - 1e-9)); };
  const long nx = count(ext.x), ny = count(ext.y), nz = count(ext.z);
  if (static_cast<double>(nx) * static_cast<double>(ny) * static_cast<double>(nz) > 2e8) throw Error("voxel lattice too large");
  for (long k = 0; k < nz; ++k)
    for (long j = 0; j < ny; ++j)
      for (long i = 0; i < nx; ++i) {
        const Point3 c = box.min + Vec3{(static_cast<double>(i) + 0.5) * cell_size, (static_cast<double>(j) + 0.5) * cell_size,
                                        (static_cast<double>(k) + 0.5) * cell_size};
        if (signed_distance(p, c) >= 0) vs.centers.push_back(c);
      }
  return vs;
}

}  // namespace polyrecon
