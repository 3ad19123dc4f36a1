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
#include <cstdint>
#include <numeric>
#include <vector>

namespace polyrecon {

struct Vec2 {
  double x = 0, y = 0;
};

namespace detail {

inline double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

/// > 0 when d lies strictly inside the circumcircle of the ccw triangle abc.
inline double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double ad = adx * adx + ady * ady, bd = bdx * bdx + bdy * bdy, cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

// Deterministic sub-nanoscale perturbation that breaks the cocircular ties of
// grid-like inputs. Only the connectivity uses perturbed positions.
inline double jitter(std::size_t index, int component) {
  std::uint64_t h = index * 2654435761ULL + static_cast<std::uint64_t>(component) * 40503ULL + 0x9E3779B9ULL;
  h = (h ^ (h >> 16)) * 0x45d9f3bULL;
  h = (h ^ (h >> 16)) * 0x45d9f3bULL;
  return 2.0 * (static_cast<double>(h & 0xFFFFFF) / double(0xFFFFFF)) - 1.0;
}

}  // namespace detail

/// Delaunay triangulation of 2-D points (Bowyer-Watson with walking point
/// location). Returns counter-clockwise index triples into `pts`. Exact
/// duplicates are triangulated once.
inline std::vector<std::array<std::size_t, 3>> delaunay_2d(const std::vector<Vec2>& pts) {
  std::vector<std::array<std::size_t, 3>> result;
  const std::size_t n = pts.size();
  if (n < 3) return result;

  double minx = HUGE_VAL, miny = HUGE_VAL, maxx = -HUGE_VAL, maxy = -HUGE_VAL;
  for (const auto& p : pts) {
    minx = std::min(minx, p.x);
    miny = std::min(miny, p.y);
    maxx = std::max(maxx, p.x);
    maxy = std::max(maxy, p.y);
  }
  const double span = std::max({maxx - minx, maxy - miny, 1e-300});
  const double cx = 0.5 * (minx + maxx), cy = 0.5 * (miny + maxy);

  // Normalized, perturbed working copy plus three super-triangle vertices.
  std::vector<Vec2> w(n + 3);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = {(pts[i].x - cx) / span + 1e-10 * detail::jitter(i, 0), (pts[i].y - cy) / span + 1e-10 * detail::jitter(i, 1)};
  w[n] = {-100.0, -100.0};
  w[n + 1] = {100.0, -100.0};
  w[n + 2] = {0.0, 100.0};

  // Insertion order: sort along a coarse grid in serpentine order for walk locality,
  // skipping exact duplicates.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pts[a].x < pts[b].x || (pts[a].x == pts[b].x && (pts[a].y < pts[b].y || (pts[a].y == pts[b].y && a < b)));
  });
  {
    std::vector<std::size_t> uniq;
    for (auto i : order)
      if (uniq.empty() || pts[uniq.back()].x != pts[i].x || pts[uniq.back()].y != pts[i].y) uniq.push_back(i);
    order = std::move(uniq);
  }
  const auto grid = static_cast<long>(std::max(1.0, std::sqrt(static_cast<double>(order.size()) / 4.0)));
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    auto cell = [&](std::size_t i, long& gx, long& gy) {
      gx = std::min(grid - 1, static_cast<long>((w[i].x + 0.5) * static_cast<double>(grid)));
      gy = std::min(grid - 1, static_cast<long>((w[i].y + 0.5) * static_cast<double>(grid)));
      if (gx & 1) gy = grid - 1 - gy;
    };
    long ax, ay, bx, by;
    cell(a, ax, ay);
    cell(b, bx, by);
    return ax < bx || (ax == bx && ay < by);
  });

  struct Tri {
    std::array<std::size_t, 3> v;
    std::array<long, 3> nb;  // neighbour across the edge opposite v[i]
    bool alive;
  };
  std::vector<Tri> tris;
  tris.reserve(2 * n + 8);
  tris.push_back({{n, n + 1, n + 2}, {-1, -1, -1}, true});
  long last = 0;

  std::vector<long> cavity, stack;
  std::vector<char> in_cavity;
  std::vector<long> mark;  // visit stamps
  long stamp = 0;

  for (std::size_t pi : order) {
    const Vec2& p = w[pi];
    // Walk to the containing triangle.
    long t = last;
    for (std::size_t steps = 0; steps < 4 * tris.size() + 16; ++steps) {
      const Tri& tr = tris[static_cast<std::size_t>(t)];
      bool moved = false;
      for (int e = 0; e < 3; ++e) {
        const Vec2& a = w[tr.v[(e + 1) % 3]];
        const Vec2& b = w[tr.v[(e + 2) % 3]];
        if (detail::orient2d(a, b, p) < 0 && tr.nb[e] >= 0) {
          t = tr.nb[e];
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    auto contains = [&](const Tri& tr) {
      for (int e = 0; e < 3; ++e)
        if (detail::orient2d(w[tr.v[(e + 1) % 3]], w[tr.v[(e + 2) % 3]], p) < 0) return false;
      return true;
    };
    if (!contains(tris[static_cast<std::size_t>(t)])) {
      // Walk failed on a numerically degenerate configuration: scan.
      for (std::size_t k = 0; k < tris.size(); ++k)
        if (tris[k].alive && contains(tris[k])) {
          t = static_cast<long>(k);
          break;
        }
    }

    // Grow the cavity of triangles whose circumcircle contains p.
    ++stamp;
    mark.resize(tris.size(), 0);
    cavity.clear();
    stack.assign(1, t);
    mark[static_cast<std::size_t>(t)] = stamp;
    while (!stack.empty()) {
      long c = stack.back();
      stack.pop_back();
      cavity.push_back(c);
      const Tri& tr = tris[static_cast<std::size_t>(c)];
      for (int e = 0; e < 3; ++e) {
        long nb = tr.nb[e];
        if (nb < 0 || mark[static_cast<std::size_t>(nb)] == stamp) continue;
        const Tri& nt = tris[static_cast<std::size_t>(nb)];
        if (detail::incircle(w[nt.v[0]], w[nt.v[1]], w[nt.v[2]], p) > 0) {
          mark[static_cast<std::size_t>(nb)] = stamp;
          stack.push_back(nb);
        }
      }
    }

    // Boundary edges (a, b) in ccw order of their cavity triangle.
    struct Edge {
      std::size_t a, b;
      long outside;
      int outside_edge;
    };
    std::vector<Edge> boundary;
    for (long c : cavity) {
      const Tri& tr = tris[static_cast<std::size_t>(c)];
      for (int e = 0; e < 3; ++e) {
        long nb = tr.nb[e];
        if (nb >= 0 && mark[static_cast<std::size_t>(nb)] == stamp) continue;
        int oe = -1;
        if (nb >= 0) {
          const Tri& nt = tris[static_cast<std::size_t>(nb)];
          for (int k = 0; k < 3; ++k)
            if (nt.nb[k] == c) oe = k;
        }
        boundary.push_back({tr.v[(e + 1) % 3], tr.v[(e + 2) % 3], nb, oe});
      }
    }
    for (long c : cavity) tris[static_cast<std::size_t>(c)].alive = false;

    const long first = static_cast<long>(tris.size());
    for (const auto& be : boundary) {
      const long id = static_cast<long>(tris.size());
      // v = (a, b, p): edge opposite p is (a, b) -> outside neighbour.
      tris.push_back({{be.a, be.b, pi}, {-1, -1, be.outside}, true});
      if (be.outside >= 0) tris[static_cast<std::size_t>(be.outside)].nb[static_cast<std::size_t>(be.outside_edge)] = id;
    }
    // Stitch new triangles: the edge opposite a is (b, p), shared with the
    // triangle whose a equals this b.
    const long last_new = static_cast<long>(tris.size());
    for (long i = first; i < last_new; ++i) {
      Tri& ti = tris[static_cast<std::size_t>(i)];
      for (long j = first; j < last_new; ++j) {
        if (i == j) continue;
        const Tri& tj = tris[static_cast<std::size_t>(j)];
        if (tj.v[0] == ti.v[1]) ti.nb[0] = j;  // edge (b, p)
        if (tj.v[1] == ti.v[0]) ti.nb[1] = j;  // edge (p, a)
      }
    }
    last = first;
  }

  for (const auto& tr : tris) {
    if (!tr.alive) continue;
    if (tr.v[0] >= n || tr.v[1] >= n || tr.v[2] >= n) continue;
    result.push_back(tr.v);
  }
  return result;
}

}  // namespace polyrecon
