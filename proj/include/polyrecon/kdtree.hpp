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
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "geometry.hpp"

namespace polyrecon {

/// Static k-d tree over points of fixed dimension. Query results are ordered by
/// (distance, index), so ties resolve to the lowest index.
template <int Dim>
class KdTree {
 public:
  using Point = std::array<double, Dim>;

  struct Hit {
    std::size_t index;
    double dist2;
    bool operator<(const Hit& o) const { return dist2 < o.dist2 || (dist2 == o.dist2 && index < o.index); }
  };

  KdTree() = default;
  explicit KdTree(std::vector<Point> pts) : pts_(std::move(pts)) {
    perm_.resize(pts_.size());
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    if (!pts_.empty()) root_ = build(0, pts_.size(), 0);
  }

  std::size_t size() const { return pts_.size(); }
  const Point& point(std::size_t i) const { return pts_[i]; }

  /// k nearest neighbours of q, closest first.
  std::vector<Hit> knn(const Point& q, std::size_t k) const {
    std::vector<Hit> heap;  // max-heap on Hit ordering
    if (k == 0 || nodes_.empty()) return heap;
    heap.reserve(k + 1);
    knn_rec(root_, q, k, heap);
    std::sort_heap(heap.begin(), heap.end());
    return heap;
  }

  /// All points within `radius` of q (inclusive), sorted by (distance, index).
  std::vector<Hit> radius(const Point& q, double radius) const {
    std::vector<Hit> out;
    if (nodes_.empty()) return out;
    radius_rec(root_, q, radius * radius, out);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Nearest neighbour; index is SIZE_MAX on an empty tree.
  Hit nearest(const Point& q) const {
    auto h = knn(q, 1);
    return h.empty() ? Hit{SIZE_MAX, std::numeric_limits<double>::infinity()} : h.front();
  }

 private:
  static constexpr std::uint32_t kLeaf = 12;

  struct Node {
    std::size_t begin, end;  // range in perm_
    int axis = -1;           // -1: leaf
    double split = 0;
    std::uint32_t left = 0, right = 0;
    Point lo, hi;  // bounding box
  };

  static double sq(double v) { return v * v; }

  std::uint32_t build(std::size_t b, std::size_t e, int depth) {
    Node n;
    n.begin = b;
    n.end = e;
    n.lo.fill(std::numeric_limits<double>::infinity());
    n.hi.fill(-std::numeric_limits<double>::infinity());
    for (std::size_t i = b; i < e; ++i)
      for (int d = 0; d < Dim; ++d) {
        n.lo[d] = std::min(n.lo[d], pts_[perm_[i]][d]);
        n.hi[d] = std::max(n.hi[d], pts_[perm_[i]][d]);
      }
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(n);
    if (e - b <= kLeaf) return id;
    int axis = 0;
    double widest = -1;
    for (int d = 0; d < Dim; ++d)
      if (n.hi[d] - n.lo[d] > widest) {
        widest = n.hi[d] - n.lo[d];
        axis = d;
      }
    if (widest <= 0) return id;
    const std::size_t mid = b + (e - b) / 2;
    std::nth_element(perm_.begin() + static_cast<std::ptrdiff_t>(b), perm_.begin() + static_cast<std::ptrdiff_t>(mid),
                     perm_.begin() + static_cast<std::ptrdiff_t>(e), [&](std::size_t x, std::size_t y) {
                       return pts_[x][axis] < pts_[y][axis] || (pts_[x][axis] == pts_[y][axis] && x < y);
                     });
    const double split = pts_[perm_[mid]][axis];
    const auto l = build(b, mid, depth + 1);
    const auto r = build(mid, e, depth + 1);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  double box_dist2(const Node& n, const Point& q) const {
    double d2 = 0;
    for (int d = 0; d < Dim; ++d) {
      if (q[d] < n.lo[d])
        d2 += sq(n.lo[d] - q[d]);
      else if (q[d] > n.hi[d])
        d2 += sq(q[d] - n.hi[d]);
    }
    return d2;
  }

  double point_dist2(std::size_t i, const Point& q) const {
    double d2 = 0;
    for (int d = 0; d < Dim; ++d) d2 += sq(pts_[i][d] - q[d]);
    return d2;
  }

  void knn_rec(std::uint32_t id, const Point& q, std::size_t k, std::vector<Hit>& heap) const {
    const Node& n = nodes_[id];
    if (heap.size() == k && box_dist2(n, q) > heap.front().dist2) return;
    if (n.axis < 0) {
      for (std::size_t i = n.begin; i < n.end; ++i) {
        Hit h{perm_[i], point_dist2(perm_[i], q)};
        if (heap.size() < k) {
          heap.push_back(h);
          std::push_heap(heap.begin(), heap.end());
        } else if (h < heap.front()) {
          std::pop_heap(heap.begin(), heap.end());
          heap.back() = h;
          std::push_heap(heap.begin(), heap.end());
        }
      }
      return;
    }
    const bool left_first = q[n.axis] < n.split;
    knn_rec(left_first ? n.left : n.right, q, k, heap);
    knn_rec(left_first ? n.right : n.left, q, k, heap);
  }

  void radius_rec(std::uint32_t id, const Point& q, double r2, std::vector<Hit>& out) const {
    const Node& n = nodes_[id];
    if (box_dist2(n, q) > r2) return;
    if (n.axis < 0) {
      for (std::size_t i = n.begin; i < n.end; ++i) {
        const double d2 = point_dist2(perm_[i], q);
        if (d2 <= r2) out.push_back({perm_[i], d2});
      }
      return;
    }
    radius_rec(n.left, q, r2, out);
    radius_rec(n.right, q, r2, out);
  }

  std::vector<Point> pts_;
  std::vector<std::size_t> perm_;
  std::vector<Node> nodes_;
  std::uint32_t root_ = 0;
};

using KdTree3 = KdTree<3>;

inline KdTree3::Point to_array(const Vec3& p) { return {p.x, p.y, p.z}; }

inline KdTree3 make_tree(std::span<const Vec3> pts) {
  std::vector<KdTree3::Point> a;
  a.reserve(pts.size());
  for (const auto& p : pts) a.push_back(to_array(p));
  return KdTree3(std::move(a));
}

}  // namespace polyrecon
