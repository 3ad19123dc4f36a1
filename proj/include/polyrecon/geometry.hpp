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
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyrecon {

/// Error raised by library operations. `stage` names the pipeline step that
/// failed so the CLI can report it; it is empty for standalone calls.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, std::string stage = {})
      : std::runtime_error(what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct Vec3 {
  double x = 0, y = 0, z = 0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;
};

using Point3 = Vec3;

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double length(const Vec3& v) { return std::sqrt(dot(v, v)); }
constexpr double length2(const Vec3& v) { return dot(v, v); }
inline double distance(const Vec3& a, const Vec3& b) { return length(a - b); }
constexpr double distance2(const Vec3& a, const Vec3& b) { return length2(a - b); }
inline Vec3 normalize(const Vec3& v) {
  double l = length(v);
  return l > 0 ? v / l : Vec3{};
}
inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// Angle between two directions in degrees, in [0, 180].
inline double angle_deg(const Vec3& a, const Vec3& b) {
  double c = dot(normalize(a), normalize(b));
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c) * 180.0 / M_PI;
}

inline constexpr double deg2rad(double d) { return d * M_PI / 180.0; }

/// Two unit vectors spanning the plane orthogonal to `n`. The first is built
/// from the coordinate axis least aligned with `n`, so the frame depends only
/// on `n`.
inline std::pair<Vec3, Vec3> plane_basis(const Vec3& n) {
  const double ax = std::abs(n.x), ay = std::abs(n.y), az = std::abs(n.z);
  Vec3 a = (ax <= ay && ax <= az) ? Vec3{1, 0, 0} : (ay <= az ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
  Vec3 u = normalize(cross(n, a));
  Vec3 v = cross(n, u);
  return {u, v};
}

struct Aabb {
  Vec3 min{HUGE_VAL, HUGE_VAL, HUGE_VAL};
  Vec3 max{-HUGE_VAL, -HUGE_VAL, -HUGE_VAL};

  void extend(const Vec3& p) {
    min = {std::min(min.x, p.x), std::min(min.y, p.y), std::min(min.z, p.z)};
    max = {std::max(max.x, p.x), std::max(max.y, p.y), std::max(max.z, p.z)};
  }
  bool empty() const { return min.x > max.x; }
  Vec3 extent() const { return empty() ? Vec3{} : max - min; }
  Vec3 center() const { return (min + max) * 0.5; }
  double diagonal() const { return empty() ? 0.0 : length(max - min); }
};

inline Aabb bounds_of(std::span<const Vec3> pts) {
  Aabb b;
  for (const auto& p : pts) b.extend(p);
  return b;
}

/// Oriented infinite plane plus the indices of the source points it explains.
/// The half-space `dot(normal, x - origin) <= 0` is the "inside".
inline Point3 centroid(std::span<const Point3> pts) {
  Vec3 c{};
  for (const auto& p : pts) c += p;
  return pts.empty() ? c : c / static_cast<double>(pts.size());
}

struct Plane {
  Point3 origin;
  Vec3 normal{0, 0, 1};
  std::vector<std::size_t> inliers;

  double signed_distance(const Point3& p) const { return dot(normal, p - origin); }
  double offset() const { return dot(normal, origin); }
  Point3 project(const Point3& p) const { return p - normal * signed_distance(p); }
  Plane flipped() const { return Plane{origin, -normal, inliers}; }
};

/// Solves the 3x3 system `dot(n_i, x) = d_i`. Returns nothing when the normals
/// are (nearly) linearly dependent.
inline std::optional<Vec3> intersect_three(const Vec3& n0, double d0, const Vec3& n1, double d1,
                                           const Vec3& n2, double d2, double det_eps = 1e-12) {
  const Vec3 c12 = cross(n1, n2);
  const double det = dot(n0, c12);
  if (std::abs(det) < det_eps) return std::nullopt;
  Vec3 x = (c12 * d0 + cross(n2, n0) * d1 + cross(n0, n1) * d2) / det;
  if (!is_finite(x)) return std::nullopt;
  return x;
}

inline std::optional<Vec3> intersect_three(const Plane& a, const Plane& b, const Plane& c,
                                           double det_eps = 1e-12) {
  return intersect_three(a.normal, a.offset(), b.normal, b.offset(), c.normal, c.offset(), det_eps);
}

}  // namespace polyrecon
