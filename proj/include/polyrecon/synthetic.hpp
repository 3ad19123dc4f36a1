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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "plane_extraction.hpp"
#include "rng.hpp"

namespace polyrecon {

struct Box {
  Point3 lo, hi;

  bool contains(const Point3& p, double tol) const {
    return p.x >= lo.x - tol && p.x <= hi.x + tol && p.y >= lo.y - tol && p.y <= hi.y + tol && p.z >= lo.z - tol &&
           p.z <= hi.z + tol;
  }
  std::vector<Point3> corners() const {
    std::vector<Point3> c;
    for (int k = 0; k < 8; ++k) c.push_back({k & 1 ? hi.x : lo.x, k & 2 ? hi.y : lo.y, k & 4 ? hi.z : lo.z});
    return c;
  }
  double volume() const { return (hi.x - lo.x) * (hi.y - lo.y) * (hi.z - lo.z); }
};

/// Ground truth of a synthetic model: a union of axis-aligned boxes, each a
/// polytope of the minimal convex decomposition.
struct SyntheticModel {
  std::string name;
  std::vector<Box> boxes;
  std::size_t plane_count = 0;
  std::size_t cluster_count = 0;
  double edge = 1.0;

  std::size_t polytope_count() const { return boxes.size(); }
  std::vector<std::vector<Point3>> polytope_vertices() const {
    std::vector<std::vector<Point3>> v;
    for (const auto& b : boxes) v.push_back(b.corners());
    return v;
  }
  bool inside(const Point3& p) const {
    for (const auto& b : boxes)
      if (b.contains(p, 0)) return true;
    return false;
  }
};

inline const std::vector<std::string>& synthetic_model_names() {
  static const std::vector<std::string> names{"cube", "l_shape", "two_cuboids", "cuboid_stack"};
  return names;
}

inline SyntheticModel synthetic_model(const std::string& name) {
  SyntheticModel m;
  m.name = name;
  if (name == "cube") {
    m.boxes = {{{0, 0, 0}, {1, 1, 1}}};
    m.plane_count = 6;
    m.cluster_count = 1;
  } else if (name == "l_shape") {
    m.boxes = {{{0, 0, 0}, {2, 1, 1}}, {{0, 1, 0}, {1, 2, 1}}};
    m.plane_count = 8;
    m.cluster_count = 2;
  } else if (name == "two_cuboids") {
    m.boxes = {{{0, 0, 0}, {1, 1, 1}}, {{3, 0.2, 0.15}, {3.8, 0.9, 0.75}}};
    m.plane_count = 12;
    m.cluster_count = 2;
  } else if (name == "cuboid_stack") {
    m.boxes = {{{0, 0, 0}, {2, 2, 1}}, {{0.5, 0.5, 1}, {1.5, 1.5, 2}}};
    m.plane_count = 11;
    m.cluster_count = 2;
  } else {
    throw Error("unknown synthetic model '" + name + "'", "input");
  }
  return m;
}

namespace detail {

struct BoxFace {
  int axis;      // fixed coordinate
  double value;  // its value
  int sign;      // outward direction along axis
  Point3 lo, hi; // face rectangle (degenerate on axis)
};

inline std::vector<BoxFace> faces_of(const Box& b) {
  std::vector<BoxFace> f;
  const double lo[3] = {b.lo.x, b.lo.y, b.lo.z}, hi[3] = {b.hi.x, b.hi.y, b.hi.z};
  for (int a = 0; a < 3; ++a)
    for (int s : {-1, 1}) {
      double flo[3] = {lo[0], lo[1], lo[2]}, fhi[3] = {hi[0], hi[1], hi[2]};
      const double v = s < 0 ? lo[a] : hi[a];
      flo[a] = fhi[a] = v;
      f.push_back({a, v, s, {flo[0], flo[1], flo[2]}, {fhi[0], fhi[1], fhi[2]}});
    }
  return f;
}

inline double face_area(const BoxFace& f) {
  const Vec3 e = f.hi - f.lo;
  const double d[3] = {e.x, e.y, e.z};
  return d[(f.axis + 1) % 3] * d[(f.axis + 2) % 3];
}

/// Area of the face covered by another (closed) box.
inline double covered_area(const BoxFace& f, const Box& other) {
  const double olo[3] = {other.lo.x, other.lo.y, other.lo.z}, ohi[3] = {other.hi.x, other.hi.y, other.hi.z};
  const double flo[3] = {f.lo.x, f.lo.y, f.lo.z}, fhi[3] = {f.hi.x, f.hi.y, f.hi.z};
  if (f.value < olo[f.axis] || f.value > ohi[f.axis]) return 0;
  double a = 1;
  for (int k = 1; k <= 2; ++k) {
    const int ax = (f.axis + k) % 3;
    a *= std::max(0.0, std::min(fhi[ax], ohi[ax]) - std::max(flo[ax], olo[ax]));
  }
  return a;
}

}  // namespace detail

/// Exposed surface area of the box union (boxes meet only along faces).
inline double exposed_area(const SyntheticModel& m) {
  double a = 0;
  for (std::size_t i = 0; i < m.boxes.size(); ++i)
    for (const auto& f : detail::faces_of(m.boxes[i])) {
      double cov = 0;
      for (std::size_t j = 0; j < m.boxes.size(); ++j)
        if (j != i) cov += detail::covered_area(f, m.boxes[j]);
      a += detail::face_area(f) - cov;
    }
  return a;
}

/// Area-uniform samples of the exposed boundary with outward normals and
/// isotropic Gaussian position noise.
inline OrientedCloud sample_model(const SyntheticModel& m, double samples_per_unit_area, double noise_sigma, std::uint64_t seed) {
  if (!(samples_per_unit_area > 0) || noise_sigma < 0) throw Error("sampling density must be positive and noise non-negative", "input");
  Rng rng(seed);
  OrientedCloud cloud;
  for (std::size_t i = 0; i < m.boxes.size(); ++i)
    for (const auto& f : detail::faces_of(m.boxes[i])) {
      const auto count = static_cast<std::size_t>(std::llround(samples_per_unit_area * detail::face_area(f)));
      Vec3 n{};
      (f.axis == 0 ? n.x : f.axis == 1 ? n.y : n.z) = f.sign;
      for (std::size_t s = 0; s < count; ++s) {
        const Point3 p{rng.uniform(f.lo.x, f.hi.x), rng.uniform(f.lo.y, f.hi.y), rng.uniform(f.lo.z, f.hi.z)};
        bool hidden = false;
        for (std::size_t j = 0; j < m.boxes.size() && !hidden; ++j) hidden = j != i && m.boxes[j].contains(p, 1e-12);
        if (hidden) continue;
        const Vec3 noise = noise_sigma > 0 ? Vec3{rng.normal(), rng.normal(), rng.normal()} * noise_sigma : Vec3{};
        cloud.positions.push_back(p + noise);
        cloud.normals.push_back(n);
      }
    }
  return cloud;
}

struct SyntheticCloud {
  OrientedCloud cloud;
  SyntheticModel model;
};

/// Named benchmark model sampled at the given density.
inline SyntheticCloud generate_synthetic(const std::string& name, double samples_per_unit_area, double noise_sigma, std::uint64_t seed) {
  SyntheticCloud s;
  s.model = synthetic_model(name);
  s.cloud = sample_model(s.model, samples_per_unit_area, noise_sigma, seed);
  return s;
}

/// Density giving about `points` samples on the model's exposed surface.
inline double density_for(const SyntheticModel& m, std::size_t points) { return static_cast<double>(points) / exposed_area(m); }

}  // namespace polyrecon
