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
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "evolution.hpp"
#include "geometry.hpp"
#include "plane_extraction.hpp"
#include "polytope.hpp"

namespace polyrecon {

struct LoadResult {
  OrientedCloud cloud;
  std::size_t rejected_nonfinite = 0;
  std::size_t rejected_zero_normal = 0;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string lower_extension(const std::filesystem::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return e;
}

inline void accept_point(LoadResult& r, const double v[6]) {
  for (int i = 0; i < 6; ++i)
    if (!std::isfinite(v[i])) {
      ++r.rejected_nonfinite;
      return;
    }
  const Vec3 n{v[3], v[4], v[5]};
  const double len = length(n);
  if (!(len > 1e-12)) {
    ++r.rejected_zero_normal;
    return;
  }
  r.cloud.positions.push_back({v[0], v[1], v[2]});
  r.cloud.normals.push_back(n / len);
}

inline void read_xyz(std::istream& in, LoadResult& r) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<double> vals;
    std::string tok;
    while (ls >> tok) {
      char* end = nullptr;
      const double d = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') throw Error("malformed record at line " + std::to_string(lineno), "input");
      vals.push_back(d);
    }
    if (vals.empty()) continue;
    if (vals.size() != 6) throw Error("malformed record at line " + std::to_string(lineno) + ": expected 6 values", "input");
    accept_point(r, vals.data());
  }
}

struct PlyProperty {
  std::string name;
  std::string type;
  bool list = false;
  std::string count_type;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

inline std::size_t ply_type_size(const std::string& t) {
  static const std::map<std::string, std::size_t> sizes{
      {"char", 1},  {"uchar", 1},  {"int8", 1},  {"uint8", 1},  {"short", 2},  {"ushort", 2},  {"int16", 2},   {"uint16", 2},
      {"int", 4},   {"uint", 4},   {"int32", 4}, {"uint32", 4}, {"float", 4},  {"float32", 4}, {"double", 8}, {"float64", 8}};
  auto it = sizes.find(t);
  if (it == sizes.end()) throw Error("unsupported PLY property type '" + t + "'", "input");
  return it->second;
}

inline double ply_read_binary(std::istream& in, const std::string& t, bool big_endian) {
  const std::size_t n = ply_type_size(t);
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n))) throw Error("truncated PLY body", "input");
  if (big_endian != (std::endian::native == std::endian::big)) std::reverse(buf, buf + n);
  auto as = [&](auto v) {
    std::memcpy(&v, buf, sizeof v);
    return static_cast<double>(v);
  };
  if (t == "char" || t == "int8") return as(std::int8_t{});
  if (t == "uchar" || t == "uint8") return as(std::uint8_t{});
  if (t == "short" || t == "int16") return as(std::int16_t{});
  if (t == "ushort" || t == "uint16") return as(std::uint16_t{});
  if (t == "int" || t == "int32") return as(std::int32_t{});
  if (t == "uint" || t == "uint32") return as(std::uint32_t{});
  if (t == "float" || t == "float32") return as(float{});
  return as(double{});
}

inline void read_ply(std::istream& in, LoadResult& r) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) throw Error("not a PLY file", "input");
  std::string format;
  std::vector<PlyElement> elems;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "format") {
      ls >> format;
    } else if (kw == "element") {
      PlyElement e;
      ls >> e.name >> e.count;
      elems.push_back(e);
    } else if (kw == "property") {
      if (elems.empty()) throw Error("PLY property outside an element", "input");
      PlyProperty p;
      ls >> p.type;
      if (p.type == "list") {
        p.list = true;
        ls >> p.count_type >> p.type;
      }
      ls >> p.name;
      elems.back().props.push_back(p);
    } else if (kw == "end_header") {
      break;
    }
  }
  if (format != "ascii" && format != "binary_little_endian" && format != "binary_big_endian")
    throw Error("unsupported PLY format '" + format + "'", "input");
  const bool ascii = format == "ascii", big = format == "binary_big_endian";
  for (const auto& e : elems) {
    if (e.name == "vertex") {
      int idx[6] = {-1, -1, -1, -1, -1, -1};
      const char* names[6] = {"x", "y", "z", "nx", "ny", "nz"};
      for (std::size_t p = 0; p < e.props.size(); ++p)
        for (int k = 0; k < 6; ++k)
          if (e.props[p].name == names[k] && !e.props[p].list) idx[k] = static_cast<int>(p);
      if (idx[0] < 0 || idx[1] < 0 || idx[2] < 0) throw Error("PLY vertex element lacks x, y, z", "input");
      if (idx[3] < 0 || idx[4] < 0 || idx[5] < 0) throw Error("normals required", "input");
      std::vector<double> row(e.props.size());
      for (std::size_t v = 0; v < e.count; ++v) {
        if (ascii) {
          if (!std::getline(in, line)) throw Error("truncated PLY body", "input");
          std::istringstream ls(line);
          for (std::size_t p = 0; p < e.props.size(); ++p) {
            if (e.props[p].list) throw Error("list properties on vertices are not supported", "input");
            std::string tok;
            if (!(ls >> tok)) throw Error("malformed PLY vertex " + std::to_string(v), "input");
            char* end = nullptr;
            row[p] = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0') throw Error("malformed PLY vertex " + std::to_string(v), "input");
          }
        } else {
          for (std::size_t p = 0; p < e.props.size(); ++p) {
            if (e.props[p].list) throw Error("list properties on vertices are not supported", "input");
            row[p] = ply_read_binary(in, e.props[p].type, big);
          }
        }
        double vals[6];
        for (int k = 0; k < 6; ++k) vals[k] = row[static_cast<std::size_t>(idx[k])];
        accept_point(r, vals);
      }
      return;
    }
    // Skip elements that precede the vertices.
    for (std::size_t i = 0; i < e.count; ++i) {
      if (ascii) {
        if (!std::getline(in, line)) throw Error("truncated PLY body", "input");
        continue;
      }
      for (const auto& p : e.props) {
        if (p.list) {
          const auto n = static_cast<std::size_t>(ply_read_binary(in, p.count_type, big));
          for (std::size_t k = 0; k < n; ++k) ply_read_binary(in, p.type, big);
        } else {
          ply_read_binary(in, p.type, big);
        }
      }
    }
  }
  throw Error("PLY file has no vertex element", "input");
}

}  // namespace detail

/// Reads an oriented cloud from .xyz (x y z nx ny nz per line) or .ply
/// (ascii or binary). Non-finite rows and zero normals are dropped and
/// counted; normals are renormalized. Fewer than `min_points` valid points is
/// an error.
inline LoadResult load_pointcloud(const std::filesystem::path& path, std::size_t min_points = 10) {
  const std::string ext = detail::lower_extension(path);
  if (ext != ".xyz" && ext != ".ply") throw Error("unknown point cloud extension '" + ext + "'", "input");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string(), "input");
  LoadResult r;
  if (ext == ".xyz")
    detail::read_xyz(in, r);
  else
    detail::read_ply(in, r);
  if (r.rejected_nonfinite) r.warnings.push_back(std::to_string(r.rejected_nonfinite) + " rows with non-finite values skipped");
  if (r.rejected_zero_normal) r.warnings.push_back(std::to_string(r.rejected_zero_normal) + " points with zero-length normals skipped");
  if (r.cloud.size() < min_points)
    throw Error("too few valid points (" + std::to_string(r.cloud.size()) + " < " + std::to_string(min_points) + ")", "input");
  return r;
}

inline void save_xyz(const std::filesystem::path& path, const OrientedCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string(), "output");
  out.precision(17);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.positions[i];
    const auto& n = cloud.normals[i];
    out << p.x << ' ' << p.y << ' ' << p.z << ' ' << n.x << ' ' << n.y << ' ' << n.z << '\n';
  }
}

/// Binary little-endian or ascii PLY with float64 positions and normals.
inline void save_ply_cloud(const std::filesystem::path& path, const OrientedCloud& cloud, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string(), "output");
  out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\nelement vertex " << cloud.size() << '\n';
  for (const char* n : {"x", "y", "z", "nx", "ny", "nz"}) out << "property double " << n << '\n';
  out << "end_header\n";
  out.precision(17);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.positions[i];
    const auto& n = cloud.normals[i];
    const double v[6] = {p.x, p.y, p.z, n.x, n.y, n.z};
    if (binary) {
      for (double d : v) {
        unsigned char b[8];
        std::memcpy(b, &d, 8);
        if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + 8);
        out.write(reinterpret_cast<const char*>(b), 8);
      }
    } else {
      out << v[0] << ' ' << v[1] << ' ' << v[2] << ' ' << v[3] << ' ' << v[4] << ' ' << v[5] << '\n';
    }
  }
}

// ------------------------------------------------------------------ export

/// Fixed palette, cycled per polytope or label.
inline std::array<int, 3> palette(std::size_t i) {
  static constexpr std::array<std::array<int, 3>, 10> colors{{{230, 25, 75},
                                                             {60, 180, 75},
                                                             {0, 130, 200},
                                                             {245, 130, 48},
                                                             {145, 30, 180},
                                                             {70, 240, 240},
                                                             {240, 50, 230},
                                                             {210, 245, 60},
                                                             {0, 128, 128},
                                                             {170, 110, 40}}};
  return colors[i % colors.size()];
}

/// Fan-triangulated facets of a bounded polytope (vertex index triples).
inline std::vector<std::array<std::size_t, 3>> polytope_triangles(const ConvexPolytope& p) {
  std::vector<std::array<std::size_t, 3>> tris;
  for (const auto& f : hull_facets(p.planes, p.vertices))
    for (std::size_t i = 1; i + 1 < f.size(); ++i) tris.push_back({f[0], f[i], f[i + 1]});
  return tris;
}

/// One mesh object per polytope with its own material; a sibling .mtl file
/// holds the colors. Returns false (and writes an empty model) for no input.
inline bool export_obj(const std::filesystem::path& path, const std::vector<ConvexPolytope>& polys) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string(), "output");
  auto mtl_path = path;
  mtl_path.replace_extension(".mtl");
  std::ofstream mtl(mtl_path);
  if (!mtl) throw Error("cannot write " + mtl_path.string(), "output");
  out.precision(17);
  out << "mtllib " << mtl_path.filename().string() << '\n';
  std::size_t base = 1;
  for (std::size_t k = 0; k < polys.size(); ++k) {
    const auto c = palette(k);
    mtl << "newmtl polytope_" << k << "\nKd " << c[0] / 255.0 << ' ' << c[1] / 255.0 << ' ' << c[2] / 255.0 << "\n\n";
    out << "o polytope_" << k << "\nusemtl polytope_" << k << '\n';
    for (const auto& v : polys[k].vertices) out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
    for (const auto& t : polytope_triangles(polys[k])) out << "f " << base + t[0] << ' ' << base + t[1] << ' ' << base + t[2] << '\n';
    base += polys[k].vertices.size();
  }
  return !polys.empty();
}

/// ascii PLY mesh with per-vertex colors identifying the polytope.
inline bool export_ply_mesh(const std::filesystem::path& path, const std::vector<ConvexPolytope>& polys) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string(), "output");
  std::size_t nv = 0;
  std::vector<std::vector<std::array<std::size_t, 3>>> tris;
  std::size_t nf = 0;
  for (const auto& p : polys) {
    nv += p.vertices.size();
    tris.push_back(polytope_triangles(p));
    nf += tris.back().size();
  }
  out << "ply\nformat ascii 1.0\nelement vertex " << nv
      << "\nproperty double x\nproperty double y\nproperty double z\nproperty uchar red\nproperty uchar green\nproperty uchar blue\n"
      << "element face " << nf << "\nproperty list uchar int vertex_indices\nend_header\n";
  out.precision(17);
  for (std::size_t k = 0; k < polys.size(); ++k) {
    const auto c = palette(k);
    for (const auto& v : polys[k].vertices) out << v.x << ' ' << v.y << ' ' << v.z << ' ' << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  }
  std::size_t base = 0;
  for (std::size_t k = 0; k < polys.size(); ++k) {
    for (const auto& t : tris[k]) out << "3 " << base + t[0] << ' ' << base + t[1] << ' ' << base + t[2] << '\n';
    base += polys[k].vertices.size();
  }
  return !polys.empty();
}

inline nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v.x, v.y, v.z}); }
inline Vec3 json_vec(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

inline nlohmann::json polytopes_json(const std::vector<ScoredPolytope>& polys) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& sp : polys) {
    nlohmann::json planes = nlohmann::json::array(), verts = nlohmann::json::array();
    for (const auto& h : sp.polytope.planes) planes.push_back({{"id", h.id}, {"origin", vec_json(h.origin)}, {"normal", vec_json(h.normal)}});
    for (const auto& v : sp.polytope.vertices) verts.push_back(vec_json(v));
    arr.push_back({{"cluster", sp.cluster}, {"score", sp.score}, {"planes", planes}, {"vertices", verts}});
  }
  return {{"polytopes", arr}};
}

inline bool export_json(const std::filesystem::path& path, const std::vector<ScoredPolytope>& polys) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string(), "output");
  out << polytopes_json(polys).dump(2) << '\n';
  return !polys.empty();
}

inline std::vector<ScoredPolytope> import_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string(), "input");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid polytope JSON: ") + e.what(), "input");
  }
  std::vector<ScoredPolytope> out;
  for (const auto& p : j.at("polytopes")) {
    ScoredPolytope sp;
    sp.cluster = p.value("cluster", 0);
    sp.score = p.value("score", 0.0);
    for (const auto& h : p.at("planes")) sp.polytope.planes.push_back({json_vec(h.at("origin")), json_vec(h.at("normal")), h.value("id", -1)});
    for (const auto& v : p.at("vertices")) sp.polytope.vertices.push_back(json_vec(v));
    out.push_back(std::move(sp));
  }
  return out;
}

/// Colored point dump for debugging (label -1 is grey).
inline void export_colored_points(const std::filesystem::path& path, std::span<const Point3> pts, std::span<const int> labels) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string(), "output");
  out << "ply\nformat ascii 1.0\nelement vertex " << pts.size()
      << "\nproperty double x\nproperty double y\nproperty double z\nproperty uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
  out.precision(17);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto c = labels[i] < 0 ? std::array<int, 3>{128, 128, 128} : palette(static_cast<std::size_t>(labels[i]));
    out << pts[i].x << ' ' << pts[i].y << ' ' << pts[i].z << ' ' << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  }
}

}  // namespace polyrecon
