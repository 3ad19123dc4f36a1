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

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "clustering.hpp"
#include "evolution.hpp"
#include "geometry.hpp"
#include "plane_extraction.hpp"

namespace polyrecon {

/// Every tunable of a run. Zero-valued lengths are derived from the input's
/// bounding-box diagonal.
struct PipelineConfig {
  ExtractionConfig extraction;
  double structuring_eps = 0;  // auto: 0.01 * diagonal
  int structuring_knn = 10;
  ClusteringConfig clustering;
  ClusteringMethod method = ClusteringMethod::wcseg;
  EAConfig ea;
  std::uint64_t seed = 0;
  int threads = 1;

  void validate() const {
    extraction.validate();
    clustering.validate();
    ea.validate();
    if (structuring_eps < 0 || structuring_knn < 1) throw Error("structuring: eps >= 0 and knn >= 1 required");
    if (threads < 1) throw Error("threads must be >= 1");
  }
};

inline std::string to_string(ClusteringMethod m) { return m == ClusteringMethod::los ? "los" : "wcseg"; }
inline std::string to_string(LaplacianKind k) { return k == LaplacianKind::symmetric ? "symmetric" : "random_walk"; }

inline ClusteringMethod parse_method(const std::string& s) {
  if (s == "los") return ClusteringMethod::los;
  if (s == "wcseg") return ClusteringMethod::wcseg;
  throw Error("unknown clustering method '" + s + "' (expected los or wcseg)", "config");
}

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* b = text.data();
  const char* e = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || ptr != e) throw Error("invalid value '" + text + "' for " + key, "config");
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw Error("invalid boolean '" + text + "' for " + key, "config");
}

struct ConfigField {
  std::string key;
  std::function<void(const std::string&)> set;
  std::function<std::string()> get;
};

inline std::vector<ConfigField> config_fields(PipelineConfig& c) {
  std::vector<ConfigField> f;
  auto real = [&](std::string k, double& v) {
    f.push_back({k, [&v, k](const std::string& s) { v = parse_number<double>(k, s); }, [&v] { return format_number(v); }});
  };
  auto integer = [&](std::string k, int& v) {
    f.push_back({k, [&v, k](const std::string& s) { v = parse_number<int>(k, s); }, [&v] { return std::to_string(v); }});
  };
  auto flag = [&](std::string k, bool& v) {
    f.push_back({k, [&v, k](const std::string& s) { v = parse_bool(k, s); }, [&v] { return std::string(v ? "true" : "false"); }});
  };
  real("extraction.eps_fit", c.extraction.eps_fit);
  real("extraction.theta_fit", c.extraction.theta_fit);
  real("extraction.dbscan_radius", c.extraction.dbscan_radius);
  integer("extraction.dbscan_min_pts", c.extraction.dbscan_min_pts);
  real("extraction.feature_normal_weight", c.extraction.feature_normal_weight);
  integer("extraction.min_inliers", c.extraction.min_inliers);
  real("extraction.merge_angle", c.extraction.merge_angle);
  real("extraction.merge_offset", c.extraction.merge_offset);
  integer("extraction.max_iterations", c.extraction.max_iterations);
  real("extraction.success_probability", c.extraction.success_probability);
  real("structuring.eps", c.structuring_eps);
  integer("structuring.knn", c.structuring_knn);
  f.push_back({"clustering.method", [&c](const std::string& s) { c.method = parse_method(s); }, [&c] { return to_string(c.method); }});
  integer("clustering.k_total", c.clustering.k_total);
  integer("clustering.k_min", c.clustering.k_min);
  integer("clustering.k_max", c.clustering.k_max);
  real("clustering.alpha_q", c.clustering.alpha_q);
  f.push_back({"clustering.laplacian",
               [&c](const std::string& s) {
                 if (s == "symmetric")
                   c.clustering.laplacian = LaplacianKind::symmetric;
                 else if (s == "random_walk")
                   c.clustering.laplacian = LaplacianKind::random_walk;
                 else
                   throw Error("invalid value '" + s + "' for clustering.laplacian", "config");
               },
               [&c] { return to_string(c.clustering.laplacian); }});
  real("clustering.wcseg_angle", c.clustering.wcseg_angle);
  integer("clustering.wcseg_knn", c.clustering.wcseg_knn);
  real("clustering.wcseg_patch_radius", c.clustering.wcseg_patch_radius);
  real("clustering.sdf_merge_threshold", c.clustering.sdf_merge_threshold);
  real("clustering.visibility_threshold", c.clustering.visibility_threshold);
  real("clustering.wcseg_min_region", c.clustering.wcseg_min_region);
  integer("clustering.wcseg_refine_rounds", c.clustering.wcseg_refine_rounds);
  integer("clustering.visibility_pairs", c.clustering.visibility_pairs);
  integer("clustering.sdf_rays", c.clustering.sdf_rays);
  real("clustering.sdf_cone_angle", c.clustering.sdf_cone_angle);
  real("clustering.alpha_radius", c.clustering.alpha_radius);
  real("clustering.guard", c.clustering.guard);
  integer("ea.population_size", c.ea.population_size);
  integer("ea.max_iterations", c.ea.max_iterations);
  integer("ea.stall_limit", c.ea.stall_limit);
  real("ea.crossover_rate", c.ea.crossover_rate);
  real("ea.mutation_rate", c.ea.mutation_rate);
  real("ea.alpha", c.ea.alpha);
  real("ea.beta", c.ea.beta);
  real("ea.gamma", c.ea.gamma);
  integer("ea.max_polytopes", c.ea.max_polytopes);
  real("ea.eps_geo", c.ea.eps_geo);
  real("ea.eps_vol", c.ea.eps_vol);
  real("ea.voxel_cell", c.ea.voxel_cell);
  integer("ea.tournament_size", c.ea.tournament_size);
  real("ea.filter_threshold", c.ea.filter_threshold);
  flag("ea.normalize_fp", c.ea.normalize_fp);
  flag("ea.all_planes", c.ea.all_planes);
  flag("ea.share_polytopes", c.ea.share_polytopes);
  integer("ea.walk_min", c.ea.walk_min);
  integer("ea.walk_max", c.ea.walk_max);
  integer("ea.retries", c.ea.retries);
  f.push_back({"seed", [&c](const std::string& s) { c.seed = parse_number<std::uint64_t>("seed", s); },
               [&c] { return std::to_string(c.seed); }});
  integer("threads", c.threads);
  return f;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Sets one dotted key. Unknown keys are an error.
inline void set_config_value(PipelineConfig& c, const std::string& key, const std::string& value) {
  for (auto& f : detail::config_fields(c))
    if (f.key == key) {
      f.set(value);
      return;
    }
  throw Error("unknown configuration key '" + key + "'", "config");
}

/// Applies `key = value` lines ('#' starts a comment) on top of `base`.
inline PipelineConfig parse_config(std::istream& in, PipelineConfig base = {}) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("line " + std::to_string(lineno) + ": expected key = value", "config");
    set_config_value(base, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  base.validate();
  return base;
}

inline PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string(), "config");
  return parse_config(in, std::move(base));
}

/// Every key with its current value, one `key = value` per line.
inline std::string dump_config(PipelineConfig c) {
  std::ostringstream out;
  out << "# 0 for a length means: derived from the bounding-box diagonal\n";
  for (auto& f : detail::config_fields(c)) out << f.key << " = " << f.get() << '\n';
  return out.str();
}

}  // namespace polyrecon
