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

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "clustering.hpp"
#include "config.hpp"
#include "evolution.hpp"
#include "plane_extraction.hpp"
#include "structuring.hpp"
#include "target_volume.hpp"

namespace polyrecon {

struct ClusterReport {
  std::size_t index = 0;
  std::size_t points = 0;
  std::vector<int> planes;
  std::size_t candidates = 0;
  bool skipped = false;
  int generations = 0;
  std::vector<double> trace;
  double best_score = 0;
  double surface_coverage = 0;
  std::vector<std::vector<int>> polytope_planes;
  std::vector<double> polytope_scores;
  std::size_t distinct_polytopes = 0;
};

struct StageTimings {
  double plane_extraction = 0;
  double structuring = 0;
  double clustering = 0;
  double polytope_generation = 0;
  double total = 0;
};

struct RunReport {
  StageTimings seconds;
  std::size_t input_points = 0;
  std::size_t plane_count = 0;
  std::size_t structured_points = 0;
  std::size_t graph_edges = 0;
  std::string method;
  std::size_t cluster_count = 0;
  std::vector<ClusterReport> clusters;
  std::size_t polytope_count = 0;
  double union_coverage = 0;
  std::vector<std::string> warnings;
};

struct PipelineResult {
  std::vector<ScoredPolytope> polytopes;
  RunReport report;
  std::vector<Plane> planes;
  StructuringResult structure;
  ClusteringResult clustering;
};

inline nlohmann::json cluster_json(const ClusterReport& c) {
  nlohmann::json polys = nlohmann::json::array();
  for (std::size_t i = 0; i < c.polytope_planes.size(); ++i)
    polys.push_back({{"planes", c.polytope_planes[i]}, {"score", c.polytope_scores[i]}});
  return {{"cluster", c.index},
          {"points", c.points},
          {"planes", c.planes},
          {"candidate_planes", c.candidates},
          {"skipped", c.skipped},
          {"generations", c.generations},
          {"best_score", c.best_score},
          {"surface_coverage", c.surface_coverage},
          {"trace", c.trace},
          {"final_size", c.polytope_planes.size()},
          {"distinct_polytopes", c.distinct_polytopes},
          {"polytopes", polys}};
}

inline nlohmann::json report_json(const RunReport& r) {
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& c : r.clusters) clusters.push_back(cluster_json(c));
  return {{"seconds",
           {{"plane_extraction", r.seconds.plane_extraction},
            {"structuring", r.seconds.structuring},
            {"clustering", r.seconds.clustering},
            {"polytope_generation", r.seconds.polytope_generation},
            {"total", r.seconds.total}}},
          {"input_points", r.input_points},
          {"plane_count", r.plane_count},
          {"structured_points", r.structured_points},
          {"graph_edges", r.graph_edges},
          {"method", r.method},
          {"cluster_count", r.cluster_count},
          {"clusters", clusters},
          {"polytope_count", r.polytope_count},
          {"union_coverage", r.union_coverage},
          {"warnings", r.warnings}};
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Runs `fn`, tagging untagged errors with the stage name.
template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (!e.stage().empty()) throw;
    throw Error(e.what(), stage);
  } catch (const std::exception& e) {
    throw Error(e.what(), stage);
  }
}

}  // namespace detail

/// Fraction of the structured points within eps_geo of some polytope boundary.
inline double union_coverage(const std::vector<ScoredPolytope>& polys, const StructuredCloud& s, double eps_geo) {
  if (s.points.empty()) return 0;
  std::size_t hits = 0;
  for (const auto& p : s.points)
    for (const auto& sp : polys)
      if (std::abs(signed_distance(sp.polytope, p.position)) < eps_geo) {
        ++hits;
        break;
      }
  return static_cast<double>(hits) / static_cast<double>(s.points.size());
}

/// Plane extraction, structuring, clustering, per-cluster polytope search and
/// filtering.
inline PipelineResult run_pipeline(const OrientedCloud& cloud, const PipelineConfig& cfg_in) {
  using detail::Clock;
  const auto t_start = Clock::now();
  cfg_in.validate();
  if (cloud.empty()) throw Error("empty point cloud", "plane_extraction");
  PipelineResult res;
  RunReport& rep = res.report;
  rep.input_points = cloud.size();
  rep.method = to_string(cfg_in.method);
  const double diag = cloud.bounds().diagonal();
  const double eps = cfg_in.structuring_eps > 0 ? cfg_in.structuring_eps : 0.01 * diag;
  const EAConfig ea = cfg_in.ea.resolved(diag, eps);

  auto t0 = Clock::now();
  auto extraction = detail::run_stage("plane_extraction", [&] {
    return extract_planes(cloud, cfg_in.extraction.resolved(diag), cfg_in.seed, cfg_in.threads);
  });
  res.planes = std::move(extraction.planes);
  rep.plane_count = res.planes.size();
  rep.seconds.plane_extraction = detail::seconds_since(t0);

  t0 = Clock::now();
  res.structure = detail::run_stage("structuring", [&] {
    return structure_cloud(res.planes, cloud, eps, cfg_in.structuring_knn, cfg_in.threads);
  });
  rep.structured_points = res.structure.cloud.size();
  rep.graph_edges = res.structure.graph.edges.size();
  for (const auto& w : res.structure.warnings) rep.warnings.push_back(w);
  rep.seconds.structuring = detail::seconds_since(t0);

  t0 = Clock::now();
  res.clustering = detail::run_stage("convex_clustering", [&] {
    const SurfaceModel surface = build_surface(res.structure.cloud, res.planes, cfg_in.clustering);
    const auto seed = Rng::derive_seed(cfg_in.seed, 0xC1);
    return cfg_in.method == ClusteringMethod::los ? cluster_los(res.structure.cloud, surface, cfg_in.clustering, seed, cfg_in.threads)
                                                  : cluster_wcseg(res.structure.cloud, surface, cfg_in.clustering, seed, cfg_in.threads);
  });
  for (const auto& w : res.clustering.warnings) rep.warnings.push_back(w);
  rep.cluster_count = res.clustering.clusters.size();
  rep.seconds.clustering = detail::seconds_since(t0);

  t0 = Clock::now();
  const auto& clusters = res.clustering.clusters;
  rep.clusters.resize(clusters.size());
  std::vector<std::vector<ScoredPolytope>> found(clusters.size());
  detail::run_stage("polytope_gen", [&] {
    parallel_for(clusters.size(), cfg_in.threads, [&](std::size_t c) {
      ClusterReport& cr = rep.clusters[c];
      cr.index = c;
      cr.points = clusters[c].points.size();
      cr.planes = clusters[c].planes;
      if (clusters[c].points.size() < 10) {
        cr.skipped = true;
        return;
      }
      auto volume = build_target_volume(clusters[c], res.structure.cloud, ea.voxel_cell, 2.0 * ea.voxel_cell);
      ClusterProblem prob(clusters[c], res.structure.cloud, res.planes, res.structure.graph, std::move(volume), ea);
      cr.candidates = prob.candidates().size();
      if (prob.candidates().size() < 4) {
        cr.skipped = true;
        return;
      }
      EvolutionResult ev;
      try {
        ev = evolve(prob, Rng::derive_seed(cfg_in.seed, 1000 + c), 1);
      } catch (const Error&) {
        cr.skipped = true;
        return;
      }
      cr.generations = ev.generations;
      cr.trace = ev.trace;
      cr.best_score = ev.best.score;
      cr.surface_coverage = prob.surface_coverage(ev.best);
      cr.distinct_polytopes = ev.distinct_polytopes;
      for (const auto& p : ev.best.polytopes) {
        cr.polytope_planes.push_back(p->polytope.plane_ids());
        cr.polytope_scores.push_back(p->containment);
      }
      found[c] = scored_polytopes(ev.best, static_cast<int>(c));
    });
    return 0;
  });
  for (const auto& cr : rep.clusters)
    if (cr.skipped) rep.warnings.push_back("cluster " + std::to_string(cr.index) + " skipped: too little support for a polytope");
  std::vector<ScoredPolytope> all;
  for (auto& f : found) all.insert(all.end(), f.begin(), f.end());
  res.polytopes = filter_polytopes(std::move(all), ea.filter_threshold);
  rep.polytope_count = res.polytopes.size();
  rep.union_coverage = union_coverage(res.polytopes, res.structure.cloud, ea.eps_geo);
  rep.seconds.polytope_generation = detail::seconds_since(t0);
  rep.seconds.total = detail::seconds_since(t_start);
  if (res.polytopes.empty()) rep.warnings.push_back("no polytope survived filtering");
  return res;
}

}  // namespace polyrecon
