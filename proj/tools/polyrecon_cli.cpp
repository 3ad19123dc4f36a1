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

// polyrecon: convex polytope decomposition of oriented point clouds.
//
//   polyrecon reconstruct <input> [--method los|wcseg] [--config file] [--seed n] [--out dir]
//   polyrecon synth <model> [--points n] [--noise s] [--out file]
//   polyrecon inspect <input>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "polyrecon/polyrecon.hpp"

namespace fs = std::filesystem;
using namespace polyrecon;

namespace {

constexpr int kInputError = 2;
constexpr int kPipelineError = 3;

struct InputError : Error {
  using Error::Error;
};

void write_debug(const fs::path& dir, const PipelineResult& r) {
  fs::create_directories(dir);
  const auto& s = r.structure.cloud;
  const auto pos = s.positions();
  std::vector<int> label(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) label[i] = static_cast<int>(s.points[i].label);
  export_colored_points(dir / "structured_labels.ply", pos, label);
  std::vector<int> plane(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) plane[i] = s.points[i].planes.empty() ? -1 : s.points[i].planes.front();
  export_colored_points(dir / "structured_planes.ply", pos, plane);
  std::vector<int> cluster(s.size(), -1);
  for (std::size_t c = 0; c < r.clustering.clusters.size(); ++c)
    for (auto i : r.clustering.clusters[c].points) cluster[i] = static_cast<int>(c);
  export_colored_points(dir / "clusters.ply", pos, cluster);
  if (!r.clustering.samples.empty()) {
    std::vector<Point3> sp;
    std::vector<int> sl;
    for (auto i : r.clustering.samples) {
      sp.push_back(s.points[i].position);
      sl.push_back(cluster[i]);
    }
    export_colored_points(dir / "los_samples.ply", sp, sl);
  }
}

int reconstruct(const std::string& input, const std::optional<std::string>& method, const std::optional<std::string>& config_path,
                const std::optional<std::uint64_t>& seed, const std::optional<int>& threads, const std::string& out_dir,
                const std::optional<std::string>& debug_dir, bool dump) {
  PipelineConfig cfg;
  try {
    if (config_path) cfg = load_config(*config_path);
    if (method) cfg.method = parse_method(*method);
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    cfg.validate();
  } catch (const Error& e) {
    throw InputError(e.what(), "config");
  }
  if (dump) {
    std::cout << dump_config(cfg);
    return 0;
  }
  LoadResult loaded;
  try {
    loaded = load_pointcloud(input);
  } catch (const Error& e) {
    throw InputError(e.what(), "input");
  }
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << '\n';

  PipelineResult r = run_pipeline(loaded.cloud, cfg);
  for (const auto& w : loaded.warnings) r.report.warnings.insert(r.report.warnings.begin(), w);

  const fs::path out(out_dir);
  fs::create_directories(out / "clusters");
  std::vector<ConvexPolytope> polys;
  for (const auto& p : r.polytopes) polys.push_back(p.polytope);
  export_obj(out / "polytopes.obj", polys);
  export_ply_mesh(out / "polytopes.ply", polys);
  export_json(out / "polytopes.json", r.polytopes);
  if (polys.empty()) std::cerr << "warning: no polytopes to export; wrote empty files\n";
  for (const auto& c : r.report.clusters) {
    std::ofstream f(out / "clusters" / ("cluster_" + std::to_string(c.index) + ".json"));
    f << cluster_json(c).dump(2) << '\n';
  }
  const auto report = report_json(r.report).dump(2);
  std::ofstream(out / "report.json") << report << '\n';
  std::cout << report << '\n';
  if (debug_dir) write_debug(*debug_dir, r);
  return 0;
}

int synth(const std::string& model, std::size_t points, double noise, std::uint64_t seed, const std::string& out, bool binary) {
  SyntheticModel m;
  try {
    m = synthetic_model(model);
  } catch (const Error& e) {
    throw InputError(e.what(), "input");
  }
  const auto cloud = sample_model(m, density_for(m, points), noise * m.edge, seed);
  const fs::path path(out);
  const auto ext = path.extension().string();
  if (ext == ".ply")
    save_ply_cloud(path, cloud, binary);
  else if (ext == ".xyz")
    save_xyz(path, cloud);
  else
    throw InputError("output must end in .xyz or .ply", "input");
  nlohmann::json boxes = nlohmann::json::array();
  for (const auto& b : m.boxes) boxes.push_back({{"min", vec_json(b.lo)}, {"max", vec_json(b.hi)}});
  std::cout << nlohmann::json{{"model", m.name},        {"points", cloud.size()},        {"planes", m.plane_count},
                              {"clusters", m.cluster_count}, {"polytopes", m.polytope_count()}, {"boxes", boxes}}
                   .dump(2)
            << '\n';
  return 0;
}

int inspect(const std::string& input) {
  LoadResult r;
  try {
    r = load_pointcloud(input);
  } catch (const Error& e) {
    throw InputError(e.what(), "input");
  }
  const Aabb b = r.cloud.bounds();
  std::cout << nlohmann::json{{"points", r.cloud.size()},
                              {"bounds_min", vec_json(b.min)},
                              {"bounds_max", vec_json(b.max)},
                              {"diagonal", b.diagonal()},
                              {"rejected_nonfinite", r.rejected_nonfinite},
                              {"rejected_zero_normal", r.rejected_zero_normal},
                              {"warnings", r.warnings}}
                   .dump(2)
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex polytope decomposition of oriented point clouds"};
  app.require_subcommand(1);

  auto* rec = app.add_subcommand("reconstruct", "Reconstruct convex polytopes from a point cloud");
  std::string rec_input, out_dir = "polyrecon_out";
  std::optional<std::string> method, config_path, debug_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool dump = false;
  rec->add_option("input", rec_input, "XYZ or PLY point cloud with normals")->required();
  rec->add_option("--method", method, "Clustering method")->check(CLI::IsMember({"los", "wcseg"}));
  rec->add_option("--config", config_path, "key = value configuration file");
  rec->add_option("--seed", seed, "Random seed");
  rec->add_option("--threads", threads, "Worker threads");
  rec->add_option("--out", out_dir, "Output directory");
  rec->add_option("--debug-dir", debug_dir, "Write intermediate PLY dumps here");
  rec->add_flag("--dump-config", dump, "Print the effective configuration and exit");

  auto* syn = app.add_subcommand("synth", "Sample a synthetic benchmark model");
  std::string model, syn_out = "synthetic.xyz";
  std::size_t points = 10000;
  double noise = 0.002;
  std::uint64_t syn_seed = 0;
  bool binary = false;
  syn->add_option("model", model, "cube | l_shape | two_cuboids | cuboid_stack")->required();
  syn->add_option("--points", points, "Approximate number of samples");
  syn->add_option("--noise", noise, "Gaussian noise sigma relative to the unit edge");
  syn->add_option("--seed", syn_seed, "Random seed");
  syn->add_option("--out", syn_out, "Output .xyz or .ply");
  syn->add_flag("--binary", binary, "Binary PLY output");

  auto* ins = app.add_subcommand("inspect", "Print point cloud statistics");
  std::string ins_input;
  ins->add_option("input", ins_input, "XYZ or PLY point cloud")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*rec) return reconstruct(rec_input, method, config_path, seed, threads, out_dir, debug_dir, dump);
    if (*syn) return synth(model, points, noise, syn_seed, syn_out, binary);
    return inspect(ins_input);
  } catch (const InputError& e) {
    std::cerr << "error [" << e.stage() << "]: " << e.what() << '\n';
    return kInputError;
  } catch (const Error& e) {
    std::cerr << "error [" << (e.stage().empty() ? "pipeline" : e.stage()) << "]: " << e.what() << '\n';
    return kPipelineError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kPipelineError;
  }
}
