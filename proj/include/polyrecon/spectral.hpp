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
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "geometry.hpp"
#include "rng.hpp"

namespace polyrecon {

enum class LaplacianKind { symmetric, random_walk };

/// Binary symmetric affinity over sample points.
struct VisibilityGraph {
  std::vector<Point3> samples;
  std::vector<std::uint8_t> affinity;  // row-major n x n

  std::size_t size() const { return samples.size(); }
  bool at(std::size_t i, std::size_t j) const { return affinity[i * samples.size() + j] != 0; }
  void set(std::size_t i, std::size_t j, bool v) {
    affinity[i * samples.size() + j] = v;
    affinity[j * samples.size() + i] = v;
  }
  std::size_t degree(std::size_t i) const {
    std::size_t d = 0;
    for (std::size_t j = 0; j < size(); ++j) d += affinity[i * size() + j];
    return d;
  }
  /// Fraction of off-diagonal entries equal to 1.
  double density() const {
    const std::size_t n = size();
    if (n < 2) return 1.0;
    std::size_t c = 0;
    for (auto v : affinity) c += v;
    return static_cast<double>(c) / static_cast<double>(n * (n - 1));
  }

  static VisibilityGraph from_blocks(std::vector<Point3> samples, const std::vector<int>& block) {
    VisibilityGraph g;
    g.samples = std::move(samples);
    const std::size_t n = g.samples.size();
    g.affinity.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && block[i] == block[j]) g.affinity[i * n + j] = 1;
    return g;
  }
};

/// Top eigenpairs of a symmetric matrix, eigenvalues descending.
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Dense solve, keeping the `count` largest eigenpairs.
inline EigenPairs top_eigenpairs_dense(const Eigen::MatrixXd& m, std::size_t count) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw Error("eigen-decomposition failed", "convex_clustering");
  const auto n = m.rows();
  const auto c = static_cast<Eigen::Index>(std::min<std::size_t>(count, static_cast<std::size_t>(n)));
  EigenPairs r;
  r.values.resize(c);
  r.vectors.resize(n, c);
  for (Eigen::Index i = 0; i < c; ++i) {
    r.values(i) = es.eigenvalues()(n - 1 - i);
    r.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return r;
}

/// Restarted block Krylov (block Lanczos with full reorthogonalization and
/// Rayleigh-Ritz) for the `count` largest eigenpairs of a symmetric matrix.
/// Stops when every wanted Ritz pair has residual <= tol * ||m||.
inline EigenPairs top_eigenpairs_krylov(const Eigen::MatrixXd& m, std::size_t count, std::uint64_t seed, double tol = 1e-9,
                                        int block_steps = 10, int max_restarts = 60) {
  const Eigen::Index n = m.rows();
  const auto want = static_cast<Eigen::Index>(std::min<std::size_t>(count, static_cast<std::size_t>(n)));
  const Eigen::Index p = std::min<Eigen::Index>(n, want + 10);
  if (p * (block_steps + 1) >= n) return top_eigenpairs_dense(m, count);
  const double scale = std::max(1e-300, m.cwiseAbs().rowwise().sum().maxCoeff());

  Rng rng(seed);
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = rng.normal();

  EigenPairs out;
  for (int restart = 0; restart <= max_restarts; ++restart) {
    // Orthonormal basis V and its image MV, grown block by block.
    Eigen::MatrixXd v(n, p * (block_steps + 1));
    Eigen::MatrixXd mv(n, v.cols());
    Eigen::Index cols = 0;
    auto append = [&](Eigen::MatrixXd w) {
      const Eigen::Index first = cols;
      for (int pass = 0; pass < 2; ++pass)
        if (cols > 0) w -= v.leftCols(cols) * (v.leftCols(cols).transpose() * w);
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        Eigen::VectorXd c = w.col(j);
        const double before = c.norm();
        for (int pass = 0; pass < 2; ++pass)
          if (cols > first) c -= v.middleCols(first, cols - first) * (v.middleCols(first, cols - first).transpose() * c);
        const double nrm = c.norm();
        if (nrm <= 1e-10 * std::max(before, 1e-300) || nrm < 1e-300) continue;
        v.col(cols++) = c / nrm;
      }
    };
    Eigen::Index block_start = 0;
    append(x);
    for (int s = 0; s < block_steps && cols < v.cols(); ++s) {
      const Eigen::Index prev = cols;
      if (prev == block_start) break;
      mv.middleCols(block_start, prev - block_start).noalias() = m * v.middleCols(block_start, prev - block_start);
      Eigen::MatrixXd w = mv.middleCols(block_start, prev - block_start);
      block_start = prev;
      append(std::move(w));
    }
    if (cols > block_start) mv.middleCols(block_start, cols - block_start).noalias() = m * v.middleCols(block_start, cols - block_start);
    const auto basis = v.leftCols(cols);
    mv.conservativeResize(Eigen::NoChange, cols);
    const Eigen::MatrixXd h = basis.transpose() * mv;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (h + h.transpose()));
    const Eigen::Index r = std::min(p, cols);
    out.values.resize(std::min(want, r));
    out.vectors.resize(n, std::min(want, r));
    x.resize(n, r);
    double worst = 0;
    for (Eigen::Index i = 0; i < r; ++i) {
      const Eigen::VectorXd y = es.eigenvectors().col(cols - 1 - i);
      x.col(i) = basis * y;
      if (i < want) {
        const double theta = es.eigenvalues()(cols - 1 - i);
        const Eigen::VectorXd res = mv * y - theta * x.col(i);
        worst = std::max(worst, res.norm());
        out.values(i) = theta;
        out.vectors.col(i) = x.col(i);
      }
    }
    if (worst <= tol * scale) return out;
  }
  return out;
}

/// Adjusted Rand index of two labelings of equal length.
inline double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error("labelings differ in length");
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> ra, rb;
  for (std::size_t i = 0; i < n; ++i) {
    table[{a[i], b[i]}] += 1;
    ra[a[i]] += 1;
    rb[b[i]] += 1;
  }
  auto c2 = [](double x) { return x * (x - 1) / 2; };
  double idx = 0, sa = 0, sb = 0;
  for (const auto& [k, v] : table) idx += c2(v);
  for (const auto& [k, v] : ra) sa += c2(v);
  for (const auto& [k, v] : rb) sb += c2(v);
  const double expected = sa * sb / c2(static_cast<double>(n));
  const double maxi = 0.5 * (sa + sb);
  if (maxi == expected) return 1.0;
  return (idx - expected) / (maxi - expected);
}

/// Relabels so that labels appear in order 0, 1, 2, ... of first occurrence.
inline std::vector<int> canonical_labels(std::span<const int> labels) {
  std::map<int, int> remap;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) {
    auto [it, inserted] = remap.try_emplace(l, static_cast<int>(remap.size()));
    out.push_back(it->second);
  }
  return out;
}

struct KMeansResult {
  std::vector<int> labels;
  double inertia = 0;
};

/// Lloyd's k-means on the rows of `data` with k-means++ seeding; the best of
/// `restarts` runs by inertia. Ties in assignment go to the lower center.
inline KMeansResult kmeans(const Eigen::MatrixXd& data, int k, Rng& rng, int restarts = 10, int max_iter = 300) {
  const Eigen::Index n = data.rows(), dim = data.cols();
  if (k < 1 || k > n) throw Error("k-means needs 1 <= k <= n");
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const RowMatrix x = data;
  const auto un = static_cast<std::size_t>(n), ud = static_cast<std::size_t>(dim);
  auto dist2 = [&](const double* a, const double* b) {
    double d = 0;
    for (std::size_t j = 0; j < ud; ++j) d += (a[j] - b[j]) * (a[j] - b[j]);
    return d;
  };
  auto row = [&](std::size_t i) { return x.data() + i * ud; };
  KMeansResult best;
  best.inertia = HUGE_VAL;
  for (int run = 0; run < restarts; ++run) {
    std::vector<double> centers(static_cast<std::size_t>(k) * ud);
    auto center = [&](int c) { return centers.data() + static_cast<std::size_t>(c) * ud; };
    auto set_center = [&](int c, std::size_t i) { std::copy(row(i), row(i) + ud, center(c)); };
    std::vector<double> d2(un, HUGE_VAL);
    set_center(0, rng.index(un));
    for (int c = 1; c < k; ++c) {
      double total = 0;
      for (std::size_t i = 0; i < un; ++i) {
        d2[i] = std::min(d2[i], dist2(row(i), center(c - 1)));
        total += d2[i];
      }
      std::size_t pick = un - 1;
      if (total > 0) {
        double r = rng.uniform() * total;
        for (std::size_t i = 0; i < un; ++i) {
          r -= d2[i];
          if (r < 0) {
            pick = i;
            break;
          }
        }
      } else {
        pick = rng.index(un);
      }
      set_center(c, pick);
    }
    std::vector<int> labels(un, -1);
    double inertia = 0;
    for (int it = 0; it < max_iter; ++it) {
      bool changed = false;
      inertia = 0;
      for (std::size_t i = 0; i < un; ++i) {
        int bc = 0;
        double bd = HUGE_VAL;
        for (int c = 0; c < k; ++c) {
          const double d = dist2(row(i), center(c));
          if (d < bd) {
            bd = d;
            bc = c;
          }
        }
        inertia += bd;
        if (labels[i] != bc) {
          labels[i] = bc;
          changed = true;
        }
      }
      if (!changed && it > 0) break;
      std::vector<double> sum(centers.size(), 0.0);
      std::vector<int> count(static_cast<std::size_t>(k), 0);
      for (std::size_t i = 0; i < un; ++i) {
        const auto l = static_cast<std::size_t>(labels[i]);
        for (std::size_t j = 0; j < ud; ++j) sum[l * ud + j] += row(i)[j];
        ++count[l];
      }
      for (int c = 0; c < k; ++c) {
        if (count[static_cast<std::size_t>(c)] > 0) {
          for (std::size_t j = 0; j < ud; ++j) center(c)[j] = sum[static_cast<std::size_t>(c) * ud + j] / count[static_cast<std::size_t>(c)];
          continue;
        }
        // Empty cluster: move it onto the point farthest from its center.
        std::size_t far = 0;
        double fd = -1;
        for (std::size_t i = 0; i < un; ++i) {
          const double d = dist2(row(i), center(labels[i]));
          if (d > fd) {
            fd = d;
            far = i;
          }
        }
        set_center(c, far);
      }
    }
    if (inertia < best.inertia - 1e-12 * std::max(1.0, best.inertia == HUGE_VAL ? 1.0 : best.inertia)) {
      best.inertia = inertia;
      best.labels = labels;
    }
  }
  best.labels = canonical_labels(best.labels);
  return best;
}

/// Spectral embedding of the non-isolated vertices: eigenvectors of the
/// `count` smallest eigenvalues of the chosen normalized Laplacian.
struct SpectralEmbedding {
  std::vector<std::size_t> vertices;  // non-isolated vertex ids
  std::vector<double> inv_sqrt_degree;
  EigenPairs top;                     // of D^-1/2 A D^-1/2, descending
};

inline constexpr std::size_t kDenseEigenLimit = 600;

inline SpectralEmbedding spectral_embedding(const VisibilityGraph& g, std::size_t count, std::uint64_t seed) {
  SpectralEmbedding e;
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t d = g.degree(i);
    if (d == 0) continue;
    e.vertices.push_back(i);
    e.inv_sqrt_degree.push_back(1.0 / std::sqrt(static_cast<double>(d)));
  }
  const auto m = static_cast<Eigen::Index>(e.vertices.size());
  if (m == 0) return e;
  Eigen::MatrixXd norm(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b)
      norm(a, b) = g.at(e.vertices[static_cast<std::size_t>(a)], e.vertices[static_cast<std::size_t>(b)])
                       ? e.inv_sqrt_degree[static_cast<std::size_t>(a)] * e.inv_sqrt_degree[static_cast<std::size_t>(b)]
                       : 0.0;
  e.top = static_cast<std::size_t>(m) <= kDenseEigenLimit ? top_eigenpairs_dense(norm, count)
                                                          : top_eigenpairs_krylov(norm, count, seed);
  return e;
}

/// Clusters the graph into k groups from a precomputed embedding (which must
/// hold at least k eigenvectors). Isolated vertices take the label of the
/// nearest (Euclidean) non-isolated sample.
inline std::vector<int> spectral_cluster(const VisibilityGraph& g, const SpectralEmbedding& e, int k, LaplacianKind kind,
                                         std::uint64_t seed) {
  const std::size_t n = g.size();
  if (k < 1 || static_cast<std::size_t>(k) > n) throw Error("spectral clustering needs 1 <= k <= samples", "convex_clustering");
  const auto m = static_cast<Eigen::Index>(e.vertices.size());
  if (m == 0) {
    if (k == 1) return std::vector<int>(n, 0);
    throw Error("empty affinity: cannot form more than one cluster", "convex_clustering");
  }
  if (k > m) throw Error("k exceeds the number of connected samples", "convex_clustering");
  if (e.top.vectors.cols() < k) throw Error("embedding holds too few eigenvectors", "convex_clustering");
  Eigen::MatrixXd rows = e.top.vectors.leftCols(k);
  if (kind == LaplacianKind::symmetric) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const double nr = rows.row(i).norm();
      if (nr > 0) rows.row(i) /= nr;
    }
  } else {
    for (Eigen::Index i = 0; i < m; ++i) rows.row(i) *= e.inv_sqrt_degree[static_cast<std::size_t>(i)];
  }
  Rng rng(seed);
  const auto km = kmeans(rows, k, rng);
  std::vector<int> labels(n, -1);
  for (Eigen::Index i = 0; i < m; ++i) labels[e.vertices[static_cast<std::size_t>(i)]] = km.labels[static_cast<std::size_t>(i)];
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] >= 0) continue;
    double bd = HUGE_VAL;
    for (auto j : e.vertices) {
      const double d = distance2(g.samples[i], g.samples[j]);
      if (d < bd) {
        bd = d;
        labels[i] = labels[j];
      }
    }
  }
  return canonical_labels(labels);
}

inline std::vector<int> spectral_cluster(const VisibilityGraph& g, int k, LaplacianKind kind, std::uint64_t seed) {
  const auto e = spectral_embedding(g, static_cast<std::size_t>(std::max(k, 1)), seed);
  return spectral_cluster(g, e, k, kind, seed);
}

/// Q(C) = (|visible intra pairs| + alpha * |non-visible cross pairs|) / n^2,
/// counting unordered pairs once.
inline double clustering_quality(const VisibilityGraph& g, std::span<const int> labels, double alpha) {
  const std::size_t n = g.size();
  if (n == 0) return 0;
  std::size_t intra = 0, cross = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool vis = g.at(i, j);
      if (labels[i] == labels[j]) {
        intra += vis;
      } else {
        cross += !vis;
      }
    }
  return (static_cast<double>(intra) + alpha * static_cast<double>(cross)) / (static_cast<double>(n) * static_cast<double>(n));
}

struct ClusterCountResult {
  int k = 1;
  std::vector<int> labels;
  std::vector<std::pair<int, double>> scores;  // (k, Q) for every k tried
};

/// Runs spectral clustering for every k in [k_min, k_max] (clamped to the
/// connected sample count) and keeps the highest Q; ties go to the smaller k.
inline ClusterCountResult estimate_cluster_count(const VisibilityGraph& g, int k_min, int k_max, double alpha, LaplacianKind kind,
                                                 std::uint64_t seed) {
  if (k_min < 1 || k_max < k_min) throw Error("invalid cluster-count range", "convex_clustering");
  ClusterCountResult r;
  const std::size_t n = g.size();
  if (n == 0) return r;
  const auto e = spectral_embedding(g, static_cast<std::size_t>(k_max), seed);
  const int hi = std::min<int>(k_max, std::max<int>(1, static_cast<int>(e.vertices.size())));
  double best = -HUGE_VAL;
  for (int k = k_min; k <= hi; ++k) {
    auto labels = spectral_cluster(g, e, k, kind, Rng::derive_seed(seed, static_cast<std::uint64_t>(k)));
    const double q = clustering_quality(g, labels, alpha);
    r.scores.emplace_back(k, q);
    if (q > best) {
      best = q;
      r.k = k;
      r.labels = std::move(labels);
    }
  }
  if (r.labels.empty()) r.labels.assign(n, 0);
  return r;
}

}  // namespace polyrecon
