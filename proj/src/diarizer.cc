// Copyright 2026  The sastk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "sastk/diarizer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <fmt/format.h>

#include "sastk/error.h"
#include "sastk/kernels.h"

namespace sastk {

void DiarizationConfig::validate() const {
  if (max_speakers < 1) throw ConfigError("max_speakers must be >= 1");
  if (fixed_k && (*fixed_k < 1 || *fixed_k > max_speakers))
    throw ConfigError(
        fmt::format("fixed k {} must lie in [1, max_speakers={}]", *fixed_k, max_speakers));
  if (!(affinity_percentile > 0.0 && affinity_percentile < 100.0))
    throw ConfigError(
        fmt::format("affinity percentile {} outside (0,100)", affinity_percentile));
  if (kmeans_restarts < 1) throw ConfigError("kmeans_restarts must be >= 1");
}

namespace {

// Linear-interpolation percentile of `values` (which gets sorted).
double percentile(std::vector<double> &values, double pct) {
  std::sort(values.begin(), values.end());
  const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace

Matrix build_affinity(const Matrix &embeddings, double pct) {
  const std::size_t n = embeddings.rows();
  if (n < 2) throw DataError("affinity needs at least two embeddings");
  Matrix cos = kernels::cosine_similarity(embeddings);
  Matrix pruned(n, n);
  std::vector<double> row_values;
  for (std::size_t i = 0; i < n; ++i) {
    row_values.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) row_values.push_back(0.5 * (1.0 + cos(i, j)));
    const double cut = percentile(row_values, pct);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double a = 0.5 * (1.0 + cos(i, j));
      pruned(i, j) = a < cut ? 0.0 : a;
    }
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    out(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = std::max(pruned(i, j), pruned(j, i));
      out(i, j) = a;
      out(j, i) = a;
    }
  }
  return out;
}

EigenDecomposition eigendecompose_laplacian(const Matrix &affinity) {
  const std::size_t n = affinity.rows();
  if (affinity.cols() != n) throw ConfigError("affinity must be square");
  std::vector<double> inv_sqrt_degree(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (affinity(i, j) < 0.0) throw DataError("affinity must be non-negative");
      d += affinity(i, j);
    }
    if (!(d > 0.0))
      throw DataError(fmt::format(
          "node {} has zero degree; lower the affinity percentile", i));
    inv_sqrt_degree[i] = 1.0 / std::sqrt(d);
  }
  Matrix lap(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      lap(i, j) = (i == j ? 1.0 : 0.0) -
                  inv_sqrt_degree[i] * affinity(i, j) * inv_sqrt_degree[j];
  // Exact symmetry for the solver's check.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) lap(j, i) = lap(i, j);
  return jacobi_eigen(std::move(lap));
}

std::size_t estimate_k(const std::vector<double> &eigenvalues,
                       std::size_t max_speakers) {
  if (eigenvalues.size() < 2) return 1;
  const std::size_t limit = std::min(max_speakers, eigenvalues.size() - 1);
  std::size_t best = 1;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= limit; ++k) {
    const double gap = eigenvalues[k] - eigenvalues[k - 1];
    if (gap > best_gap) {
      best_gap = gap;
      best = k;
    }
  }
  return best;
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

KMeansResult kmeans_once(const Matrix &points, std::size_t k, std::mt19937_64 &rng) {
  const std::size_t n = points.rows(), dim = points.cols();
  Matrix centers(k, dim);
  // k-means++ seeding.
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  auto first = points.row(pick(rng));
  std::copy(first.begin(), first.end(), centers.row(0).begin());
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(points.row(i), centers.row(c - 1)));
      total += nearest[i];
    }
    std::size_t chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng), acc = 0.0;
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += nearest[i];
        if (acc >= target && nearest[i] > 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick(rng);
    }
    auto src = points.row(chosen);
    std::copy(src.begin(), src.end(), centers.row(c).begin());
  }

  KMeansResult r;
  r.labels.assign(n, -1);
  for (int iter = 0; iter < 300; ++iter) {
    bool changed = false;
    r.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = squared_distance(points.row(i), centers.row(c));
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      if (r.labels[i] != best) {
        r.labels[i] = best;
        changed = true;
      }
      r.inertia += best_d;
    }
    if (!changed) break;
    Matrix sums(k, dim);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto c = static_cast<std::size_t>(r.labels[i]);
      ++counts[c];
      auto src = points.row(i);
      auto dst = sums.row(c);
      for (std::size_t d = 0; d < dim; ++d) dst[d] += src[d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      auto dst = centers.row(c);
      if (counts[c] == 0) {
        // Re-seed an empty cluster at the point farthest from its center.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = squared_distance(
              points.row(i), centers.row(static_cast<std::size_t>(r.labels[i])));
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        auto src = points.row(far);
        std::copy(src.begin(), src.end(), dst.begin());
        continue;
      }
      auto src = sums.row(c);
      for (std::size_t d = 0; d < dim; ++d)
        dst[d] = src[d] / static_cast<double>(counts[c]);
    }
  }
  return r;
}

}  // namespace

KMeansResult kmeans(const Matrix &points, std::size_t k, int restarts,
                    std::uint64_t seed) {
  if (k < 1 || k > points.rows())
    throw ConfigError(fmt::format("k-means needs 1 <= k <= n (k {}, n {})", k, points.rows()));
  std::mt19937_64 rng(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, restarts); ++r) {
    KMeansResult cur = kmeans_once(points, k, rng);
    if (cur.inertia < best.inertia) best = std::move(cur);
  }
  return best;
}

std::vector<int> canonical_labels(const std::vector<int> &labels) {
  std::map<int, int> rename;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) {
    auto [it, inserted] = rename.emplace(l, static_cast<int>(rename.size()));
    out.push_back(it->second);
  }
  return out;
}

DiarizationResult cluster(const Matrix &embeddings, const DiarizationConfig &cfg) {
  cfg.validate();
  const std::size_t n = embeddings.rows();
  DiarizationResult result;
  if (n == 0) throw DataError("nothing to cluster");
  if (n == 1) {
    result.labels = {0};
    result.k = 1;
    return result;
  }
  const Matrix affinity = build_affinity(embeddings, cfg.affinity_percentile);
  EigenDecomposition eig = eigendecompose_laplacian(affinity);
  result.eigenvalues = eig.values;
  std::size_t k = cfg.fixed_k ? *cfg.fixed_k : estimate_k(eig.values, cfg.max_speakers);
  if (k > n)
    throw ConfigError(fmt::format("cannot form {} clusters from {} segments", k, n));
  result.k = k;
  if (k == 1) {
    result.labels.assign(n, 0);
    return result;
  }
  Matrix spectral(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k; ++c) spectral(i, c) = eig.vectors(c, i);
    auto row = spectral.row(i);
    const double norm = l2_norm(row);
    if (norm > 0.0)
      for (double &v : row) v /= norm;
  }
  KMeansResult km = kmeans(spectral, k, cfg.kmeans_restarts, cfg.seed);
  result.labels = canonical_labels(km.labels);
  int used = 0;
  for (int l : result.labels) used = std::max(used, l + 1);
  result.k = static_cast<std::size_t>(used);
  return result;
}

SpeakerTimelineSet to_timeline_set(const DiarizationResult &result,
                                   const std::vector<Segment> &segments) {
  if (result.labels.size() != segments.size())
    throw DataError(fmt::format("{} labels for {} segments", result.labels.size(),
                                segments.size()));
  const std::vector<int> labels = canonical_labels(result.labels);
  std::map<int, std::vector<Segment>> grouped;
  for (std::size_t i = 0; i < segments.size(); ++i)
    grouped[labels[i]].push_back(segments[i]);
  SpeakerTimelineSet set;
  for (auto &[label, segs] : grouped)
    set[fmt::format("spk{:02d}", label)] = Timeline::normalize(std::move(segs));
  return set;
}

}  // namespace sastk
