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

#ifndef SASTK_DIARIZER_H_
#define SASTK_DIARIZER_H_

// Spectral clustering of per-segment speaker embeddings: pruned cosine
// affinity, symmetric normalized Laplacian, eigengap speaker count and
// k-means on the row-normalized spectral embedding.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sastk/ingest.h"
#include "sastk/linalg.h"
#include "sastk/timeline.h"

namespace sastk {

struct DiarizationConfig {
  std::size_t max_speakers = 8;
  std::optional<std::size_t> fixed_k;
  // Per-row pruning level. Keeping the top 20% leaves mostly same-speaker
  // neighbours for up to about four balanced speakers.
  double affinity_percentile = 80.0;
  int kmeans_restarts = 10;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

struct DiarizationResult {
  std::vector<int> labels;  // cluster ids numbered by first appearance
  std::size_t k = 1;
  std::vector<double> eigenvalues;
};

// Cosine similarities mapped to [0,1] by (1+cos)/2; in each row the
// off-diagonal entries below the row's percentile are zeroed; the result is
// symmetrized by elementwise max with a unit diagonal. Needs >= 2 rows.
Matrix build_affinity(const Matrix &embeddings, double percentile);

// Eigenpairs of I - D^-1/2 A D^-1/2, eigenvalues ascending. Throws DataError
// for a node of zero degree.
EigenDecomposition eigendecompose_laplacian(const Matrix &affinity);

// argmax over k in 1..max_speakers of lambda[k] - lambda[k-1] (0-based
// lambda), smallest k on ties; 1 when fewer than two eigenvalues.
std::size_t estimate_k(const std::vector<double> &eigenvalues,
                       std::size_t max_speakers);

struct KMeansResult {
  std::vector<int> labels;
  double inertia = 0.0;
};

// Lloyd iterations from k-means++ seeds, best inertia over `restarts` runs.
KMeansResult kmeans(const Matrix &points, std::size_t k, int restarts,
                    std::uint64_t seed);

DiarizationResult cluster(const Matrix &embeddings, const DiarizationConfig &cfg);

// Relabels cluster ids in order of first appearance.
std::vector<int> canonical_labels(const std::vector<int> &labels);

// Per-cluster timelines named spk00, spk01, ... in order of first appearance.
SpeakerTimelineSet to_timeline_set(const DiarizationResult &result,
                                   const std::vector<Segment> &segments);

}  // namespace sastk

#endif  // SASTK_DIARIZER_H_
