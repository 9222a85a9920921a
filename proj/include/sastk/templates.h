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

#ifndef SASTK_TEMPLATES_H_
#define SASTK_TEMPLATES_H_

// Speaker embedding templates: candidate segment selection, averaging and
// cosine similarity matrices.

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sastk/ingest.h"
#include "sastk/linalg.h"
#include "sastk/timeline.h"

namespace sastk {

struct CandidateFilter {
  bool allow_overlap = true;
  double min_len = 0.0;
  double max_len = std::numeric_limits<double>::infinity();
  // Keep only the n longest candidates; nullopt keeps all of them.
  std::optional<std::size_t> n_longest;

  // Throws ConfigError unless 0 <= min_len < max_len and n >= 1.
  void validate() const;
  std::string describe() const;
};

// Parses "all" or "n:<count>" / "<count>" into filter.n_longest.
void parse_selection(const std::string &text, CandidateFilter &filter);
// Parses "<min>:<max>" where either side may be empty.
void parse_length_range(const std::string &text, CandidateFilter &filter);

struct SpeakerTemplate {
  std::string speaker_id;
  std::vector<double> vector;  // unit L2 norm
  std::size_t num_segments = 0;
  double total_duration = 0.0;
};

// The speaker's segments (or its exclusive regions when overlap is not
// allowed) whose duration lies in [min_len, max_len], reduced to the n longest
// (ties go to the earlier start). Returned in time order. Throws DataError when
// nothing survives.
std::vector<Segment> select_candidates(const SpeakerTimelineSet &set,
                                       const std::string &speaker_id,
                                       const CandidateFilter &filter);

// Mean of the vectors, L2-normalized. Throws DataError for an empty list,
// ragged dimensions or a zero mean.
SpeakerTemplate average_template(const std::vector<EmbeddingRecord> &embeddings);

Matrix cosine_similarity_matrix(const std::vector<EmbeddingRecord> &embeddings);

using EmbeddingIndex = std::map<std::string, std::vector<double>>;

// One template per speaker that has candidates, in speaker id order.
// Candidates are looked up by segment_id(recording_id, segment); a missing
// id is a DataError naming it.
std::vector<SpeakerTemplate> build_all_templates(const std::string &recording_id,
                                                 const SpeakerTimelineSet &set,
                                                 const EmbeddingIndex &embeddings,
                                                 const CandidateFilter &filter);

// Segment ids every candidate would need, for requesting embeddings.
std::vector<std::string> candidate_ids(const std::string &recording_id,
                                       const SpeakerTimelineSet &set,
                                       const CandidateFilter &filter);

}  // namespace sastk

#endif  // SASTK_TEMPLATES_H_
