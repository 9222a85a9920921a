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

#include "sastk/templates.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "sastk/error.h"
#include "sastk/kernels.h"

namespace sastk {

void CandidateFilter::validate() const {
  if (!(min_len >= 0.0 && min_len < max_len))
    throw ConfigError(fmt::format("need 0 <= min_len < max_len, got {}:{}", min_len, max_len));
  if (n_longest && *n_longest == 0)
    throw ConfigError("n_longest selection needs n >= 1");
}

std::string CandidateFilter::describe() const {
  return fmt::format("{} {}-{} s {}", allow_overlap ? "overlap" : "no-overlap", min_len,
                     max_len, n_longest ? fmt::format("{} longest", *n_longest) : "all");
}

namespace {

double parse_bound(std::string_view s, double fallback) {
  if (s.empty()) return fallback;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(fmt::format("cannot parse length bound '{}'", s));
  return v;
}

}  // namespace

void parse_selection(const std::string &text, CandidateFilter &filter) {
  if (text == "all") {
    filter.n_longest.reset();
    return;
  }
  std::string_view s = text;
  if (s.rfind("n:", 0) == 0) s.remove_prefix(2);
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc() || ptr != s.data() + s.size() || n == 0)
    throw ConfigError(fmt::format("selection must be 'all' or 'n:<count>', got '{}'", text));
  filter.n_longest = n;
}

void parse_length_range(const std::string &text, CandidateFilter &filter) {
  auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ConfigError(fmt::format("length range must be '<min>:<max>', got '{}'", text));
  std::string_view s = text;
  filter.min_len = parse_bound(s.substr(0, colon), 0.0);
  filter.max_len =
      parse_bound(s.substr(colon + 1), std::numeric_limits<double>::infinity());
}

std::vector<Segment> select_candidates(const SpeakerTimelineSet &set,
                                       const std::string &speaker_id,
                                       const CandidateFilter &filter) {
  filter.validate();
  auto it = set.find(speaker_id);
  if (it == set.end())
    throw DataError(fmt::format("unknown speaker '{}'", speaker_id));
  const Timeline source =
      filter.allow_overlap ? it->second : exclusive_regions(set, speaker_id);
  std::vector<Segment> kept;
  for (const Segment &s : source) {
    const double d = s.duration();
    if (d >= filter.min_len - kTimeTolerance && d <= filter.max_len + kTimeTolerance)
      kept.push_back(s);
  }
  if (filter.n_longest && kept.size() > *filter.n_longest) {
    std::stable_sort(kept.begin(), kept.end(), [](const Segment &a, const Segment &b) {
      if (a.duration() != b.duration()) return a.duration() > b.duration();
      return a.start < b.start;
    });
    kept.resize(*filter.n_longest);
    std::sort(kept.begin(), kept.end(),
              [](const Segment &a, const Segment &b) { return a.start < b.start; });
  }
  if (kept.empty())
    throw DataError(fmt::format("no candidate segments for speaker '{}' with filter [{}]",
                                speaker_id, filter.describe()));
  return kept;
}

SpeakerTemplate average_template(const std::vector<EmbeddingRecord> &embeddings) {
  if (embeddings.empty()) throw DataError("cannot average an empty embedding list");
  const std::size_t dim = embeddings.front().vector.size();
  if (dim == 0) throw DataError("embedding dimension is zero");
  std::vector<double> mean(dim, 0.0);
  for (const EmbeddingRecord &e : embeddings) {
    if (e.vector.size() != dim)
      throw DataError(fmt::format("embedding '{}' has dimension {}, expected {}", e.id,
                                  e.vector.size(), dim));
    for (std::size_t d = 0; d < dim; ++d) mean[d] += e.vector[d];
  }
  const double inv = 1.0 / static_cast<double>(embeddings.size());
  for (double &v : mean) v *= inv;
  const double norm = l2_norm(mean);
  if (!(norm > 1e-12)) throw DataError("mean embedding has zero norm");
  for (double &v : mean) v /= norm;
  SpeakerTemplate t;
  t.vector = std::move(mean);
  t.num_segments = embeddings.size();
  return t;
}

Matrix cosine_similarity_matrix(const std::vector<EmbeddingRecord> &embeddings) {
  if (embeddings.empty()) throw DataError("similarity matrix of an empty list");
  std::vector<std::vector<double>> rows;
  rows.reserve(embeddings.size());
  for (const EmbeddingRecord &e : embeddings) rows.push_back(e.vector);
  return kernels::cosine_similarity(Matrix::from_rows(rows));
}

std::vector<SpeakerTemplate> build_all_templates(const std::string &recording_id,
                                                 const SpeakerTimelineSet &set,
                                                 const EmbeddingIndex &embeddings,
                                                 const CandidateFilter &filter) {
  std::vector<SpeakerTemplate> out;
  for (const auto &[speaker, timeline] : set) {
    std::vector<Segment> candidates;
    try {
      candidates = select_candidates(set, speaker, filter);
    } catch (const DataError &) {
      continue;  // speakers without candidates get no template
    }
    std::vector<EmbeddingRecord> records;
    double total = 0.0;
    for (const Segment &s : candidates) {
      const std::string id = segment_id(recording_id, s);
      auto it = embeddings.find(id);
      if (it == embeddings.end())
        throw DataError(fmt::format("missing embedding for candidate '{}'", id));
      records.push_back({id, it->second});
      total += s.duration();
    }
    SpeakerTemplate t = average_template(records);
    t.speaker_id = speaker;
    t.total_duration = total;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<std::string> candidate_ids(const std::string &recording_id,
                                       const SpeakerTimelineSet &set,
                                       const CandidateFilter &filter) {
  std::vector<std::string> ids;
  for (const auto &[speaker, timeline] : set) {
    try {
      for (const Segment &s : select_candidates(set, speaker, filter))
        ids.push_back(segment_id(recording_id, s));
    } catch (const DataError &) {
    }
  }
  return ids;
}

}  // namespace sastk
