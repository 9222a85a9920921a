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

#include "sastk/segmenter.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <fmt/format.h>

#include "sastk/error.h"

namespace sastk {

SegmentationMethod parse_segmentation_method(const std::string &name) {
  if (name == "fixed") return SegmentationMethod::kFixedSize;
  if (name == "gt") return SegmentationMethod::kGroundTruth;
  if (name == "vad") return SegmentationMethod::kVadMerge;
  throw ConfigError(fmt::format("unknown segmentation method '{}'", name));
}

std::string to_string(SegmentationMethod method) {
  switch (method) {
    case SegmentationMethod::kFixedSize: return "fixed";
    case SegmentationMethod::kGroundTruth: return "gt";
    case SegmentationMethod::kVadMerge: return "vad";
  }
  return "?";
}

void SegmentationConfig::validate() const {
  if (!(hop > 0.0 && chunk >= hop))
    throw ConfigError(fmt::format("need chunk >= hop > 0 (chunk {}, hop {})", chunk, hop));
  if (!(silence_threshold > 0.0))
    throw ConfigError(
        fmt::format("silence threshold must be positive, got {}", silence_threshold));
  if (!(max_group > 0.0))
    throw ConfigError(fmt::format("max group must be positive, got {}", max_group));
  if (!(overlap_margin >= 0.0))
    throw ConfigError(fmt::format("overlap margin must be >= 0, got {}", overlap_margin));
}

Timeline binarize_vad(const VadStream &stream, const VadThresholds &th) {
  if (stream.probabilities.empty())
    throw DataError(fmt::format("empty VAD stream for '{}'", stream.recording_id));
  if (!(stream.frame_period > 0.0))
    throw DataError(fmt::format("non-positive frame period for '{}'", stream.recording_id));
  if (!(0.0 <= th.offset && th.offset <= th.onset && th.onset <= 1.0))
    throw ConfigError(fmt::format("need 0 <= offset <= onset <= 1 (onset {}, offset {})",
                                  th.onset, th.offset));
  if (th.min_speech < 0.0 || th.min_silence < 0.0)
    throw ConfigError("minimum speech/silence durations must be >= 0");

  const double fp = stream.frame_period;
  std::vector<Segment> runs;
  bool speech = false;
  std::size_t begin = 0;
  const std::size_t n = stream.probabilities.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double p = stream.probabilities[i];
    if (!speech && p >= th.onset) {
      speech = true;
      begin = i;
    } else if (speech && p < th.offset) {
      speech = false;
      runs.push_back({static_cast<double>(begin) * fp, static_cast<double>(i) * fp});
    }
  }
  if (speech)
    runs.push_back({static_cast<double>(begin) * fp, static_cast<double>(n) * fp});

  Timeline filled = Timeline::normalize(std::move(runs));
  if (th.min_silence > 0.0) filled = merge_by_silence(filled, th.min_silence);
  std::vector<Segment> kept;
  for (const Segment &s : filled)
    if (s.duration() >= th.min_speech) kept.push_back(s);
  return Timeline::normalize(std::move(kept));
}

Timeline merge_by_silence(const Timeline &segments, double threshold) {
  std::vector<Segment> out;
  for (const Segment &s : segments) {
    if (!out.empty() && s.start - out.back().end < threshold - kTimeTolerance)
      out.back().end = std::max(out.back().end, s.end);
    else
      out.push_back(s);
  }
  return Timeline::normalize(std::move(out));
}

namespace {

// The region strictly containing t, if any.
const Segment *strictly_inside(const std::vector<Segment> &regions, double t) {
  for (const Segment &r : regions)
    if (r.start + kTimeTolerance < t && t < r.end - kTimeTolerance) return &r;
  return nullptr;
}

}  // namespace

std::vector<Segment> fixed_size_chunks(const Segment &span,
                                       const Timeline &overlap_regions,
                                       const std::vector<WordToken> &words,
                                       const SegmentationConfig &cfg) {
  cfg.validate();
  if (!is_valid(span))
    throw DataError(fmt::format("invalid recording span ({}, {})", span.start, span.end));
  std::vector<Segment> word_spans;
  word_spans.reserve(words.size());
  for (const WordToken &w : words) word_spans.push_back({w.start, w.end});
  const std::vector<Segment> &overlaps = overlap_regions.segments();

  std::vector<Segment> chunks;
  for (std::size_t k = 0;; ++k) {
    const double start = span.start + static_cast<double>(k) * cfg.hop;
    if (start >= span.end - kTimeTolerance) break;
    double lo = start;
    double hi = std::min(start + cfg.chunk, span.end);
    for (bool moved = true; moved;) {
      moved = false;
      if (const Segment *r = strictly_inside(overlaps, lo)) {
        lo = std::max(span.start, r->start - cfg.overlap_margin);
        moved = true;
      }
      if (const Segment *r = strictly_inside(overlaps, hi)) {
        hi = std::min(span.end, r->end + cfg.overlap_margin);
        moved = true;
      }
      if (const Segment *w = strictly_inside(word_spans, lo)) {
        lo = std::max(span.start, w->start);
        moved = true;
      }
      if (const Segment *w = strictly_inside(word_spans, hi)) {
        hi = std::min(span.end, w->end);
        moved = true;
      }
    }
    if (hi - lo > kTimeTolerance) chunks.push_back({lo, hi});
  }
  std::sort(chunks.begin(), chunks.end(), [](const Segment &a, const Segment &b) {
    return std::tie(a.start, a.end) < std::tie(b.start, b.end);
  });
  auto same = [](const Segment &a, const Segment &b) {
    return std::abs(a.start - b.start) <= kTimeTolerance &&
           std::abs(a.end - b.end) <= kTimeTolerance;
  };
  chunks.erase(std::unique(chunks.begin(), chunks.end(), same), chunks.end());
  return chunks;
}

std::vector<Segment> utterance_groups(const std::vector<UtteranceRecord> &utterances,
                                      const SegmentationConfig &cfg) {
  if (!(cfg.max_group > 0.0))
    throw ConfigError(fmt::format("max group must be positive, got {}", cfg.max_group));
  std::vector<Segment> all;
  all.reserve(utterances.size());
  for (const UtteranceRecord &u : utterances) all.push_back({u.start, u.end});
  std::vector<Segment> groups;
  for (const Segment &g : Timeline::normalize(std::move(all)))
    if (g.duration() <= cfg.max_group + kTimeTolerance) groups.push_back(g);
  return groups;
}

SegmentStats segment_stats(const std::vector<Segment> &segments) {
  if (segments.empty())
    throw DataError("segment statistics of an empty list are undefined");
  double total = 0.0;
  for (const Segment &s : segments) total += s.duration();
  return {segments.size(), total / static_cast<double>(segments.size())};
}

}  // namespace sastk
