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

#ifndef SASTK_TIMELINE_H_
#define SASTK_TIMELINE_H_

// Time intervals, normalized interval lists and the set algebra used for
// speaker timelines (intersection, union, IoU, exclusive regions).

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace sastk {

// Two boundaries closer than this (seconds) are treated as the same instant.
inline constexpr double kTimeTolerance = 1e-6;

struct Segment {
  double start = 0.0;
  double end = 0.0;

  double duration() const { return end - start; }
  bool contains(double t) const { return start <= t && t < end; }
  bool operator==(const Segment &other) const = default;
};

// True when both ends are finite, start >= 0 and end > start.
bool is_valid(const Segment &segment);

// A sorted list of pairwise disjoint segments. Members that overlap or touch
// (within kTimeTolerance) are merged on construction.
class Timeline {
 public:
  Timeline() = default;

  // Throws DataError naming the index of the first invalid segment.
  static Timeline normalize(std::vector<Segment> raw);

  const std::vector<Segment> &segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }
  std::size_t size() const { return segments_.size(); }
  std::vector<Segment>::const_iterator begin() const { return segments_.begin(); }
  std::vector<Segment>::const_iterator end() const { return segments_.end(); }
  const Segment &operator[](std::size_t i) const { return segments_[i]; }

  bool operator==(const Timeline &other) const = default;

 private:
  explicit Timeline(std::vector<Segment> sorted_disjoint)
      : segments_(std::move(sorted_disjoint)) {}

  std::vector<Segment> segments_;
};

inline Timeline normalize(std::vector<Segment> raw) {
  return Timeline::normalize(std::move(raw));
}

double duration(const Timeline &t);
Timeline intersect(const Timeline &a, const Timeline &b);
Timeline unite(const Timeline &a, const Timeline &b);
// Portions of a not covered by b.
Timeline subtract(const Timeline &a, const Timeline &b);

// |a ∩ b| / |a ∪ b|; defined as 0 when both are empty.
double iou(const Timeline &a, const Timeline &b);

using SpeakerTimelineSet = std::map<std::string, Timeline>;

// The parts of one speaker's timeline during which nobody else speaks.
// Throws DataError for an unknown speaker.
Timeline exclusive_regions(const SpeakerTimelineSet &set,
                           const std::string &speaker_id);

// Union of every speaker's timeline.
Timeline union_all(const SpeakerTimelineSet &set);

// Regions where at least two speakers are active.
Timeline overlap_regions(const SpeakerTimelineSet &set);

// A maximal region in which exactly `speakers` speakers are active.
struct ConcurrencyClip {
  int speakers = 0;
  Segment span;
};

// All maximal constant-concurrency regions with at least one active speaker,
// in time order.
std::vector<ConcurrencyClip> concurrency_clips(const SpeakerTimelineSet &set);

struct OverlapHistogram {
  double bin_width = 0.0;
  double max_clip = 0.0;
  // Keyed by concurrency level (>= 2).
  std::map<int, std::vector<double>> clip_durations;
  std::map<int, std::vector<std::size_t>> bins;
};

// Durations of the clips with exactly k >= 2 simultaneous speakers, binned
// by duration. Clips longer than max_clip are left out.
OverlapHistogram overlap_histogram(const SpeakerTimelineSet &set,
                                   double bin_width, double max_clip);

}  // namespace sastk

#endif  // SASTK_TIMELINE_H_
