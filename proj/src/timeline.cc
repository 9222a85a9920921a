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

#include "sastk/timeline.h"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "sastk/error.h"

namespace sastk {

bool is_valid(const Segment &segment) {
  return std::isfinite(segment.start) && std::isfinite(segment.end) &&
         segment.start >= 0.0 && segment.end > segment.start;
}

Timeline Timeline::normalize(std::vector<Segment> raw) {
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!is_valid(raw[i]))
      throw DataError(fmt::format("invalid segment at index {}: ({}, {})", i,
                                  raw[i].start, raw[i].end));
  }
  std::sort(raw.begin(), raw.end(), [](const Segment &a, const Segment &b) {
    return a.start < b.start || (a.start == b.start && a.end < b.end);
  });
  std::vector<Segment> merged;
  merged.reserve(raw.size());
  for (const Segment &s : raw) {
    if (!merged.empty() && s.start <= merged.back().end + kTimeTolerance)
      merged.back().end = std::max(merged.back().end, s.end);
    else
      merged.push_back(s);
  }
  return Timeline(std::move(merged));
}

double duration(const Timeline &t) {
  double total = 0.0;
  for (const Segment &s : t) total += s.duration();
  return total;
}

Timeline intersect(const Timeline &a, const Timeline &b) {
  std::vector<Segment> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    double lo = std::max(a[i].start, b[j].start);
    double hi = std::min(a[i].end, b[j].end);
    if (hi - lo > kTimeTolerance) out.push_back({lo, hi});
    if (a[i].end < b[j].end)
      ++i;
    else
      ++j;
  }
  return Timeline::normalize(std::move(out));
}

Timeline unite(const Timeline &a, const Timeline &b) {
  std::vector<Segment> all(a.segments());
  all.insert(all.end(), b.begin(), b.end());
  return Timeline::normalize(std::move(all));
}

Timeline subtract(const Timeline &a, const Timeline &b) {
  std::vector<Segment> out;
  std::size_t j = 0;
  for (const Segment &s : a) {
    double cursor = s.start;
    while (j < b.size() && b[j].end <= cursor) ++j;
    std::size_t k = j;
    while (k < b.size() && b[k].start < s.end) {
      if (b[k].start - cursor > kTimeTolerance) out.push_back({cursor, b[k].start});
      cursor = std::max(cursor, b[k].end);
      ++k;
    }
    if (s.end - cursor > kTimeTolerance) out.push_back({cursor, s.end});
  }
  return Timeline::normalize(std::move(out));
}

double iou(const Timeline &a, const Timeline &b) {
  double u = duration(unite(a, b));
  if (u <= 0.0) return 0.0;
  double r = duration(intersect(a, b)) / u;
  return std::clamp(r, 0.0, 1.0);
}

Timeline exclusive_regions(const SpeakerTimelineSet &set,
                           const std::string &speaker_id) {
  auto it = set.find(speaker_id);
  if (it == set.end())
    throw DataError(fmt::format("unknown speaker '{}'", speaker_id));
  std::vector<Segment> others;
  for (const auto &[id, timeline] : set) {
    if (id == speaker_id) continue;
    others.insert(others.end(), timeline.begin(), timeline.end());
  }
  return subtract(it->second, Timeline::normalize(std::move(others)));
}

Timeline union_all(const SpeakerTimelineSet &set) {
  std::vector<Segment> all;
  for (const auto &[id, timeline] : set)
    all.insert(all.end(), timeline.begin(), timeline.end());
  return Timeline::normalize(std::move(all));
}

namespace {

bool covers(const Timeline &t, double time) {
  auto it = std::upper_bound(
      t.begin(), t.end(), time,
      [](double value, const Segment &s) { return value < s.start; });
  if (it == t.begin()) return false;
  --it;
  return time < it->end;
}

}  // namespace

std::vector<ConcurrencyClip> concurrency_clips(const SpeakerTimelineSet &set) {
  std::set<double> points;
  for (const auto &[id, timeline] : set) {
    for (const Segment &s : timeline) {
      points.insert(s.start);
      points.insert(s.end);
    }
  }
  std::vector<ConcurrencyClip> clips;
  if (points.size() < 2) return clips;
  auto prev = points.begin();
  for (auto it = std::next(points.begin()); it != points.end(); prev = it, ++it) {
    double lo = *prev, hi = *it;
    if (hi - lo <= kTimeTolerance) continue;
    double mid = 0.5 * (lo + hi);
    int active = 0;
    for (const auto &[id, timeline] : set) active += covers(timeline, mid) ? 1 : 0;
    if (active == 0) continue;
    if (!clips.empty() && clips.back().speakers == active &&
        lo - clips.back().span.end <= kTimeTolerance)
      clips.back().span.end = hi;
    else
      clips.push_back({active, {lo, hi}});
  }
  return clips;
}

Timeline overlap_regions(const SpeakerTimelineSet &set) {
  std::vector<Segment> out;
  for (const ConcurrencyClip &c : concurrency_clips(set))
    if (c.speakers >= 2) out.push_back(c.span);
  return Timeline::normalize(std::move(out));
}

OverlapHistogram overlap_histogram(const SpeakerTimelineSet &set,
                                   double bin_width, double max_clip) {
  if (!(bin_width > 0.0))
    throw ConfigError(fmt::format("bin width must be positive, got {}", bin_width));
  if (!(max_clip > 0.0))
    throw ConfigError(fmt::format("max clip must be positive, got {}", max_clip));
  OverlapHistogram h;
  h.bin_width = bin_width;
  h.max_clip = max_clip;
  const auto num_bins =
      static_cast<std::size_t>(std::ceil(max_clip / bin_width - 1e-12));
  for (const ConcurrencyClip &c : concurrency_clips(set)) {
    if (c.speakers < 2) continue;
    double d = c.span.duration();
    if (d > max_clip) continue;
    h.clip_durations[c.speakers].push_back(d);
    auto &bins = h.bins[c.speakers];
    if (bins.empty()) bins.assign(num_bins, 0);
    auto bin = std::min(static_cast<std::size_t>(d / bin_width), num_bins - 1);
    ++bins[bin];
  }
  return h;
}

}  // namespace sastk
