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

#include <algorithm>
#include <random>

#include <doctest.h>

#include "oracles.h"
#include "sastk/error.h"
#include "sastk/segmenter.h"

using namespace sastk;

namespace {

std::vector<Segment> segs(const Timeline &t) { return t.segments(); }

bool near(const std::vector<Segment> &a, const std::vector<Segment> &b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i].start - b[i].start) > 1e-9 || std::abs(a[i].end - b[i].end) > 1e-9)
      return false;
  return true;
}

}  // namespace

TEST_CASE("config validation") {
  SegmentationConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.silence_threshold = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.hop = 6;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK(parse_segmentation_method("gt") == SegmentationMethod::kGroundTruth);
  CHECK(to_string(SegmentationMethod::kFixedSize) == "fixed");
  CHECK_THROWS_AS(parse_segmentation_method("nope"), ConfigError);
}

TEST_CASE("vad hysteresis") {
  VadThresholds th;
  CHECK(binarize_vad({"m", 0.01, std::vector<double>(100, 0.0)}, th).empty());
  CHECK(near(segs(binarize_vad({"m", 0.01, std::vector<double>(100, 1.0)}, th)), {{0, 1.0}}));

  // Hand trace: frame 1 enters (0.9 >= 0.5), frame 3 leaves (0.2 < 0.4),
  // frame 4 re-enters, frame 5 leaves.
  VadThresholds hand{0.5, 0.4, 0.0, 0.0};
  CHECK(near(segs(binarize_vad({"m", 0.1, {0, 0.9, 0.9, 0.2, 0.9, 0}}, hand)),
             {{0.1, 0.3}, {0.4, 0.5}}));
  // between the thresholds the state is held
  CHECK(near(segs(binarize_vad({"m", 0.1, {0, 0.9, 0.45, 0.45, 0.9, 0}}, hand)), {{0.1, 0.5}}));
  CHECK(binarize_vad({"m", 0.1, {0, 0.45, 0.45, 0}}, hand).empty());

  // gap filling before dropping short runs
  VadThresholds fill{0.5, 0.4, 0.0, 0.15};
  CHECK(near(segs(binarize_vad({"m", 0.1, {0, 0.9, 0.9, 0.2, 0.9, 0}}, fill)), {{0.1, 0.5}}));
  VadThresholds drop{0.5, 0.4, 0.15, 0.0};
  CHECK(near(segs(binarize_vad({"m", 0.1, {0, 0.9, 0.9, 0.2, 0.9, 0}}, drop)), {{0.1, 0.3}}));

  CHECK_THROWS_AS(binarize_vad({"m", 0.1, {}}, th), DataError);
  CHECK_THROWS_AS(binarize_vad({"m", 0.1, {0.5}}, VadThresholds{0.3, 0.6, 0, 0}), ConfigError);
}

TEST_CASE("merge by silence") {
  const Timeline t = normalize({{0, 1}, {1.2, 2}});
  CHECK(near(segs(merge_by_silence(t, 0.3)), {{0, 2}}));
  CHECK(segs(merge_by_silence(t, 0.1)) == segs(t));
  CHECK(segs(merge_by_silence(t, 1e-9)) == segs(t));
  // strict: a gap equal to the threshold is kept
  CHECK(merge_by_silence(normalize({{0, 1}, {1.5, 2}}), 0.5).size() == 2);
}

TEST_CASE("merge by silence is monotone in the threshold") {
  std::mt19937_64 rng(21);
  const std::vector<double> grid{0.1, 0.3, 0.5, 0.7, 0.9};
  for (int trial = 0; trial < 200; ++trial) {
    const Timeline t = normalize(oracle::random_segments(rng, 30, 60.0));
    if (t.empty()) continue;
    std::size_t prev_count = t.size() + 1;
    double prev_mean = 0;
    for (double th : grid) {
      const Timeline m = merge_by_silence(t, th);
      const SegmentStats st = segment_stats(m.segments());
      CHECK(st.count <= prev_count);
      CHECK(st.mean_duration >= prev_mean - 1e-12);
      CHECK(m[0].start == t[0].start);
      CHECK(m[m.size() - 1].end == t[t.size() - 1].end);
      // merging only adds time
      CHECK(duration(m) >= duration(t) - 1e-12);
      prev_count = st.count;
      prev_mean = st.mean_duration;
    }
  }
}

TEST_CASE("fixed size chunks") {
  SegmentationConfig cfg;
  CHECK(near(fixed_size_chunks({0, 9}, Timeline(), {}, cfg),
             {{0, 5}, {2, 7}, {4, 9}, {6, 9}, {8, 9}}));

  // chunk end 5.0 inside the word (4.8,5.3) snaps to the word end; start 4.0
  // inside (3.8,4.3) snaps to the word start
  std::vector<WordToken> words{{"m", "A", 3.8, 4.3, "x"}, {"m", "A", 4.8, 5.3, "y"}};
  auto c = fixed_size_chunks({0, 9}, Timeline(), words, cfg);
  CHECK(std::find(c.begin(), c.end(), Segment{0, 5.3}) != c.end());
  CHECK(std::find(c.begin(), c.end(), Segment{3.8, 9}) != c.end());

  // end 5.0 inside overlap (4,6) with margin 2 moves to 8.0
  auto o = fixed_size_chunks({0, 20}, normalize({{4, 6}}), {}, cfg);
  CHECK(o.front() == Segment{0, 8});
  // with hop 5 the chunk starting at 5.0 moves back to 2.0
  cfg.hop = 5;
  auto o2 = fixed_size_chunks({0, 20}, normalize({{4, 6}}), {}, cfg);
  CHECK(std::find(o2.begin(), o2.end(), Segment{2, 10}) != o2.end());
}

TEST_CASE("fixed chunk boundaries avoid overlaps and words") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    SegmentationConfig cfg;
    const double span_end = 40.0;
    const Timeline overlaps = normalize(oracle::random_segments(rng, 4, span_end));
    std::vector<WordToken> words;
    for (const Segment &s : oracle::random_segments(rng, 20, span_end)) {
      if (s.duration() > 0.8) continue;
      words.push_back({"m", "A", s.start, s.end, "w"});
    }
    std::sort(words.begin(), words.end(),
              [](const WordToken &a, const WordToken &b) { return a.start < b.start; });
    auto inside = [&](double t) {
      for (const Segment &r : overlaps)
        if (r.start + kTimeTolerance < t && t < r.end - kTimeTolerance) return true;
      for (const WordToken &w : words)
        if (w.start + kTimeTolerance < t && t < w.end - kTimeTolerance) return true;
      return false;
    };
    const auto chunks = fixed_size_chunks({0, span_end}, overlaps, words, cfg);
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      CHECK(chunks[i].end > chunks[i].start);
      CHECK_FALSE(inside(chunks[i].start));
      CHECK_FALSE(inside(chunks[i].end));
      if (i > 0) CHECK_FALSE(chunks[i] == chunks[i - 1]);
    }
  }
}

TEST_CASE("utterance groups") {
  SegmentationConfig cfg;
  CHECK(utterance_groups({{"m", "A", 0, 8, ""}}, cfg) == std::vector<Segment>{{0, 8}});
  std::vector<UtteranceRecord> u{{"m", "A", 0, 10, ""}, {"m", "B", 5, 20, ""}, {"m", "C", 30, 40, ""}};
  CHECK(utterance_groups(u, cfg) == std::vector<Segment>{{0, 20}, {30, 40}});
  std::reverse(u.begin(), u.end());
  for (auto &x : u) x.speaker_id = "Z";
  CHECK(utterance_groups(u, cfg) == std::vector<Segment>{{0, 20}, {30, 40}});
  CHECK(utterance_groups({{"m", "A", 0, 120, ""}}, cfg).empty());
}

TEST_CASE("segment stats") {
  CHECK_THROWS_AS(segment_stats({}), DataError);
  auto a = segment_stats({{0, 2}});
  CHECK(a.count == 1);
  CHECK(a.mean_duration == 2.0);
  auto b = segment_stats({{0, 1}, {2, 5}});
  CHECK(b.count == 2);
  CHECK(b.mean_duration == 2.0);
}
