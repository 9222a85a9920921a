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
#include <filesystem>
#include <numeric>
#include <random>
#include <set>

#include <doctest.h>

#include "oracles.h"
#include "sastk/error.h"
#include "sastk/remap.h"

using namespace sastk;

namespace {

SpeakerTimelineSet random_meeting(std::mt19937_64 &rng, int speakers) {
  // Speakers take turns in consecutive blocks so every one has exclusive speech.
  std::uniform_real_distribution<double> len(1.0, 6.0);
  std::uniform_int_distribution<int> who(0, speakers - 1);
  std::map<std::string, std::vector<Segment>> raw;
  double t = 0;
  for (int s = 0; s < speakers; ++s) raw["S" + std::to_string(s)];
  for (int i = 0; i < 30; ++i) {
    const double d = std::round(len(rng) * 1000) / 1000;
    const int s = i < speakers ? i : who(rng);
    raw["S" + std::to_string(s)].push_back({t, t + d});
    t += d + 0.25;
  }
  SpeakerTimelineSet out;
  for (auto &[k, v] : raw) out[k] = normalize(v);
  return out;
}

double brute_best_assignment(const Matrix &cost) {
  std::vector<std::size_t> p(cost.rows());
  std::iota(p.begin(), p.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0;
    for (std::size_t i = 0; i < p.size(); ++i) c += cost(i, p[i]);
    best = std::min(best, c);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

}  // namespace

TEST_CASE("identity and permutation") {
  std::mt19937_64 rng(2);
  for (RemapMode mode : {RemapMode::kLiteral, RemapMode::kOneToOne}) {
    auto ref = random_meeting(rng, 4);
    auto m = remap_ids(ref, ref, mode);
    CHECK(m.num_estimated == 4);
    CHECK(m.num_reference == 4);
    for (const auto &[est, e] : m.pairs) {
      CHECK(e.reference_id == est);
      CHECK(e.iou == doctest::Approx(1.0));
      CHECK(e.flag == "ok");
    }
    SpeakerTimelineSet sd{{"x", ref.at("S2")}, {"y", ref.at("S0")}, {"z", ref.at("S3")},
                          {"w", ref.at("S1")}};
    auto p = remap_ids(sd, ref, mode);
    CHECK(p.pairs.at("x").reference_id == "S2");
    CHECK(p.pairs.at("y").reference_id == "S0");
    CHECK(p.pairs.at("z").reference_id == "S3");
    CHECK(p.pairs.at("w").reference_id == "S1");
  }
}

TEST_CASE("iou by hand") {
  SpeakerTimelineSet sd{{"A'", normalize({{0, 10}})}, {"B'", normalize({{20, 30}})}};
  SpeakerTimelineSet ref{{"A", normalize({{0, 9}})}, {"B", normalize({{21, 30}})}};
  auto m = remap_ids(sd, ref, RemapMode::kLiteral);
  CHECK(m.pairs.at("A'").reference_id == "A");
  CHECK(m.pairs.at("A'").iou == doctest::Approx(0.9));
  CHECK(m.pairs.at("B'").reference_id == "B");
  CHECK(m.pairs.at("B'").iou == doctest::Approx(0.9));
  auto iou = iou_matrix(sd, ref);
  CHECK(iou(0, 1) == 0.0);
  CHECK(iou(1, 0) == 0.0);
}

TEST_CASE("estimated lists use exclusive speech only") {
  // A' spends half its time overlapped by B'; the overlap is not counted.
  SpeakerTimelineSet sd{{"A'", normalize({{0, 10}})}, {"B'", normalize({{5, 20}})}};
  SpeakerTimelineSet ref{{"A", normalize({{0, 5}})}, {"B", normalize({{5, 20}})}};
  auto iou = iou_matrix(sd, ref);
  CHECK(iou(0, 0) == doctest::Approx(1.0));
  CHECK(iou(1, 1) == doctest::Approx(10.0 / 15.0));
}

TEST_CASE("degenerate estimated speakers") {
  SpeakerTimelineSet sd{{"a", normalize({{2, 3}})}, {"b", normalize({{0, 10}})},
                        {"c", normalize({{50, 60}})}};
  SpeakerTimelineSet ref{{"Y", normalize({{0, 10}})}, {"X", normalize({{20, 30}})}};
  auto m = remap_ids(sd, ref, RemapMode::kLiteral);
  CHECK(m.pairs.at("a") == MappingEntry{"X", 0.0, "empty"});
  CHECK(m.pairs.at("c").flag == "no-overlap");
  CHECK(m.pairs.at("c").reference_id == "X");
  CHECK(m.pairs.at("b").reference_id == "Y");
}

TEST_CASE("one to one leaves extra speakers unmatched") {
  SpeakerTimelineSet ref{{"A", normalize({{0, 10}})}, {"B", normalize({{20, 30}})}};
  SpeakerTimelineSet sd{{"p", normalize({{0, 5}})}, {"q", normalize({{5, 10}})},
                        {"r", normalize({{20, 30}})}};
  auto lit = remap_ids(sd, ref, RemapMode::kLiteral);
  CHECK(lit.pairs.at("p").reference_id == "A");
  CHECK(lit.pairs.at("q").reference_id == "A");
  auto one = remap_ids(sd, ref, RemapMode::kOneToOne);
  CHECK(one.pairs.at("p").reference_id == "A");
  CHECK(one.pairs.at("q") == MappingEntry{"unk00", 0.0, "unmatched"});
  CHECK(one.pairs.at("r").reference_id == "B");
}

TEST_CASE("ties go to the smallest reference id") {
  SpeakerTimelineSet sd{{"e", normalize({{0, 10}})}};
  SpeakerTimelineSet ref{{"Z", normalize({{0, 5}})}, {"M", normalize({{5, 10}})}};
  CHECK(remap_ids(sd, ref, RemapMode::kLiteral).pairs.at("e").reference_id == "M");
}

TEST_CASE("hungarian matches exhaustive search") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  for (std::size_t n = 1; n <= 7; ++n)
    for (int trial = 0; trial < 30; ++trial) {
      Matrix c(n, n);
      for (double &x : c.data()) x = trial % 3 == 0 ? std::round(u(rng) * 3) : u(rng);
      auto a = hungarian(c);
      std::set<std::size_t> cols(a.begin(), a.end());
      CHECK(cols.size() == n);
      double total = 0;
      for (std::size_t i = 0; i < n; ++i) total += c(i, a[i]);
      CHECK(total == doctest::Approx(brute_best_assignment(c)));
    }
}

TEST_CASE("mapping properties on random meetings") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    auto ref = random_meeting(rng, 2 + trial % 4);
    SpeakerTimelineSet sd;
    // relabel and jitter every boundary by at most 20 ms
    std::uniform_real_distribution<double> jitter(-0.02, 0.02);
    for (const auto &[k, t] : ref) {
      std::vector<Segment> segs;
      for (Segment s : t.segments())
        segs.push_back({std::max(0.0, s.start + jitter(rng)), s.end + jitter(rng)});
      sd["d" + k] = normalize(segs);
    }
    for (RemapMode mode : {RemapMode::kLiteral, RemapMode::kOneToOne}) {
      auto m = remap_ids(sd, ref, mode);
      REQUIRE(m.pairs.size() == sd.size());
      std::set<std::string> targets;
      for (const auto &[est, e] : m.pairs) {
        CHECK(e.reference_id == est.substr(1));
        CHECK(e.iou >= 0.0);
        CHECK(e.iou <= 1.0);
        targets.insert(e.reference_id);
      }
      if (mode == RemapMode::kOneToOne) CHECK(targets.size() == m.pairs.size());
    }
    // empty reference speakers change nothing in literal mode
    auto padded = ref;
    padded["A-empty"] = Timeline{};
    padded["zz-empty"] = Timeline{};
    auto a = remap_ids(sd, ref, RemapMode::kLiteral);
    auto b = remap_ids(sd, padded, RemapMode::kLiteral);
    CHECK(a.pairs == b.pairs);
  }
}

TEST_CASE("applying a mapping") {
  SotSample s{"m", {0, 4}, {"a", "<sc>", "b"}, {"x", "y", "y"}};
  IdMapping swap;
  swap.pairs = {{"x", {"B", 1, "ok"}}, {"y", {"A", 1, "ok"}}};
  auto out = apply_mapping(s, swap);
  CHECK(out.tokens == s.tokens);
  CHECK(out.speakers == std::vector<std::string>{"B", "A", "A"});
  swap.pairs.erase("y");
  try {
    apply_mapping(s, swap);
    FAIL("expected DataError");
  } catch (const DataError &e) {
    CHECK(std::string(e.what()).find("'y'") != std::string::npos);
  }
}

TEST_CASE("mapping file round trip") {
  RecordingMappings all;
  all["r1"].num_estimated = 2;
  all["r1"].num_reference = 3;
  all["r1"].pairs = {{"spk00", {"A", 0.75, "ok"}}, {"spk01", {"unk00", 0.0, "unmatched"}}};
  all["r2"].num_estimated = 1;
  all["r2"].num_reference = 1;
  all["r2"].pairs = {{"spk00", {"B", 0.123456, "ok"}}};
  const auto path = std::filesystem::temp_directory_path() / "sastk_remap_test.txt";
  write_mappings(all, path);
  CHECK(read_mappings(path) == all);
  CHECK(format_mappings(all).find("map\tr1\tspk00\tA\t0.750000\tok\n") != std::string::npos);
  std::filesystem::remove(path);
  CHECK(parse_remap_mode("one_to_one") == RemapMode::kOneToOne);
  CHECK(to_string(RemapMode::kLiteral) == "literal");
  CHECK_THROWS_AS(parse_remap_mode("greedy"), ConfigError);
}
