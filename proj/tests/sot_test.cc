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
#include <cmath>
#include <map>
#include <random>

#include <doctest.h>

#include "sastk/error.h"
#include "sastk/sot.h"

using namespace sastk;

namespace {

using Strings = std::vector<std::string>;

// Utterances of random speakers with evenly spaced words named "u<i>w<j>".
struct Meeting {
  std::vector<UtteranceRecord> utts;
  std::vector<WordToken> words;
};

Meeting random_meeting(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> start(0.0, 30.0), len(0.5, 4.0);
  std::uniform_int_distribution<int> spk(0, 2), nwords(1, 5);
  Meeting m;
  while (m.utts.size() < 8) {
    const double s = std::round(start(rng) * 100) / 100;
    const double e = s + std::round(len(rng) * 100) / 100;
    const std::string who = std::string(1, static_cast<char>('A' + spk(rng)));
    // one speaker never overlaps itself
    if (std::any_of(m.utts.begin(), m.utts.end(), [&](const UtteranceRecord &u) {
          return u.speaker_id == who && u.start < e && s < u.end;
        }))
      continue;
    const std::size_t i = m.utts.size();
    m.utts.push_back({"m", who, s, e, ""});
    const int n = nwords(rng);
    for (int j = 0; j < n; ++j) {
      const double ws = s + (e - s) * j / n, we = s + (e - s) * (j + 1) / n;
      m.words.push_back({"m", who, ws, we, "u" + std::to_string(i) + "w" + std::to_string(j)});
    }
  }
  std::sort(m.words.begin(), m.words.end(),
            [](const WordToken &a, const WordToken &b) { return a.start < b.start; });
  return m;
}

}  // namespace

TEST_CASE("single speaker") {
  std::vector<UtteranceRecord> u{{"m", "A", 0, 2, "w1 w2"}};
  std::vector<WordToken> w{{"m", "A", 0, 1, "w1"}, {"m", "A", 1, 2, "w2"}};
  auto s = build_reference("m", {0, 2}, w, u);
  CHECK(s.tokens == Strings{"w1", "w2"});
  CHECK(s.speakers == Strings{"A", "A"});
  CHECK(speaker_count(s) == 1);
  CHECK(change_token_count(s) == 1);
}

TEST_CASE("fifo by turn start") {
  std::vector<UtteranceRecord> u{{"m", "A", 0, 2, "hi there"}, {"m", "B", 1, 3, "yes"}};
  std::vector<WordToken> w{{"m", "A", 0, 1, "hi"}, {"m", "B", 1.2, 2.8, "yes"},
                           {"m", "A", 1, 2, "there"}};
  auto s = build_reference("m", {0, 3}, w, u);
  CHECK(s.tokens == Strings{"hi", "there", "<sc>", "yes"});
  CHECK(s.speakers == Strings{"A", "A", "B", "B"});
  CHECK(sample_findings(s).empty());
}

TEST_CASE("returning speaker gets a second change token") {
  std::vector<UtteranceRecord> u{{"m", "A", 0, 1, ""}, {"m", "B", 2, 3, ""}, {"m", "A", 4, 5, ""}};
  std::vector<WordToken> w{{"m", "A", 0, 1, "a"}, {"m", "B", 2, 3, "b"}, {"m", "A", 4, 5, "c"}};
  auto s = build_reference("m", {0, 5}, w, u);
  CHECK(s.tokens == Strings{"a", "<sc>", "b", "<sc>", "c"});
  CHECK(s.speakers == Strings{"A", "B", "B", "A", "A"});
  CHECK(speaker_count(s) == 2);
  CHECK(change_token_count(s) == 3);
}

TEST_CASE("word selection by midpoint and missing utterances") {
  std::vector<UtteranceRecord> u{{"m", "A", 0, 4, ""}};
  std::vector<WordToken> w{{"m", "A", 0.0, 1.0, "in"}, {"m", "A", 1.8, 2.4, "edge"},
                           {"m", "A", 2.2, 3.0, "out"}};
  // midpoints 0.5, 2.1, 2.6 against the half-open segment [0, 2.1)
  auto s = build_reference("m", {0, 2.1}, w, u);
  CHECK(s.tokens == Strings{"in"});
  CHECK(build_reference("m", {3.5, 4}, w, u).tokens.empty());

  std::vector<WordToken> orphan{{"m", "B", 0.0, 1.0, "lost"}};
  try {
    build_reference("m", {0, 2}, orphan, u);
    FAIL("expected DataError");
  } catch (const DataError &e) {
    CHECK(std::string(e.what()).find("lost") != std::string::npos);
  }
}

TEST_CASE("reference properties on random meetings") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const Meeting m = random_meeting(rng);
    const Segment seg{5.0, 25.0};
    const SotSample s = build_reference("m", seg, m.words, m.utts);
    REQUIRE(s.tokens.size() == s.speakers.size());
    CHECK(sample_findings(s).empty());
    if (!s.tokens.empty()) CHECK_FALSE(is_speaker_change(s.tokens.front()));

    std::map<std::string, const WordToken *> by_text;
    for (const WordToken &w : m.words) by_text[w.text] = &w;
    std::size_t expected = 0;
    for (const WordToken &w : m.words) expected += seg.contains(0.5 * (w.start + w.end));

    std::size_t words = 0, changes = 0, differing_turn_pairs = 0;
    double last_turn_start = -1;
    int last_utt = -1;
    std::string last_spk;
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (is_speaker_change(s.tokens[i])) {
        ++changes;
        continue;
      }
      ++words;
      const WordToken *w = by_text.at(s.tokens[i]);
      CHECK(s.speakers[i] == w->speaker_id);
      const int utt = std::stoi(s.tokens[i].substr(1, s.tokens[i].find('w') - 1));
      if (utt != last_utt) {
        const double turn_start = m.utts[static_cast<std::size_t>(utt)].start;
        CHECK(turn_start >= last_turn_start);
        if (last_utt >= 0 && w->speaker_id != last_spk) ++differing_turn_pairs;
        last_turn_start = turn_start;
        last_utt = utt;
        last_spk = w->speaker_id;
      }
    }
    CHECK(words == expected);
    CHECK(changes == differing_turn_pairs);
  }
}

TEST_CASE("speaker counts") {
  SotSample none{"m", {0, 1}, {}, {}};
  CHECK(speaker_count(none) == 0);
  CHECK(change_token_count(none) == 0);
  SotSample alt{"m", {0, 1}, {"a", "<sc>", "b", "<sc>", "c", "<sc>", "d"},
                {"A", "B", "B", "A", "A", "B", "B"}};
  CHECK(speaker_count(alt) == 2);
  CHECK(change_token_count(alt) == 4);
}

TEST_CASE("split hypothesis") {
  auto ok = split_hypothesis("m", {0, 1}, {"a", "<SC>", "b"}, {"A", "B", "B"});
  CHECK(ok.sample.tokens == Strings{"a", "<sc>", "b"});
  CHECK(ok.warnings.empty());
  auto lead = split_hypothesis("m", {0, 1}, {"<sc>", "b", "<Sc>"}, {"B", "B", "C"});
  CHECK(lead.warnings.size() == 2);
  CHECK(lead.sample.tokens.size() == 3);
  CHECK_THROWS_AS(split_hypothesis("m", {0, 1}, {"a"}, {}), DataError);
}
