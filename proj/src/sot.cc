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

#include "sastk/sot.h"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "sastk/error.h"

namespace sastk {

namespace {

struct Turn {
  const UtteranceRecord *utterance = nullptr;
  std::vector<const WordToken *> words;
};

const UtteranceRecord *enclosing_utterance(const WordToken &w,
                                           const std::vector<UtteranceRecord> &utts) {
  const UtteranceRecord *best = nullptr;
  for (const UtteranceRecord &u : utts) {
    if (u.recording_id != w.recording_id || u.speaker_id != w.speaker_id) continue;
    if (u.start - kTimeTolerance <= w.start && w.end <= u.end + kTimeTolerance) {
      if (best == nullptr || u.start < best->start) best = &u;
    }
  }
  return best;
}

}  // namespace

bool is_speaker_change(const std::string &token) { return token == kSpeakerChange; }

SotSample build_reference(const std::string &recording_id, const Segment &segment,
                          const std::vector<WordToken> &words,
                          const std::vector<UtteranceRecord> &utterances) {
  if (!is_valid(segment))
    throw DataError(fmt::format("invalid segment ({}, {})", segment.start, segment.end));
  std::vector<Turn> turns;
  for (const WordToken &w : words) {
    if (w.recording_id != recording_id) continue;
    if (!segment.contains(0.5 * (w.start + w.end))) continue;
    const UtteranceRecord *u = enclosing_utterance(w, utterances);
    if (u == nullptr)
      throw DataError(fmt::format("word '{}' of speaker {} at {:.3f}-{:.3f} in {} "
                                  "has no enclosing utterance",
                                  w.text, w.speaker_id, w.start, w.end, recording_id));
    auto it = std::find_if(turns.begin(), turns.end(),
                           [u](const Turn &t) { return t.utterance == u; });
    if (it == turns.end()) {
      turns.push_back({u, {}});
      it = std::prev(turns.end());
    }
    it->words.push_back(&w);
  }
  std::stable_sort(turns.begin(), turns.end(), [](const Turn &a, const Turn &b) {
    return std::tie(a.utterance->start, a.utterance->end, a.utterance->speaker_id) <
           std::tie(b.utterance->start, b.utterance->end, b.utterance->speaker_id);
  });

  SotSample sample;
  sample.recording_id = recording_id;
  sample.segment = segment;
  for (Turn &turn : turns) {
    std::stable_sort(turn.words.begin(), turn.words.end(),
                     [](const WordToken *a, const WordToken *b) {
                       return std::tie(a->start, a->end) < std::tie(b->start, b->end);
                     });
    const std::string &spk = turn.utterance->speaker_id;
    if (!sample.speakers.empty() && sample.speakers.back() != spk) {
      sample.tokens.emplace_back(kSpeakerChange);
      sample.speakers.push_back(spk);
    }
    for (const WordToken *w : turn.words) {
      sample.tokens.push_back(w->text);
      sample.speakers.push_back(spk);
    }
  }
  return sample;
}

std::size_t speaker_count(const SotSample &sample) {
  std::set<std::string> distinct(sample.speakers.begin(), sample.speakers.end());
  return distinct.size();
}

std::size_t change_token_count(const SotSample &sample) {
  if (sample.tokens.empty()) return 0;
  return 1 + static_cast<std::size_t>(std::count_if(
                 sample.tokens.begin(), sample.tokens.end(), is_speaker_change));
}

std::vector<std::string> sample_findings(const SotSample &sample) {
  std::vector<std::string> out;
  const auto &t = sample.tokens;
  const auto &s = sample.speakers;
  if (t.size() != s.size()) {
    out.push_back(fmt::format("{} tokens but {} labels", t.size(), s.size()));
    return out;
  }
  if (t.empty()) return out;
  if (is_speaker_change(t.front())) out.push_back("sequence starts with <sc>");
  if (is_speaker_change(t.back())) out.push_back("sequence ends with <sc>");
  // Compare each word's label with the previous word's label.
  std::size_t prev_word = t.size();
  bool saw_change = false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (is_speaker_change(t[i])) {
      saw_change = true;
      continue;
    }
    if (prev_word < t.size()) {
      const bool differs = s[i] != s[prev_word];
      if (differs && !saw_change)
        out.push_back(fmt::format("speaker changes without <sc> at token {}", i));
      if (!differs && saw_change)
        out.push_back(fmt::format("<sc> between equal speakers before token {}", i));
    }
    prev_word = i;
    saw_change = false;
  }
  return out;
}

ParsedHypothesis split_hypothesis(const std::string &recording_id,
                                  const Segment &segment,
                                  std::vector<std::string> raw_tokens,
                                  std::vector<std::string> speaker_assignments) {
  if (raw_tokens.size() != speaker_assignments.size())
    throw DataError(fmt::format("{} tokens but {} speaker assignments",
                                raw_tokens.size(), speaker_assignments.size()));
  for (std::string &tok : raw_tokens) {
    std::string lower = tok;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == kSpeakerChange) tok = std::string(kSpeakerChange);
  }
  ParsedHypothesis out;
  out.sample = {recording_id, segment, std::move(raw_tokens),
                std::move(speaker_assignments)};
  const auto &t = out.sample.tokens;
  if (!t.empty() && is_speaker_change(t.front()))
    out.warnings.push_back("hypothesis starts with <sc>");
  if (!t.empty() && is_speaker_change(t.back()))
    out.warnings.push_back("hypothesis ends with <sc>");
  return out;
}

}  // namespace sastk
