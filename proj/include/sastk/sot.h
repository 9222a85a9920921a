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

#ifndef SASTK_SOT_H_
#define SASTK_SOT_H_

// Serialized-output references: first-in-first-out token streams with "<sc>"
// between turns of different speakers, plus token-level speaker labels.

#include <cstddef>
#include <string>
#include <vector>

#include "sastk/ingest.h"

namespace sastk {

// Builds the reference for one segment. Words whose midpoint lies in
// [segment.start, segment.end) are grouped into turns by their enclosing
// utterance; turns are emitted in order of utterance start, words inside a
// turn in time order. Throws DataError for a word that no utterance of the
// same speaker encloses.
SotSample build_reference(const std::string &recording_id, const Segment &segment,
                          const std::vector<WordToken> &words,
                          const std::vector<UtteranceRecord> &utterances);

// Number of distinct speaker labels.
std::size_t speaker_count(const SotSample &sample);
// Number of "<sc>" tokens plus one (zero for an empty sample).
std::size_t change_token_count(const SotSample &sample);

bool is_speaker_change(const std::string &token);

// Structural problems of a sample: "<sc>" first or last, labels that change
// without "<sc>", "<sc>" between equal labels.
std::vector<std::string> sample_findings(const SotSample &sample);

struct ParsedHypothesis {
  SotSample sample;
  std::vector<std::string> warnings;
};

// Wraps raw recognizer output. Any casing of "<sc>" is normalized. A leading
// or trailing "<sc>" is kept and reported as a warning. Throws DataError on a
// token/label length mismatch.
ParsedHypothesis split_hypothesis(const std::string &recording_id,
                                  const Segment &segment,
                                  std::vector<std::string> raw_tokens,
                                  std::vector<std::string> speaker_assignments);

}  // namespace sastk

#endif  // SASTK_SOT_H_
