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

#ifndef SASTK_SCORING_H_
#define SASTK_SCORING_H_

// WER, token-level speaker error rate, speaker counting accuracy and the
// matched-pair significance test.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sastk/ingest.h"
#include "sastk/remap.h"

namespace sastk {

enum class EditOp { kHit, kSubstitution, kDeletion, kInsertion };

struct AlignedPair {
  std::optional<std::size_t> ref_index;
  std::optional<std::size_t> hyp_index;
  EditOp op = EditOp::kHit;
};

struct EditSummary {
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t hits = 0;

  std::size_t errors() const { return substitutions + insertions + deletions; }
  std::size_t ref_length() const { return substitutions + deletions + hits; }
  // (S+I+D)/ref_length; 0 for an empty reference with no insertions,
  // +infinity for insertions against an empty reference.
  double rate() const;

  EditSummary &operator+=(const EditSummary &other);
  bool operator==(const EditSummary &other) const = default;
};

struct Alignment {
  EditSummary summary;
  std::vector<AlignedPair> pairs;
};

// Unit-cost Levenshtein alignment. Among equal-cost paths the backtrace
// prefers hits, then substitutions, then deletions, then insertions.
Alignment edit_align(std::span<const std::string> ref, std::span<const std::string> hyp);

struct SequencePair {
  std::vector<std::string> ref;
  std::vector<std::string> hyp;
};

// Aligns every pair; OpenMP over pairs, with a serial reference.
std::vector<EditSummary> align_batch(const std::vector<SequencePair> &pairs);
std::vector<EditSummary> align_batch_serial(const std::vector<SequencePair> &pairs);

struct ScoreOptions {
  // Score "<sc>" tokens (and their labels) like words.
  bool include_change_tokens = false;
  // Read speaker errors off the word alignment instead of aligning label
  // sequences independently.
  bool joint_ser = false;
};

struct CorpusScore {
  EditSummary total;                     // pooled over segments
  std::vector<std::string> segment_ids;  // reference order
  std::vector<EditSummary> per_segment;
};

// Hypotheses are paired with references by segment id; any id present on one
// side only is a DataError.
CorpusScore wer(const std::vector<SotSample> &refs, const std::vector<SotSample> &hyps,
                const ScoreOptions &opts = {});
// Hypothesis labels must already be in reference id space.
CorpusScore ser(const std::vector<SotSample> &refs, const std::vector<SotSample> &hyps,
                const ScoreOptions &opts = {});
// Applies `mapping` to every hypothesis first.
CorpusScore ser(const std::vector<SotSample> &refs, const std::vector<SotSample> &hyps,
                const IdMapping &mapping, const ScoreOptions &opts = {});

std::vector<SotSample> apply_mappings(const std::vector<SotSample> &hyps,
                                      const RecordingMappings &mappings);

enum class CountDefinition { kDistinctSpeakers, kChangeTokens };

struct CountingMatrix {
  // counts[k][i]: segments with k true speakers estimated to have i.
  std::map<std::size_t, std::map<std::size_t, std::size_t>> counts;

  std::size_t row_total(std::size_t k) const;
  // Row-normalized percentages.
  std::map<std::size_t, std::map<std::size_t, double>> row_percentages() const;
  // counts[k][k] / N_k; nullopt for an absent row.
  std::optional<double> accuracy(std::size_t k) const;
};

CountingMatrix counting_accuracy(const std::vector<SotSample> &refs,
                                 const std::vector<SotSample> &hyps,
                                 CountDefinition definition = CountDefinition::kDistinctSpeakers);

struct MatchedPairResult {
  double z = 0.0;
  double p_value = 1.0;
  std::size_t n_segments = 0;
  double mean_difference = 0.0;
};

// Two-sided normal test on per-segment error differences a_j - b_j.
MatchedPairResult matched_pair_test(std::span<const long long> errors_a,
                                    std::span<const long long> errors_b);

struct SubsetScore {
  std::string name;
  std::size_t segments = 0;
  EditSummary wer;
  EditSummary ser;
};

struct SignificanceEntry {
  std::string metric;
  MatchedPairResult result;
};

struct ScoreReport {
  std::vector<SubsetScore> subsets;  // requested k-spk subsets, then "total"
  CountingMatrix counting;
  // Segments whose distinct-speaker count differs from (#<sc> + 1), on either side.
  std::size_t count_definition_discrepancies = 0;
  std::vector<SignificanceEntry> significance;
  std::vector<std::string> warnings;
};

struct ReportOptions {
  std::vector<std::size_t> by_speakers = {1, 2, 3};
  ScoreOptions score;
};

// `hyps` (and `compare`, when given) must already be mapped to reference ids.
// Throws DataError on an empty corpus.
ScoreReport score_report(const std::vector<SotSample> &refs,
                         const std::vector<SotSample> &hyps, const ReportOptions &opts,
                         const std::vector<SotSample> *compare = nullptr);

std::string format_score_report(const ScoreReport &report);

}  // namespace sastk

#endif  // SASTK_SCORING_H_
