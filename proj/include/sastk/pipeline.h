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

#ifndef SASTK_PIPELINE_H_
#define SASTK_PIPELINE_H_

// Stage drivers shared by the CLI subcommands and the end-to-end run.
// Every stage reads its inputs from files and persists its outputs, so any
// stage can be rerun from the artifacts of the previous one.

#include <filesystem>
#include <string>
#include <vector>

#include "sastk/config.h"
#include "sastk/ingest.h"
#include "sastk/remap.h"
#include "sastk/scoring.h"
#include "sastk/segmenter.h"
#include "sastk/templates.h"

namespace sastk {

// Sets the OpenMP thread count when n > 0.
void set_workers(int n);

// Hex SHA-256 of a byte string / of a file's contents.
std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path &path);

// segment: VAD streams -> hysteresis -> silence merge, per recording.
SegmentLists segment_vad(const std::vector<VadStream> &streams, const VadThresholds &vad,
                         double silence_threshold);
// segment: utterance groups, per recording.
SegmentLists segment_ground_truth(const std::vector<UtteranceRecord> &utterances,
                                  const SegmentationConfig &cfg);
// segment: fixed chunks over [0, last word end] avoiding overlap in `reference`.
SegmentLists segment_fixed(const std::vector<WordToken> &words,
                           const RecordingTimelines &reference,
                           const SegmentationConfig &cfg);

// diarize: clusters each recording's segment embeddings (looked up by
// segment id). Recordings run in parallel; output is ordered by id.
RecordingTimelines diarize_recordings(const SegmentLists &segments,
                                      const EmbeddingIndex &embeddings,
                                      const DiarizationConfig &cfg);

struct TemplateOutput {
  std::vector<EmbeddingRecord> templates;  // id "<recording>/<speaker>"
  std::string report;
};
TemplateOutput build_templates(const RecordingTimelines &diarized,
                               const EmbeddingIndex &embeddings,
                               const CandidateFilter &filter);

RecordingMappings remap_recordings(const RecordingTimelines &diarized,
                                   const RecordingTimelines &reference, RemapMode mode);

// Reference SOT for every segment that contains at least one word.
std::vector<SotSample> build_references(const SegmentLists &segments,
                                        const std::vector<WordToken> &words,
                                        const std::vector<UtteranceRecord> &utterances);

struct SweepRow {
  double threshold = 0.0;
  SegmentStats stats;
};
std::vector<SweepRow> sweep_thresholds(const std::vector<VadStream> &streams,
                                       const VadThresholds &vad,
                                       const std::vector<double> &thresholds);
std::string format_sweep(const std::vector<SweepRow> &rows);

inline const std::vector<std::string> kStages = {"segment", "diarize", "templates", "remap",
                                                  "score"};

struct PipelineOptions {
  bool resume = false;  // skip stages whose recorded outputs are intact
};

struct StageRecord {
  std::string stage;
  std::string status;  // "ran", "resumed", "skipped"
  std::vector<std::pair<std::string, std::string>> outputs;  // file, sha256
};

struct PipelineResult {
  std::string config_hash;
  std::vector<StageRecord> stages;
  std::filesystem::path manifest;
};

// Runs segment -> diarize -> templates -> remap -> score into cfg.paths.out_dir.
// Remap needs a reference RTTM and score a hypothesis SOT; without them the
// stages are skipped. Failures rethrow with the stage name prepended; the
// manifest of completed stages stays on disk.
PipelineResult run_pipeline(const RunConfig &cfg, const PipelineOptions &opts = {});

}  // namespace sastk

#endif  // SASTK_PIPELINE_H_
