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

#ifndef SASTK_CONFIG_H_
#define SASTK_CONFIG_H_

// Run configuration for the pipeline. The file is INI style:
//
//   [paths]          vad segments embeddings reference_rttm words utterances
//                    reference_sot hypothesis_sot out_dir
//   [segmentation]   method chunk hop silence_threshold max_group
//                    overlap_margin onset offset min_speech min_silence
//   [diarization]    max_speakers k affinity_percentile kmeans_restarts
//   [templates]      selection length allow_overlap
//   [remap]          mode
//   [score]          by_speakers include_change_tokens joint_ser
//   [run]            seed workers
//
// Overrides of the form "section.key=value" are applied on top of the file.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sastk/diarizer.h"
#include "sastk/remap.h"
#include "sastk/scoring.h"
#include "sastk/segmenter.h"
#include "sastk/templates.h"

namespace sastk {

struct RunPaths {
  std::filesystem::path vad;
  std::filesystem::path segments;
  std::filesystem::path embeddings;
  std::filesystem::path reference_rttm;
  std::filesystem::path words;
  std::filesystem::path utterances;
  std::filesystem::path reference_sot;
  std::filesystem::path hypothesis_sot;
  std::filesystem::path out_dir;
};

struct RunConfig {
  RunPaths paths;
  SegmentationConfig segmentation;
  VadThresholds vad;
  DiarizationConfig diarization;
  CandidateFilter templates;
  RemapMode remap_mode = RemapMode::kLiteral;
  ReportOptions score;
  std::optional<std::uint64_t> seed;
  int workers = 0;  // 0: library default
};

// Parses INI text plus overrides. Unknown sections or keys and malformed
// values throw ConfigError. Relative paths are resolved against `base_dir`.
RunConfig parse_run_config(const std::string &text,
                           const std::vector<std::string> &overrides = {},
                           const std::filesystem::path &base_dir = {});
RunConfig load_run_config(const std::filesystem::path &path,
                          const std::vector<std::string> &overrides = {});

// Problems that would stop a run; empty for a usable config.
std::vector<std::string> validate_config(const RunConfig &cfg);

// Every setting that affects stage outputs, one "section.key=value" per line.
// Paths and the worker count are left out.
std::string canonical_config(const RunConfig &cfg);

// Worker count from SASTK_WORKERS, or 0 when unset.
int default_workers();

}  // namespace sastk

#endif  // SASTK_CONFIG_H_
