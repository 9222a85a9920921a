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

#ifndef SASTK_REMAP_H_
#define SASTK_REMAP_H_

// Maps diarization speaker ids onto reference speaker ids by the IoU between
// each estimated speaker's non-overlapped speech and each reference
// speaker's speech.

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sastk/ingest.h"
#include "sastk/linalg.h"
#include "sastk/timeline.h"

namespace sastk {

enum class RemapMode {
  kLiteral,   // each estimated speaker takes its highest-IoU reference
  kOneToOne,  // maximum-weight bipartite assignment
};

RemapMode parse_remap_mode(const std::string &name);
std::string to_string(RemapMode mode);

struct MappingEntry {
  std::string reference_id;
  double iou = 0.0;
  // "ok", "empty" (no exclusive speech), "no-overlap" (best IoU is 0) or
  // "unmatched" (one-to-one mode ran out of reference speakers).
  std::string flag = "ok";

  bool operator==(const MappingEntry &other) const = default;
};

struct IdMapping {
  std::map<std::string, MappingEntry> pairs;  // estimated id -> entry
  std::size_t num_estimated = 0;              // I
  std::size_t num_reference = 0;              // K

  bool operator==(const IdMapping &other) const = default;
};

// IoU matrix, rows in estimated id order, columns in reference id order.
Matrix iou_matrix(const SpeakerTimelineSet &sd, const SpeakerTimelineSet &ref);

// Ties go to the lexicographically smallest reference id. In one-to-one
// mode, estimated speakers left without a partner map to unk00, unk01, ...
IdMapping remap_ids(const SpeakerTimelineSet &sd, const SpeakerTimelineSet &ref,
                    RemapMode mode);

// Replaces every speaker label (including those of "<sc>" tokens). Throws
// DataError naming the first unmapped label.
SotSample apply_mapping(const SotSample &sample, const IdMapping &mapping);

// Minimum-cost perfect assignment of a square cost matrix: result[row] = col.
std::vector<std::size_t> hungarian(const Matrix &cost);

using RecordingMappings = std::map<std::string, IdMapping>;

// Lines "speakers <rec> <I> <K>" and "map <rec> <est> <ref> <iou> <flag>",
// tab separated, IoU with 6 decimals.
std::string format_mappings(const RecordingMappings &mappings);
RecordingMappings read_mappings(const std::filesystem::path &path);
void write_mappings(const RecordingMappings &mappings,
                    const std::filesystem::path &path);

}  // namespace sastk

#endif  // SASTK_REMAP_H_
