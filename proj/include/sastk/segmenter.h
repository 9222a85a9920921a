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

#ifndef SASTK_SEGMENTER_H_
#define SASTK_SEGMENTER_H_

// Segmentation of long recordings: VAD post-processing and silence merging,
// fixed-size chunking adjusted to overlaps and word boundaries, and
// ground-truth utterance groups.

#include <cstddef>
#include <string>
#include <vector>

#include "sastk/ingest.h"
#include "sastk/timeline.h"

namespace sastk {

enum class SegmentationMethod { kFixedSize, kGroundTruth, kVadMerge };

SegmentationMethod parse_segmentation_method(const std::string &name);
std::string to_string(SegmentationMethod method);

struct SegmentationConfig {
  SegmentationMethod method = SegmentationMethod::kVadMerge;
  double chunk = 5.0;
  double hop = 2.0;
  double silence_threshold = 0.5;
  double max_group = 100.0;
  double overlap_margin = 2.0;

  // Throws ConfigError when chunk >= hop > 0, silence_threshold > 0 or
  // max_group > 0 does not hold.
  void validate() const;
};

struct VadThresholds {
  double onset = 0.5;
  double offset = 0.25;
  double min_speech = 0.0;
  double min_silence = 0.0;
};

// Hysteresis thresholding of frame probabilities: speech starts at the first
// frame with p >= onset and ends at the first later frame with p < offset.
// Gaps shorter than min_silence are then filled and speech runs shorter than
// min_speech dropped.
Timeline binarize_vad(const VadStream &stream, const VadThresholds &thresholds);

// Fuses consecutive segments separated by a gap strictly shorter than
// `threshold`.
Timeline merge_by_silence(const Timeline &segments, double threshold);

// Chunks [span.start + k*hop, +chunk] clipped to the span. A boundary strictly
// inside an overlap region moves overlap_margin outside it (starts earlier,
// ends later); a boundary strictly inside a word then snaps to that word's
// start (chunk start) or end (chunk end). Both rules repeat until neither
// applies. Degenerate and duplicate chunks are dropped.
std::vector<Segment> fixed_size_chunks(const Segment &recording_span,
                                       const Timeline &overlap_regions,
                                       const std::vector<WordToken> &words,
                                       const SegmentationConfig &cfg);

// Union of all utterances of one recording; groups longer than max_group are
// removed.
std::vector<Segment> utterance_groups(const std::vector<UtteranceRecord> &utterances,
                                      const SegmentationConfig &cfg);

struct SegmentStats {
  std::size_t count = 0;
  double mean_duration = 0.0;
};

// Throws DataError on an empty list (mean undefined).
SegmentStats segment_stats(const std::vector<Segment> &segments);

}  // namespace sastk

#endif  // SASTK_SEGMENTER_H_
