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

#ifndef SASTK_INGEST_H_
#define SASTK_INGEST_H_

// Readers and writers for every file the toolkit consumes or produces.
//
//   RTTM          SPEAKER <file> <chan> <tbeg> <tdur> <NA> <NA> <name> <NA> <NA>
//   words/utts    CSV with header recording_id,speaker_id,start,end,text
//   VAD streams   <recording_id> TAB <frame_period> TAB <p0> TAB <p1> ...
//   embeddings    <id> TAB <v0> TAB <v1> ...
//   SOT           recording_id=R TAB start=S TAB end=E TAB tokens=... TAB speakers=...
//
// Writers emit LF line endings, '.' decimals, times with 3 decimals and real
// vectors with 8 significant digits. Readers reject malformed input with a
// DataError that names the file and line.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sastk/timeline.h"

namespace sastk {

inline constexpr std::string_view kSpeakerChange = "<sc>";

struct WordToken {
  std::string recording_id;
  std::string speaker_id;
  double start = 0.0;
  double end = 0.0;
  std::string text;
};

struct UtteranceRecord {
  std::string recording_id;
  std::string speaker_id;
  double start = 0.0;
  double end = 0.0;
  std::string transcript;
};

struct VadStream {
  std::string recording_id;
  double frame_period = 0.0;
  std::vector<double> probabilities;
};

struct EmbeddingRecord {
  std::string id;
  std::vector<double> vector;
};

// One segment with its serialized token stream and one speaker label per
// token. The label of a "<sc>" token is the speaker that follows it.
struct SotRecord {
  std::string recording_id;
  Segment segment;
  std::vector<std::string> tokens;
  std::vector<std::string> speakers;

  bool operator==(const SotRecord &other) const = default;
};
using SotSample = SotRecord;

// "<recording>-<start ms, 7 digits>-<end ms, 7 digits>". Joins segments to
// embedding and SOT records.
std::string segment_id(std::string_view recording_id, const Segment &segment);
inline std::string segment_id(const SotRecord &r) {
  return segment_id(r.recording_id, r.segment);
}

// Per-recording speaker timelines.
using RecordingTimelines = std::map<std::string, SpeakerTimelineSet>;
// Per-recording raw segment lists; members may overlap (e.g. fixed chunks).
using SegmentLists = std::map<std::string, std::vector<Segment>>;

RecordingTimelines parse_rttm(std::istream &in, const std::string &source);
RecordingTimelines read_rttm(const std::filesystem::path &path);
std::string format_rttm(const RecordingTimelines &timelines);
void write_rttm(const RecordingTimelines &timelines,
                const std::filesystem::path &path);

// Segment lists use the RTTM layout with "<NA>" as the speaker name.
SegmentLists read_segment_list(const std::filesystem::path &path);
std::string format_segment_list(const SegmentLists &lists);
void write_segment_list(const SegmentLists &lists,
                        const std::filesystem::path &path);

std::vector<WordToken> parse_words(std::istream &in, const std::string &source);
std::vector<WordToken> read_words(const std::filesystem::path &path);
void write_words(const std::vector<WordToken> &words,
                 const std::filesystem::path &path);

std::vector<UtteranceRecord> parse_utterances(std::istream &in,
                                              const std::string &source);
std::vector<UtteranceRecord> read_utterances(const std::filesystem::path &path);
void write_utterances(const std::vector<UtteranceRecord> &utterances,
                      const std::filesystem::path &path);

std::vector<VadStream> parse_vad_streams(std::istream &in,
                                         const std::string &source);
std::vector<VadStream> read_vad_streams(const std::filesystem::path &path);
std::string format_vad_streams(const std::vector<VadStream> &streams);
void write_vad_streams(const std::vector<VadStream> &streams,
                       const std::filesystem::path &path);

std::vector<EmbeddingRecord> parse_embeddings(std::istream &in,
                                              const std::string &source);
std::vector<EmbeddingRecord> read_embeddings(const std::filesystem::path &path);
std::string format_embeddings(const std::vector<EmbeddingRecord> &records);
void write_embeddings(const std::vector<EmbeddingRecord> &records,
                      const std::filesystem::path &path);
// id -> vector; duplicate ids are a DataError.
std::map<std::string, std::vector<double>> index_embeddings(
    const std::vector<EmbeddingRecord> &records);

std::vector<SotRecord> parse_sot(std::istream &in, const std::string &source);
std::vector<SotRecord> read_sot(const std::filesystem::path &path);
std::string format_sot(const std::vector<SotRecord> &records);
void write_sot(const std::vector<SotRecord> &records,
               const std::filesystem::path &path);

// One CSV record; double quotes protect commas and "" escapes a quote.
std::vector<std::string> split_csv_record(std::string_view line);

// Whole-file helpers shared by the writers and the pipeline manifest.
std::string read_text_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, std::string_view text);

}  // namespace sastk

#endif  // SASTK_INGEST_H_
