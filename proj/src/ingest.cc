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

#include "sastk/ingest.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "sastk/error.h"

namespace sastk {

namespace {

[[noreturn]] void fail(const std::string &source, std::size_t line,
                       const std::string &what) {
  throw DataError(fmt::format("{}:{}: {}", source, line, what));
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

// Splits one CSV record; double quotes protect commas and "" escapes a quote.
std::vector<std::string> split_csv(std::string_view s) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quoted) {
      if (c == '"' && i + 1 < s.size() && s[i + 1] == '"') {
        out.back().push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back().push_back(c);
    }
  }
  return out;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

double parse_number(std::string_view field, const std::string &source,
                    std::size_t line, std::string_view what) {
  double value = 0.0;
  const char *first = field.data();
  const char *last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value))
    fail(source, line, fmt::format("cannot parse {} '{}'", what, field));
  return value;
}

bool skippable(std::string_view line) {
  return split_whitespace(line).empty();
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::ifstream open_input(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  return in;
}

std::string fmt_time(double t) { return fmt::format("{:.3f}", t); }
std::string fmt_real(double v) { return fmt::format("{:.8g}", v); }

}  // namespace

std::vector<std::string> split_csv_record(std::string_view line) {
  return split_csv(line);
}

std::string read_text_file(const std::filesystem::path &path) {
  std::ifstream in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path &path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw DataError(fmt::format("write to '{}' failed", path.string()));
}

std::string segment_id(std::string_view recording_id, const Segment &segment) {
  return fmt::format("{}-{:07d}-{:07d}", recording_id,
                     std::llround(segment.start * 1000.0),
                     std::llround(segment.end * 1000.0));
}

// ---------------------------------------------------------------------------
// RTTM

namespace {

struct RttmRow {
  std::string recording_id;
  std::string name;
  Segment segment;
};

std::vector<RttmRow> parse_rttm_rows(std::istream &in, const std::string &source) {
  std::vector<RttmRow> rows;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_cr(raw);
    if (skippable(line) || line.rfind(";;", 0) == 0) continue;
    auto fields = split_whitespace(line);
    if (fields.size() != 9 && fields.size() != 10)
      fail(source, line_no,
           fmt::format("expected 9 or 10 RTTM fields, got {}", fields.size()));
    if (fields[0] != "SPEAKER") continue;
    const double tbeg = parse_number(fields[3], source, line_no, "tbeg");
    const double tdur = parse_number(fields[4], source, line_no, "tdur");
    if (tbeg < 0.0) fail(source, line_no, "negative start time");
    if (tdur <= 0.0)
      fail(source, line_no, fmt::format("non-positive duration {}", tdur));
    rows.push_back({std::string(fields[1]), std::string(fields[7]),
                    {tbeg, tbeg + tdur}});
  }
  return rows;
}

struct RttmLine {
  Segment segment;
  std::string name;
};

std::string format_rttm_lines(const std::string &recording_id,
                              std::vector<RttmLine> lines) {
  std::sort(lines.begin(), lines.end(), [](const RttmLine &a, const RttmLine &b) {
    return std::tie(a.segment.start, a.segment.end, a.name) <
           std::tie(b.segment.start, b.segment.end, b.name);
  });
  std::string out;
  for (const RttmLine &l : lines) {
    out += fmt::format("SPEAKER {} 1 {} {} <NA> <NA> {} <NA> <NA>\n", recording_id,
                       fmt_time(l.segment.start), fmt_time(l.segment.duration()),
                       l.name);
  }
  return out;
}

}  // namespace

RecordingTimelines parse_rttm(std::istream &in, const std::string &source) {
  std::map<std::string, std::map<std::string, std::vector<Segment>>> raw;
  for (RttmRow &row : parse_rttm_rows(in, source))
    raw[row.recording_id][row.name].push_back(row.segment);
  RecordingTimelines out;
  for (auto &[rec, speakers] : raw)
    for (auto &[spk, segs] : speakers)
      out[rec][spk] = Timeline::normalize(std::move(segs));
  return out;
}

RecordingTimelines read_rttm(const std::filesystem::path &path) {
  std::ifstream in = open_input(path);
  return parse_rttm(in, path.string());
}

std::string format_rttm(const RecordingTimelines &timelines) {
  std::string out;
  for (const auto &[rec, set] : timelines) {
    std::vector<RttmLine> lines;
    for (const auto &[spk, timeline] : set)
      for (const Segment &s : timeline) lines.push_back({s, spk});
    out += format_rttm_lines(rec, std::move(lines));
  }
  return out;
}

void write_rttm(const RecordingTimelines &timelines,
                const std::filesystem::path &path) {
  write_text_file(path, format_rttm(timelines));
}

SegmentLists read_segment_list(const std::filesystem::path &path) {
  std::ifstream in = open_input(path);
  SegmentLists out;
  for (RttmRow &row : parse_rttm_rows(in, path.string()))
    out[row.recording_id].push_back(row.segment);
  for (auto &[rec, segs] : out)
    std::sort(segs.begin(), segs.end(), [](const Segment &a, const Segment &b) {
      return std::tie(a.start, a.end) < std::tie(b.start, b.end);
    });
  return out;
}

std::string format_segment_list(const SegmentLists &lists) {
  std::string out;
  for (const auto &[rec, segs] : lists) {
    std::vector<RttmLine> lines;
    for (const Segment &s : segs) lines.push_back({s, "<NA>"});
    out += format_rttm_lines(rec, std::move(lines));
  }
  return out;
}

void write_segment_list(const SegmentLists &lists,
                        const std::filesystem::path &path) {
  write_text_file(path, format_segment_list(lists));
}

// ---------------------------------------------------------------------------
// Word and utterance CSV

namespace {

struct CsvRow {
  std::size_t line = 0;
  std::string recording_id, speaker_id, text;
  double start = 0.0, end = 0.0;
};

std::vector<CsvRow> parse_annotation_csv(std::istream &in, const std::string &source) {
  static constexpr std::string_view kColumns[] = {"recording_id", "speaker_id",
                                                  "start", "end", "text"};
  std::string raw;
  std::size_t line_no = 0;
  std::vector<std::size_t> index(5, 0);
  bool have_header = false;
  std::size_t width = 0;
  std::vector<CsvRow> rows;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_cr(raw);
    if (skippable(line)) continue;
    auto fields = split_csv(line);
    if (!have_header) {
      for (std::size_t c = 0; c < 5; ++c) {
        auto it = std::find(fields.begin(), fields.end(), kColumns[c]);
        if (it == fields.end())
          fail(source, line_no, fmt::format("missing column '{}'", kColumns[c]));
        index[c] = static_cast<std::size_t>(it - fields.begin());
      }
      width = fields.size();
      have_header = true;
      continue;
    }
    if (fields.size() != width)
      fail(source, line_no,
           fmt::format("expected {} columns, got {}", width, fields.size()));
    CsvRow row;
    row.line = line_no;
    row.recording_id = fields[index[0]];
    row.speaker_id = fields[index[1]];
    row.start = parse_number(fields[index[2]], source, line_no, "start time");
    row.end = parse_number(fields[index[3]], source, line_no, "end time");
    row.text = fields[index[4]];
    if (row.recording_id.empty() || row.speaker_id.empty())
      fail(source, line_no, "empty recording or speaker id");
    if (!is_valid(Segment{row.start, row.end}))
      fail(source, line_no,
           fmt::format("invalid interval ({}, {})", row.start, row.end));
    rows.push_back(std::move(row));
  }
  if (!have_header) fail(source, line_no, "missing CSV header");
  return rows;
}

template <typename T>
void sort_records(std::vector<T> &records) {
  std::stable_sort(records.begin(), records.end(), [](const T &a, const T &b) {
    return std::tie(a.recording_id, a.start, a.end, a.speaker_id) <
           std::tie(b.recording_id, b.start, b.end, b.speaker_id);
  });
}

}  // namespace

std::vector<WordToken> parse_words(std::istream &in, const std::string &source) {
  std::vector<WordToken> words;
  for (CsvRow &row : parse_annotation_csv(in, source)) {
    if (row.text.empty() ||
        row.text.find_first_of(" \t") != std::string::npos)
      fail(source, row.line, fmt::format("bad word text '{}'", row.text));
    words.push_back({std::move(row.recording_id), std::move(row.speaker_id),
                     row.start, row.end, std::move(row.text)});
  }
  sort_records(words);
  return words;
}

std::vector<WordToken> read_words(const std::filesystem::path &path) {
  std::ifstream in = open_input(path);
  return parse_words(in, path.string());
}

void write_words(const std::vector<WordToken> &words,
                 const std::filesystem::path &path) {
  std::string out = "recording_id,speaker_id,start,end,text\n";
  for (const WordToken &w : words)
    out += fmt::format("{},{},{},{},{}\n", csv_field(w.recording_id),
                       csv_field(w.speaker_id), fmt_time(w.start), fmt_time(w.end),
                       csv_field(w.text));
  write_text_file(path, out);
}

std::vector<UtteranceRecord> parse_utterances(std::istream &in,
                                              const std::string &source) {
  std::vector<UtteranceRecord> utts;
  for (CsvRow &row : parse_annotation_csv(in, source))
    utts.push_back({std::move(row.recording_id), std::move(row.speaker_id),
                    row.start, row.end, std::move(row.text)});
  sort_records(utts);
  return utts;
}

std::vector<UtteranceRecord> read_utterances(const std::filesystem::path &path) {
  std::ifstream in = open_input(path);
  return parse_utterances(in, path.string());
}

void write_utterances(const std::vector<UtteranceRecord> &utterances,
                      const std::filesystem::path &path) {
  std::string out = "recording_id,speaker_id,start,end,text\n";
  for (const UtteranceRecord &u : utterances)
    out += fmt::format("{},{},{},{},{}\n", csv_field(u.recording_id),
                       csv_field(u.speaker_id), fmt_time(u.start), fmt_time(u.end),
                       csv_field(u.transcript));
  write_text_file(path, out);
}

// ---------------------------------------------------------------------------
// VAD streams

std::vector<VadStream> parse_vad_streams(std::istream &in,
                                         const std::string &source) {
  std::vector<VadStream> streams;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_cr(raw);
    if (skippable(line)) continue;
    auto fields = split_on(line, '\t');
    if (fields.size() < 2)
      fail(source, line_no, "expected recording id and frame period");
    VadStream s;
    s.recording_id = std::string(fields[0]);
    if (s.recording_id.empty()) fail(source, line_no, "empty recording id");
    s.frame_period = parse_number(fields[1], source, line_no, "frame period");
    if (!(s.frame_period > 0.0))
      fail(source, line_no, "frame period must be positive");
    for (std::size_t i = 2; i < fields.size(); ++i) {
      double p = parse_number(fields[i], source, line_no, "probability");
      if (p < 0.0 || p > 1.0)
        fail(source, line_no, fmt::format("probability {} outside [0,1]", p));
      s.probabilities.push_back(p);
    }
    streams.push_back(std::move(s));
  }
  return streams;
}

std::vector<VadStream> read_vad_streams(const std::filesystem::path &path) {
  std::ifstream in = open_input(path);
  return parse_vad_streams(in, path.string());
}

std::string format_vad_streams(const std::vector<VadStream> &streams) {
  std::string out;
  for (const VadStream &s : streams) {
    out += s.recording_id;
    out += '\t';
    out += fmt_real(s.frame_period);
    for (double p : s.probabilities) {
      out += '\t';
      out += fmt_real(p);
    }
    out += '\n';
  }
  return out;
}

void write_vad_streams(const std::vector<VadStream> &streams,
                       const std::filesystem::path &path) {
  write_text_file(path, format_vad_streams(streams));
}

// ---------------------------------------------------------------------------
// Embeddings

std::vector<EmbeddingRecord> parse_embeddings(std::istream &in,
                                              const std::string &source) {
  std::vector<EmbeddingRecord> records;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_cr(raw);
    if (skippable(line)) continue;
    auto fields = split_on(line, '\t');
    EmbeddingRecord r;
    r.id = std::string(fields[0]);
    if (r.id.empty()) fail(source, line_no, "empty embedding id");
    if (fields.size() < 2) fail(source, line_no, "empty embedding vector");
    r.vector.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i)
      r.vector.push_back(parse_number(fields[i], source, line_no, "component"));
    if (!records.empty() && r.vector.size() != records.front().vector.size())
      fail(source, line_no,
           fmt::format("dimension {} differs from {}", r.vector.size(),
                       records.front().vector.size()));
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<EmbeddingRecord> read_embeddings(const std::filesystem::path &path) {
  std::ifstream in = open_input(path);
  return parse_embeddings(in, path.string());
}

std::string format_embeddings(const std::vector<EmbeddingRecord> &records) {
  std::string out;
  for (const EmbeddingRecord &r : records) {
    out += r.id;
    for (double v : r.vector) {
      out += '\t';
      out += fmt_real(v);
    }
    out += '\n';
  }
  return out;
}

void write_embeddings(const std::vector<EmbeddingRecord> &records,
                      const std::filesystem::path &path) {
  write_text_file(path, format_embeddings(records));
}

std::map<std::string, std::vector<double>> index_embeddings(
    const std::vector<EmbeddingRecord> &records) {
  std::map<std::string, std::vector<double>> out;
  for (const EmbeddingRecord &r : records)
    if (!out.emplace(r.id, r.vector).second)
      throw DataError(fmt::format("duplicate embedding id '{}'", r.id));
  return out;
}

// ---------------------------------------------------------------------------
// SOT records

std::vector<SotRecord> parse_sot(std::istream &in, const std::string &source) {
  static constexpr std::string_view kKeys[] = {"recording_id", "start", "end",
                                               "tokens", "speakers"};
  std::vector<SotRecord> records;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_cr(raw);
    if (skippable(line)) continue;
    auto fields = split_on(line, '\t');
    if (fields.size() != 5)
      fail(source, line_no, fmt::format("expected 5 fields, got {}", fields.size()));
    std::string_view values[5];
    for (std::size_t i = 0; i < 5; ++i) {
      auto eq = fields[i].find('=');
      if (eq == std::string_view::npos || fields[i].substr(0, eq) != kKeys[i])
        fail(source, line_no, fmt::format("expected field '{}='", kKeys[i]));
      values[i] = fields[i].substr(eq + 1);
    }
    SotRecord r;
    r.recording_id = std::string(values[0]);
    if (r.recording_id.empty()) fail(source, line_no, "empty recording id");
    r.segment = {parse_number(values[1], source, line_no, "start"),
                 parse_number(values[2], source, line_no, "end")};
    if (!is_valid(r.segment)) fail(source, line_no, "invalid segment");
    for (auto t : split_whitespace(values[3])) r.tokens.emplace_back(t);
    for (auto s : split_whitespace(values[4])) r.speakers.emplace_back(s);
    if (r.tokens.size() != r.speakers.size())
      fail(source, line_no,
           fmt::format("{} tokens but {} speaker labels", r.tokens.size(),
                       r.speakers.size()));
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<SotRecord> read_sot(const std::filesystem::path &path) {
  std::ifstream in = open_input(path);
  return parse_sot(in, path.string());
}

std::string format_sot(const std::vector<SotRecord> &records) {
  std::string out;
  for (const SotRecord &r : records) {
    if (r.tokens.size() != r.speakers.size())
      throw DataError(fmt::format("record {} has {} tokens but {} speaker labels",
                                  segment_id(r), r.tokens.size(), r.speakers.size()));
    out += fmt::format("recording_id={}\tstart={}\tend={}\ttokens={}\tspeakers={}\n",
                       r.recording_id, fmt_time(r.segment.start),
                       fmt_time(r.segment.end), fmt::join(r.tokens, " "),
                       fmt::join(r.speakers, " "));
  }
  return out;
}

void write_sot(const std::vector<SotRecord> &records,
               const std::filesystem::path &path) {
  write_text_file(path, format_sot(records));
}

}  // namespace sastk
