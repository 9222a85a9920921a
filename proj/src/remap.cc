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

#include "sastk/remap.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "sastk/error.h"

namespace sastk {

RemapMode parse_remap_mode(const std::string &name) {
  if (name == "literal") return RemapMode::kLiteral;
  if (name == "one_to_one" || name == "one-to-one") return RemapMode::kOneToOne;
  throw ConfigError(fmt::format("unknown remap mode '{}'", name));
}

std::string to_string(RemapMode mode) {
  return mode == RemapMode::kLiteral ? "literal" : "one_to_one";
}

Matrix iou_matrix(const SpeakerTimelineSet &sd, const SpeakerTimelineSet &ref) {
  Matrix m(sd.size(), ref.size());
  std::size_t i = 0;
  for (const auto &[est, unused] : sd) {
    const Timeline mine = exclusive_regions(sd, est);
    std::size_t k = 0;
    for (const auto &[rid, timeline] : ref) m(i, k++) = iou(mine, timeline);
    ++i;
  }
  return m;
}

std::vector<std::size_t> hungarian(const Matrix &cost) {
  // Potentials-based O(n^3) assignment, 1-based internally.
  const std::size_t n = cost.rows();
  if (cost.cols() != n) throw ConfigError("assignment needs a square cost matrix");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> assignment(n, 0);
  for (std::size_t j = 1; j <= n; ++j)
    if (p[j] != 0) assignment[p[j] - 1] = j - 1;
  return assignment;
}

IdMapping remap_ids(const SpeakerTimelineSet &sd, const SpeakerTimelineSet &ref,
                    RemapMode mode) {
  if (sd.empty()) throw DataError("remap: diarization output has no speakers");
  if (ref.empty()) throw DataError("remap: reference has no speakers");
  const Matrix m = iou_matrix(sd, ref);
  std::vector<std::string> est_ids, ref_ids;
  for (const auto &[id, t] : sd) est_ids.push_back(id);
  for (const auto &[id, t] : ref) ref_ids.push_back(id);
  std::vector<bool> empty_exclusive;
  for (const std::string &id : est_ids)
    empty_exclusive.push_back(exclusive_regions(sd, id).empty());

  IdMapping mapping;
  mapping.num_estimated = est_ids.size();
  mapping.num_reference = ref_ids.size();

  if (mode == RemapMode::kLiteral) {
    for (std::size_t i = 0; i < est_ids.size(); ++i) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < ref_ids.size(); ++k)
        if (m(i, k) > m(i, best)) best = k;
      MappingEntry e{ref_ids[best], m(i, best), "ok"};
      if (empty_exclusive[i])
        e = {ref_ids.front(), 0.0, "empty"};
      else if (m(i, best) <= 0.0)
        e.flag = "no-overlap";
      mapping.pairs[est_ids[i]] = e;
    }
    return mapping;
  }

  const std::size_t n = std::max(est_ids.size(), ref_ids.size());
  Matrix cost(n, n, 1.0);
  for (std::size_t i = 0; i < est_ids.size(); ++i)
    for (std::size_t k = 0; k < ref_ids.size(); ++k) cost(i, k) = 1.0 - m(i, k);
  const std::vector<std::size_t> assignment = hungarian(cost);
  std::size_t unknown = 0;
  for (std::size_t i = 0; i < est_ids.size(); ++i) {
    const std::size_t k = assignment[i];
    MappingEntry e;
    if (k < ref_ids.size()) {
      e = {ref_ids[k], m(i, k), "ok"};
      if (empty_exclusive[i])
        e.flag = "empty";
      else if (m(i, k) <= 0.0)
        e.flag = "no-overlap";
    } else {
      e = {fmt::format("unk{:02d}", unknown++), 0.0, "unmatched"};
    }
    mapping.pairs[est_ids[i]] = e;
  }
  return mapping;
}

SotSample apply_mapping(const SotSample &sample, const IdMapping &mapping) {
  SotSample out = sample;
  for (std::string &label : out.speakers) {
    auto it = mapping.pairs.find(label);
    if (it == mapping.pairs.end())
      throw DataError(fmt::format("speaker label '{}' in {} has no mapping", label,
                                  segment_id(sample)));
    label = it->second.reference_id;
  }
  return out;
}

std::string format_mappings(const RecordingMappings &mappings) {
  std::string out;
  for (const auto &[rec, m] : mappings) {
    out += fmt::format("speakers\t{}\t{}\t{}\n", rec, m.num_estimated, m.num_reference);
    for (const auto &[est, e] : m.pairs)
      out += fmt::format("map\t{}\t{}\t{}\t{:.6f}\t{}\n", rec, est, e.reference_id,
                         e.iou, e.flag);
  }
  return out;
}

namespace {

std::vector<std::string> split_tabs(const std::string &line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, '\t')) out.push_back(field);
  return out;
}

template <typename T>
T parse_field(const std::string &s, const std::string &source, std::size_t line) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw DataError(fmt::format("{}:{}: cannot parse '{}'", source, line, s));
  return v;
}

}  // namespace

RecordingMappings read_mappings(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  const std::string source = path.string();
  RecordingMappings out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto f = split_tabs(line);
    if (f[0] == "speakers" && f.size() == 4) {
      auto &m = out[f[1]];
      m.num_estimated = parse_field<std::size_t>(f[2], source, line_no);
      m.num_reference = parse_field<std::size_t>(f[3], source, line_no);
    } else if (f[0] == "map" && f.size() == 6) {
      double v = parse_field<double>(f[4], source, line_no);
      if (v < 0.0 || v > 1.0)
        throw DataError(fmt::format("{}:{}: IoU {} outside [0,1]", source, line_no, v));
      out[f[1]].pairs[f[2]] = {f[3], v, f[5]};
    } else {
      throw DataError(fmt::format("{}:{}: malformed mapping line", source, line_no));
    }
  }
  return out;
}

void write_mappings(const RecordingMappings &mappings,
                    const std::filesystem::path &path) {
  write_text_file(path, format_mappings(mappings));
}

}  // namespace sastk
