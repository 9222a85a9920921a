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

#include "sastk/config.h"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "sastk/error.h"

namespace sastk {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>> &known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"paths",
       {"vad", "segments", "embeddings", "reference_rttm", "words", "utterances",
        "reference_sot", "hypothesis_sot", "out_dir"}},
      {"segmentation",
       {"method", "chunk", "hop", "silence_threshold", "max_group", "overlap_margin",
        "onset", "offset", "min_speech", "min_silence"}},
      {"diarization", {"max_speakers", "k", "affinity_percentile", "kmeans_restarts"}},
      {"templates", {"selection", "length", "allow_overlap"}},
      {"remap", {"mode"}},
      {"score", {"by_speakers", "include_change_tokens", "joint_ser"}},
      {"run", {"seed", "workers"}},
  };
  return keys;
}

template <typename T>
T parse_number(const std::string &key, const std::string &text) {
  T v{};
  const char *b = text.data(), *e = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e)
    throw ConfigError(fmt::format("{}: cannot parse '{}' as a number", key, text));
  return v;
}

bool parse_bool(const std::string &key, const std::string &text) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  throw ConfigError(fmt::format("{}: expected true or false, got '{}'", key, text));
}

std::vector<std::size_t> parse_list(const std::string &key, const std::string &text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b == std::string::npos) continue;
    out.push_back(parse_number<std::size_t>(key, item.substr(b, e - b + 1)));
  }
  return out;
}

std::string format_bound(double v) {
  return std::isinf(v) ? std::string() : fmt::format("{}", v);
}

}  // namespace

RunConfig parse_run_config(const std::string &text, const std::vector<std::string> &overrides,
                           const std::filesystem::path &base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error &e) {
    throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
  }
  for (const std::string &o : overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError(fmt::format("override must look like section.key=value, got '{}'", o));
    tree.put(pt::ptree::path_type(o.substr(0, eq), '.'), o.substr(eq + 1));
  }

  RunConfig cfg;
  for (const auto &[section, body] : tree) {
    auto known = known_keys().find(section);
    if (known == known_keys().end())
      throw ConfigError(fmt::format("unknown config section [{}]", section));
    if (body.empty() && !body.data().empty())
      throw ConfigError(fmt::format("'{}' is not a section", section));
    for (const auto &[key, node] : body) {
      if (!known->second.count(key))
        throw ConfigError(fmt::format("unknown config key {}.{}", section, key));
      const std::string name = section + "." + key;
      const std::string v = node.data();
      if (section == "paths") {
        std::filesystem::path p = v;
        if (!v.empty() && p.is_relative() && !base_dir.empty()) p = base_dir / p;
        if (key == "vad") cfg.paths.vad = p;
        else if (key == "segments") cfg.paths.segments = p;
        else if (key == "embeddings") cfg.paths.embeddings = p;
        else if (key == "reference_rttm") cfg.paths.reference_rttm = p;
        else if (key == "words") cfg.paths.words = p;
        else if (key == "utterances") cfg.paths.utterances = p;
        else if (key == "reference_sot") cfg.paths.reference_sot = p;
        else if (key == "hypothesis_sot") cfg.paths.hypothesis_sot = p;
        else cfg.paths.out_dir = p;
      } else if (section == "segmentation") {
        SegmentationConfig &s = cfg.segmentation;
        if (key == "method") s.method = parse_segmentation_method(v);
        else if (key == "chunk") s.chunk = parse_number<double>(name, v);
        else if (key == "hop") s.hop = parse_number<double>(name, v);
        else if (key == "silence_threshold") s.silence_threshold = parse_number<double>(name, v);
        else if (key == "max_group") s.max_group = parse_number<double>(name, v);
        else if (key == "overlap_margin") s.overlap_margin = parse_number<double>(name, v);
        else if (key == "onset") cfg.vad.onset = parse_number<double>(name, v);
        else if (key == "offset") cfg.vad.offset = parse_number<double>(name, v);
        else if (key == "min_speech") cfg.vad.min_speech = parse_number<double>(name, v);
        else cfg.vad.min_silence = parse_number<double>(name, v);
      } else if (section == "diarization") {
        DiarizationConfig &d = cfg.diarization;
        if (key == "max_speakers") d.max_speakers = parse_number<std::size_t>(name, v);
        else if (key == "k") {
          if (v.empty() || v == "auto") d.fixed_k.reset();
          else d.fixed_k = parse_number<std::size_t>(name, v);
        } else if (key == "affinity_percentile") d.affinity_percentile = parse_number<double>(name, v);
        else d.kmeans_restarts = parse_number<int>(name, v);
      } else if (section == "templates") {
        if (key == "selection") parse_selection(v, cfg.templates);
        else if (key == "length") parse_length_range(v, cfg.templates);
        else cfg.templates.allow_overlap = parse_bool(name, v);
      } else if (section == "remap") {
        cfg.remap_mode = parse_remap_mode(v);
      } else if (section == "score") {
        if (key == "by_speakers") cfg.score.by_speakers = parse_list(name, v);
        else if (key == "include_change_tokens") cfg.score.score.include_change_tokens = parse_bool(name, v);
        else cfg.score.score.joint_ser = parse_bool(name, v);
      } else {
        if (key == "seed") cfg.seed = parse_number<std::uint64_t>(name, v);
        else cfg.workers = parse_number<int>(name, v);
      }
    }
  }
  if (cfg.seed) cfg.diarization.seed = *cfg.seed;
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path &path,
                          const std::vector<std::string> &overrides) {
  if (!std::filesystem::exists(path))
    throw ConfigError(fmt::format("config file '{}' not found", path.string()));
  return parse_run_config(read_text_file(path), overrides, path.parent_path());
}

std::vector<std::string> validate_config(const RunConfig &cfg) {
  std::vector<std::string> out;
  auto check = [&](auto &&fn) {
    try {
      fn();
    } catch (const ConfigError &e) {
      out.emplace_back(e.what());
    }
  };
  check([&] { cfg.segmentation.validate(); });
  check([&] { cfg.diarization.validate(); });
  check([&] { cfg.templates.validate(); });
  const VadThresholds &v = cfg.vad;
  if (!(v.onset > 0.0 && v.onset <= 1.0 && v.offset >= 0.0 && v.offset <= v.onset))
    out.push_back(fmt::format("need 0 <= offset <= onset <= 1 (onset {}, offset {})", v.onset,
                              v.offset));
  if (!(v.min_speech >= 0.0 && v.min_silence >= 0.0))
    out.push_back("min_speech and min_silence must be >= 0");
  if (cfg.workers < 0) out.push_back("run.workers must be >= 0");
  if (!cfg.seed) out.push_back("run.seed is required: clustering is seeded");
  if (cfg.score.by_speakers.empty()) out.push_back("score.by_speakers is empty");
  for (std::size_t k : cfg.score.by_speakers)
    if (k == 0) out.push_back("score.by_speakers entries must be >= 1");

  const RunPaths &p = cfg.paths;
  auto need = [&](const std::filesystem::path &path, const char *key) {
    if (path.empty()) {
      out.push_back(fmt::format("paths.{} is required", key));
      return;
    }
    if (!std::filesystem::exists(path))
      out.push_back(fmt::format("paths.{}: '{}' does not exist", key, path.string()));
  };
  auto maybe = [&](const std::filesystem::path &path, const char *key) {
    if (!path.empty() && !std::filesystem::exists(path))
      out.push_back(fmt::format("paths.{}: '{}' does not exist", key, path.string()));
  };
  if (p.out_dir.empty()) out.push_back("paths.out_dir is required");
  need(p.embeddings, "embeddings");
  if (!p.segments.empty()) {
    need(p.segments, "segments");
  } else {
    switch (cfg.segmentation.method) {
      case SegmentationMethod::kVadMerge: need(p.vad, "vad"); break;
      case SegmentationMethod::kGroundTruth: need(p.utterances, "utterances"); break;
      case SegmentationMethod::kFixedSize:
        need(p.words, "words");
        need(p.reference_rttm, "reference_rttm");
        break;
    }
  }
  maybe(p.vad, "vad");
  maybe(p.reference_rttm, "reference_rttm");
  maybe(p.words, "words");
  maybe(p.utterances, "utterances");
  maybe(p.reference_sot, "reference_sot");
  maybe(p.hypothesis_sot, "hypothesis_sot");
  if (!p.hypothesis_sot.empty() && p.reference_sot.empty() &&
      (p.words.empty() || p.utterances.empty()))
    out.push_back("scoring needs paths.reference_sot or both paths.words and paths.utterances");
  return out;
}

std::string canonical_config(const RunConfig &cfg) {
  const SegmentationConfig &s = cfg.segmentation;
  const DiarizationConfig &d = cfg.diarization;
  const CandidateFilter &t = cfg.templates;
  std::string out;
  out += fmt::format("segmentation.method={}\n", to_string(s.method));
  out += fmt::format("segmentation.chunk={}\nsegmentation.hop={}\n", s.chunk, s.hop);
  out += fmt::format("segmentation.silence_threshold={}\n", s.silence_threshold);
  out += fmt::format("segmentation.max_group={}\n", s.max_group);
  out += fmt::format("segmentation.overlap_margin={}\n", s.overlap_margin);
  out += fmt::format("segmentation.onset={}\nsegmentation.offset={}\n", cfg.vad.onset,
                     cfg.vad.offset);
  out += fmt::format("segmentation.min_speech={}\nsegmentation.min_silence={}\n",
                     cfg.vad.min_speech, cfg.vad.min_silence);
  out += fmt::format("diarization.max_speakers={}\n", d.max_speakers);
  out += fmt::format("diarization.k={}\n", d.fixed_k ? fmt::format("{}", *d.fixed_k) : "auto");
  out += fmt::format("diarization.affinity_percentile={}\n", d.affinity_percentile);
  out += fmt::format("diarization.kmeans_restarts={}\n", d.kmeans_restarts);
  out += fmt::format("templates.selection={}\n",
                     t.n_longest ? fmt::format("n:{}", *t.n_longest) : "all");
  out += fmt::format("templates.length={}:{}\n", format_bound(t.min_len), format_bound(t.max_len));
  out += fmt::format("templates.allow_overlap={}\n", t.allow_overlap);
  out += fmt::format("remap.mode={}\n", to_string(cfg.remap_mode));
  out += fmt::format("score.by_speakers={}\n", fmt::join(cfg.score.by_speakers, ","));
  out += fmt::format("score.include_change_tokens={}\n", cfg.score.score.include_change_tokens);
  out += fmt::format("score.joint_ser={}\n", cfg.score.score.joint_ser);
  out += fmt::format("run.seed={}\n", cfg.seed ? fmt::format("{}", *cfg.seed) : "none");
  return out;
}

int default_workers() {
  const char *env = std::getenv("SASTK_WORKERS");
  if (env == nullptr || *env == '\0') return 0;
  const int n = parse_number<int>("SASTK_WORKERS", env);
  if (n < 0) throw ConfigError("SASTK_WORKERS must be >= 0");
  return n;
}

}  // namespace sastk
