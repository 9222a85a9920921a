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

#include "sastk/pipeline.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>
#include <omp.h>
#include <openssl/evp.h>

#include "sastk/diarizer.h"
#include "sastk/error.h"
#include "sastk/sot.h"

namespace sastk {

void set_workers(int n) {
  if (n > 0) omp_set_num_threads(n);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw DataError("SHA-256 failed");
  std::string out;
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

std::string file_sha256(const std::filesystem::path &path) {
  return sha256_hex(read_text_file(path));
}

namespace {

// Boundaries land on whole milliseconds so segment ids survive a write/read
// round trip.
std::vector<Segment> snap_to_ms(const Timeline &timeline) {
  std::vector<Segment> out;
  for (const Segment &s : timeline) {
    Segment q{std::round(s.start * 1000.0) / 1000.0, std::round(s.end * 1000.0) / 1000.0};
    if (q.end > q.start) out.push_back(q);
  }
  return out;
}

std::vector<Segment> snap_to_ms(const std::vector<Segment> &segments) {
  std::vector<Segment> out;
  for (const Segment &s : segments) {
    Segment q{std::round(s.start * 1000.0) / 1000.0, std::round(s.end * 1000.0) / 1000.0};
    if (q.end > q.start) out.push_back(q);
  }
  return out;
}

// Runs fn(i) for i in [0, n) in parallel and rethrows the first failure in
// index order.
template <typename Fn>
void parallel_for(std::size_t n, Fn &&fn) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto &e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

SegmentLists segment_vad(const std::vector<VadStream> &streams, const VadThresholds &vad,
                         double silence_threshold) {
  SegmentLists out;
  for (const VadStream &s : streams) {
    if (out.count(s.recording_id))
      throw DataError(fmt::format("duplicate VAD stream for '{}'", s.recording_id));
    out[s.recording_id] =
        snap_to_ms(merge_by_silence(binarize_vad(s, vad), silence_threshold));
  }
  return out;
}

SegmentLists segment_ground_truth(const std::vector<UtteranceRecord> &utterances,
                                  const SegmentationConfig &cfg) {
  std::map<std::string, std::vector<UtteranceRecord>> by_rec;
  for (const UtteranceRecord &u : utterances) by_rec[u.recording_id].push_back(u);
  SegmentLists out;
  for (const auto &[rec, utts] : by_rec) out[rec] = snap_to_ms(utterance_groups(utts, cfg));
  return out;
}

SegmentLists segment_fixed(const std::vector<WordToken> &words,
                           const RecordingTimelines &reference,
                           const SegmentationConfig &cfg) {
  std::map<std::string, std::vector<WordToken>> by_rec;
  for (const WordToken &w : words) by_rec[w.recording_id].push_back(w);
  SegmentLists out;
  for (const auto &[rec, ws] : by_rec) {
    double end = 0.0;
    for (const WordToken &w : ws) end = std::max(end, w.end);
    auto ref = reference.find(rec);
    const Timeline overlap =
        ref == reference.end() ? Timeline() : overlap_regions(ref->second);
    out[rec] = snap_to_ms(fixed_size_chunks(Segment{0.0, end}, overlap, ws, cfg));
  }
  return out;
}

RecordingTimelines diarize_recordings(const SegmentLists &segments,
                                      const EmbeddingIndex &embeddings,
                                      const DiarizationConfig &cfg) {
  cfg.validate();
  std::vector<std::string> recs;
  for (const auto &[rec, segs] : segments)
    if (!segs.empty()) recs.push_back(rec);
  std::vector<SpeakerTimelineSet> results(recs.size());
  parallel_for(recs.size(), [&](std::size_t r) {
    const std::vector<Segment> &segs = segments.at(recs[r]);
    std::vector<std::vector<double>> rows;
    for (const Segment &s : segs) {
      const std::string id = segment_id(recs[r], s);
      auto it = embeddings.find(id);
      if (it == embeddings.end())
        throw DataError(fmt::format("no embedding for segment '{}'", id));
      rows.push_back(it->second);
    }
    results[r] = to_timeline_set(cluster(Matrix::from_rows(rows), cfg), segs);
  });
  RecordingTimelines out;
  for (std::size_t r = 0; r < recs.size(); ++r) out[recs[r]] = std::move(results[r]);
  return out;
}

TemplateOutput build_templates(const RecordingTimelines &diarized,
                               const EmbeddingIndex &embeddings,
                               const CandidateFilter &filter) {
  filter.validate();
  TemplateOutput out;
  out.report = fmt::format("# filter: {}\nrecording\tspeaker\tsegments\tduration\n",
                           filter.describe());
  for (const auto &[rec, set] : diarized) {
    std::map<std::string, const SpeakerTemplate *> built;
    const std::vector<SpeakerTemplate> templates =
        build_all_templates(rec, set, embeddings, filter);
    for (const SpeakerTemplate &t : templates) built[t.speaker_id] = &t;
    for (const auto &[spk, timeline] : set) {
      auto it = built.find(spk);
      if (it == built.end()) {
        out.report += fmt::format("{}\t{}\t0\t0.000\t# no candidates\n", rec, spk);
        continue;
      }
      const SpeakerTemplate &t = *it->second;
      out.report += fmt::format("{}\t{}\t{}\t{:.3f}\n", rec, spk, t.num_segments,
                                t.total_duration);
      out.templates.push_back({rec + "/" + spk, t.vector});
    }
  }
  return out;
}

RecordingMappings remap_recordings(const RecordingTimelines &diarized,
                                   const RecordingTimelines &reference, RemapMode mode) {
  RecordingMappings out;
  for (const auto &[rec, set] : diarized) {
    auto ref = reference.find(rec);
    if (ref == reference.end())
      throw DataError(fmt::format("no reference timelines for recording '{}'", rec));
    out[rec] = remap_ids(set, ref->second, mode);
  }
  return out;
}

std::vector<SotSample> build_references(const SegmentLists &segments,
                                        const std::vector<WordToken> &words,
                                        const std::vector<UtteranceRecord> &utterances) {
  std::map<std::string, std::vector<WordToken>> words_by_rec;
  std::map<std::string, std::vector<UtteranceRecord>> utts_by_rec;
  for (const WordToken &w : words) words_by_rec[w.recording_id].push_back(w);
  for (const UtteranceRecord &u : utterances) utts_by_rec[u.recording_id].push_back(u);
  std::vector<SotSample> out;
  for (const auto &[rec, segs] : segments) {
    const auto &ws = words_by_rec[rec];
    const auto &us = utts_by_rec[rec];
    for (const Segment &s : segs) {
      SotSample sample = build_reference(rec, s, ws, us);
      if (!sample.tokens.empty()) out.push_back(std::move(sample));
    }
  }
  return out;
}

std::vector<SweepRow> sweep_thresholds(const std::vector<VadStream> &streams,
                                       const VadThresholds &vad,
                                       const std::vector<double> &thresholds) {
  if (thresholds.empty()) throw ConfigError("sweep needs at least one threshold");
  std::vector<Timeline> speech;
  for (const VadStream &s : streams) speech.push_back(binarize_vad(s, vad));
  std::vector<SweepRow> rows(thresholds.size());
  parallel_for(thresholds.size(), [&](std::size_t i) {
    if (!(thresholds[i] > 0.0))
      throw ConfigError(fmt::format("silence threshold must be positive, got {}", thresholds[i]));
    std::vector<Segment> all;
    for (const Timeline &t : speech)
      for (const Segment &s : merge_by_silence(t, thresholds[i])) all.push_back(s);
    rows[i].threshold = thresholds[i];
    rows[i].stats = all.empty() ? SegmentStats{} : segment_stats(all);
  });
  return rows;
}

std::string format_sweep(const std::vector<SweepRow> &rows) {
  std::string out = "threshold\tsegments\tmean_duration\n";
  for (const SweepRow &r : rows)
    out += fmt::format("{:.2f}\t{}\t{:.2f}\n", r.threshold, r.stats.count,
                       r.stats.mean_duration);
  return out;
}

// ---------------------------------------------------------------------------
// End-to-end run

namespace {

struct Manifest {
  std::string config_hash;
  std::vector<std::pair<std::string, std::string>> inputs;
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> stages;
  std::map<std::string, bool> skipped;
};

std::string format_manifest(const PipelineResult &result,
                            const std::vector<std::pair<std::string, std::string>> &inputs,
                            const std::string &failed) {
  std::string out = fmt::format("config\t{}\n", result.config_hash);
  for (const auto &[name, sha] : inputs) out += fmt::format("input\t{}\t{}\n", name, sha);
  for (const StageRecord &s : result.stages) {
    if (s.status == "skipped") {
      out += fmt::format("stage\t{}\tskipped\n", s.stage);
      continue;
    }
    for (const auto &[file, sha] : s.outputs)
      out += fmt::format("stage\t{}\t{}\t{}\n", s.stage, file, sha);
  }
  if (!failed.empty()) out += fmt::format("failed\t{}\n", failed);
  return out;
}

Manifest parse_manifest(const std::string &text) {
  Manifest m;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) f.push_back(field);
    if (f.size() == 2 && f[0] == "config") m.config_hash = f[1];
    else if (f.size() == 3 && f[0] == "input") m.inputs.emplace_back(f[1], f[2]);
    else if (f.size() == 3 && f[0] == "stage" && f[2] == "skipped") m.skipped[f[1]] = true;
    else if (f.size() == 4 && f[0] == "stage") m.stages[f[1]].emplace_back(f[2], f[3]);
  }
  return m;
}

template <typename E>
[[noreturn]] void rethrow_with_stage(const std::string &stage, const E &e) {
  throw E(fmt::format("stage '{}': {}", stage, e.what()));
}

}  // namespace

PipelineResult run_pipeline(const RunConfig &cfg, const PipelineOptions &opts) {
  const std::vector<std::string> findings = validate_config(cfg);
  if (!findings.empty()) {
    std::string msg = "invalid configuration:";
    for (const std::string &f : findings) msg += "\n  " + f;
    throw ConfigError(msg);
  }
  set_workers(cfg.workers);
  const RunPaths &p = cfg.paths;
  const std::filesystem::path dir = p.out_dir;
  std::filesystem::create_directories(dir);

  PipelineResult result;
  result.config_hash = sha256_hex(canonical_config(cfg));
  result.manifest = dir / "manifest.txt";

  std::vector<std::pair<std::string, std::string>> inputs;
  for (const auto &[name, path] :
       std::vector<std::pair<std::string, std::filesystem::path>>{
           {"vad", p.vad},
           {"segments", p.segments},
           {"embeddings", p.embeddings},
           {"reference_rttm", p.reference_rttm},
           {"words", p.words},
           {"utterances", p.utterances},
           {"reference_sot", p.reference_sot},
           {"hypothesis_sot", p.hypothesis_sot}})
    if (!path.empty()) inputs.emplace_back(name, file_sha256(path));

  Manifest previous;
  bool can_resume = false;
  if (opts.resume && std::filesystem::exists(result.manifest)) {
    previous = parse_manifest(read_text_file(result.manifest));
    can_resume = previous.config_hash == result.config_hash && previous.inputs == inputs;
  }

  auto persist = [&](const std::string &failed) {
    write_text_file(result.manifest, format_manifest(result, inputs, failed));
  };

  const bool have_ref_rttm = !p.reference_rttm.empty();
  const bool have_hyp = !p.hypothesis_sot.empty();
  std::map<std::string, std::vector<std::string>> outputs = {
      {"segment", {"segments.txt"}},
      {"diarize", {"sd.rttm"}},
      {"templates", {"templates.emb", "templates_report.txt"}},
      {"remap", {"mapping.txt"}},
      {"score", {"ref.sot", "score.txt"}},
  };
  if (!p.reference_sot.empty()) outputs["score"] = {"score.txt"};

  // Lazily loaded inputs shared across stages.
  std::optional<EmbeddingIndex> embeddings;
  auto load_embeddings = [&]() -> const EmbeddingIndex & {
    if (!embeddings) embeddings = index_embeddings(read_embeddings(p.embeddings));
    return *embeddings;
  };

  auto run_stage = [&](const std::string &stage) {
    if (stage == "segment") {
      SegmentLists segs;
      if (!p.segments.empty()) {
        segs = read_segment_list(p.segments);
      } else {
        switch (cfg.segmentation.method) {
          case SegmentationMethod::kVadMerge:
            segs = segment_vad(read_vad_streams(p.vad), cfg.vad,
                               cfg.segmentation.silence_threshold);
            break;
          case SegmentationMethod::kGroundTruth:
            segs = segment_ground_truth(read_utterances(p.utterances), cfg.segmentation);
            break;
          case SegmentationMethod::kFixedSize:
            segs = segment_fixed(read_words(p.words), read_rttm(p.reference_rttm),
                                 cfg.segmentation);
            break;
        }
      }
      write_segment_list(segs, dir / "segments.txt");
    } else if (stage == "diarize") {
      const SegmentLists segs = read_segment_list(dir / "segments.txt");
      write_rttm(diarize_recordings(segs, load_embeddings(), cfg.diarization), dir / "sd.rttm");
    } else if (stage == "templates") {
      const TemplateOutput t =
          build_templates(read_rttm(dir / "sd.rttm"), load_embeddings(), cfg.templates);
      write_embeddings(t.templates, dir / "templates.emb");
      write_text_file(dir / "templates_report.txt", t.report);
    } else if (stage == "remap") {
      write_mappings(remap_recordings(read_rttm(dir / "sd.rttm"), read_rttm(p.reference_rttm),
                                      cfg.remap_mode),
                     dir / "mapping.txt");
    } else {
      std::vector<SotSample> refs;
      if (!p.reference_sot.empty()) {
        refs = read_sot(p.reference_sot);
      } else {
        refs = build_references(read_segment_list(dir / "segments.txt"), read_words(p.words),
                                read_utterances(p.utterances));
        write_sot(refs, dir / "ref.sot");
      }
      std::vector<SotSample> hyps = read_sot(p.hypothesis_sot);
      if (have_ref_rttm) hyps = apply_mappings(hyps, read_mappings(dir / "mapping.txt"));
      write_text_file(dir / "score.txt",
                      format_score_report(score_report(refs, hyps, cfg.score)));
    }
  };

  bool reusing = can_resume;
  for (const std::string &stage : kStages) {
    StageRecord rec;
    rec.stage = stage;
    const bool skip = (stage == "remap" && !have_ref_rttm) || (stage == "score" && !have_hyp);
    if (skip) {
      rec.status = "skipped";
      result.stages.push_back(rec);
      persist("");
      continue;
    }
    if (reusing) {
      auto it = previous.stages.find(stage);
      bool intact = it != previous.stages.end() && it->second.size() == outputs[stage].size();
      if (intact)
        for (const auto &[file, sha] : it->second)
          if (!std::filesystem::exists(dir / file) || file_sha256(dir / file) != sha) {
            intact = false;
            break;
          }
      if (intact) {
        rec.status = "resumed";
        rec.outputs = it->second;
        result.stages.push_back(rec);
        persist("");
        continue;
      }
      reusing = false;
    }
    try {
      run_stage(stage);
    } catch (const ConfigError &e) {
      persist(stage);
      rethrow_with_stage(stage, e);
    } catch (const DataError &e) {
      persist(stage);
      rethrow_with_stage(stage, e);
    } catch (const std::exception &e) {
      persist(stage);
      throw DataError(fmt::format("stage '{}': {}", stage, e.what()));
    }
    rec.status = "ran";
    for (const std::string &file : outputs[stage])
      rec.outputs.emplace_back(file, file_sha256(dir / file));
    result.stages.push_back(rec);
    persist("");
  }
  return result;
}

}  // namespace sastk
