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

// Command-line front end: one subcommand per stage plus the end-to-end run.
//
//   sastk segment   --method vad --vad vad.txt --silence-threshold 0.5 --out seg.txt
//   sastk diarize   --embeddings emb.txt --segments seg.txt --max-speakers 8 --seed 1 --out sd.rttm
//   sastk templates --rttm sd.rttm --embeddings emb.txt --filter-len 2:5 --selection all --no-overlap --out t.emb
//   sastk remap     --sd sd.rttm --ref ref.rttm --mode literal --out map.txt
//   sastk score     --ref ref.sot --hyp hyp.sot --mapping map.txt --by-speakers 1,2,3
//   sastk simulate  --catalog catalog.csv --out dir --count 100 --seed 7
//   sastk pipeline  --config run.ini [--set section.key=value]... [--resume]
//   sastk sweep     --vad vad.txt --thresholds 0.1,0.3,0.5,0.7,0.9
//
// Exit status: 0 ok, 2 configuration error, 3 data error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sastk/config.h"
#include "sastk/error.h"
#include "sastk/pipeline.h"
#include "sastk/simulate.h"

namespace {

using namespace sastk;

void emit(const std::string &out, const std::string &text) {
  if (out.empty() || out == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    write_text_file(out, text);
  }
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"sastk: meeting segmentation, diarization and speaker-attributed scoring"};
  app.require_subcommand(1);
  int workers = -1;
  app.add_option("--workers", workers, "worker threads (default: $SASTK_WORKERS or all cores)");

  // segment
  auto *seg = app.add_subcommand("segment", "split recordings into segments");
  std::string seg_method = "vad", seg_vad, seg_utts, seg_words, seg_ref, seg_out;
  SegmentationConfig seg_cfg;
  VadThresholds seg_th;
  seg->add_option("--method", seg_method, "fixed, gt or vad")->capture_default_str();
  seg->add_option("--vad", seg_vad, "VAD probability streams (vad)");
  seg->add_option("--utterances", seg_utts, "utterance CSV (gt)");
  seg->add_option("--words", seg_words, "word CSV (fixed)");
  seg->add_option("--reference", seg_ref, "reference RTTM, source of overlap regions (fixed)");
  seg->add_option("--silence-threshold", seg_cfg.silence_threshold)->capture_default_str();
  seg->add_option("--chunk", seg_cfg.chunk)->capture_default_str();
  seg->add_option("--hop", seg_cfg.hop)->capture_default_str();
  seg->add_option("--max-group", seg_cfg.max_group)->capture_default_str();
  seg->add_option("--overlap-margin", seg_cfg.overlap_margin)->capture_default_str();
  seg->add_option("--onset", seg_th.onset)->capture_default_str();
  seg->add_option("--offset", seg_th.offset)->capture_default_str();
  seg->add_option("--min-speech", seg_th.min_speech)->capture_default_str();
  seg->add_option("--min-silence", seg_th.min_silence)->capture_default_str();
  seg->add_option("--out", seg_out, "output segment list (default stdout)");

  // diarize
  auto *dia = app.add_subcommand("diarize", "spectral clustering of segment embeddings");
  std::string dia_emb, dia_seg, dia_out;
  DiarizationConfig dia_cfg;
  std::optional<std::size_t> dia_k;
  dia->add_option("--embeddings", dia_emb)->required();
  dia->add_option("--segments", dia_seg)->required();
  dia->add_option("--max-speakers", dia_cfg.max_speakers)->capture_default_str();
  dia->add_option("--k", dia_k, "fixed number of speakers");
  dia->add_option("--percentile", dia_cfg.affinity_percentile, "affinity pruning percentile")
      ->capture_default_str();
  dia->add_option("--restarts", dia_cfg.kmeans_restarts)->capture_default_str();
  dia->add_option("--seed", dia_cfg.seed)->required();
  dia->add_option("--out", dia_out, "output RTTM (default stdout)");

  // templates
  auto *tpl = app.add_subcommand("templates", "average speaker embedding templates");
  std::string tpl_rttm, tpl_emb, tpl_len, tpl_sel = "all", tpl_out, tpl_report;
  bool tpl_no_overlap = false;
  tpl->add_option("--rttm", tpl_rttm, "speaker timelines (diarization output)")->required();
  tpl->add_option("--embeddings", tpl_emb)->required();
  tpl->add_option("--filter-len", tpl_len, "candidate length range min:max");
  tpl->add_option("--selection", tpl_sel, "all or n:<count>")->capture_default_str();
  tpl->add_flag("--no-overlap", tpl_no_overlap, "use exclusive regions only");
  tpl->add_option("--out", tpl_out, "template embeddings (default stdout)");
  tpl->add_option("--report", tpl_report, "support statistics");

  // remap
  auto *rmp = app.add_subcommand("remap", "map diarized ids to reference ids by IoU");
  std::string rmp_sd, rmp_ref, rmp_mode = "literal", rmp_out;
  rmp->add_option("--sd", rmp_sd)->required();
  rmp->add_option("--ref", rmp_ref)->required();
  rmp->add_option("--mode", rmp_mode, "literal or one_to_one")->capture_default_str();
  rmp->add_option("--out", rmp_out, "mapping file (default stdout)");

  // score
  auto *scr = app.add_subcommand("score", "WER, SER and speaker counting");
  std::string scr_ref, scr_hyp, scr_map, scr_cmp, scr_out;
  std::vector<std::size_t> scr_by = {1, 2, 3};
  ReportOptions scr_opts;
  scr->add_option("--ref", scr_ref)->required();
  scr->add_option("--hyp", scr_hyp)->required();
  scr->add_option("--mapping", scr_map, "speaker id mapping from remap");
  scr->add_option("--compare", scr_cmp, "second hypothesis for the matched-pair test");
  scr->add_option("--by-speakers", scr_by)->delimiter(',')->capture_default_str();
  scr->add_flag("--include-sc", scr_opts.score.include_change_tokens,
                "keep <sc> tokens in WER");
  scr->add_flag("--joint-ser", scr_opts.score.joint_ser, "count word and speaker errors jointly");
  scr->add_option("--out", scr_out, "report file (default stdout)");

  // simulate
  auto *sim = app.add_subcommand("simulate", "simulate far-field multi-speaker mixtures");
  std::string sim_catalog;
  SimulationConfig sim_cfg;
  bool sim_no_audio = false;
  std::string sim_out;
  sim->add_option("--catalog", sim_catalog)->required();
  sim->add_option("--out", sim_out)->required();
  sim->add_option("--count", sim_cfg.count)->capture_default_str();
  sim->add_option("--seed", sim_cfg.seed)->required();
  sim->add_option("--min-speakers", sim_cfg.min_speakers)->capture_default_str();
  sim->add_option("--max-speakers", sim_cfg.max_speakers)->capture_default_str();
  sim->add_option("--sample-rate", sim_cfg.sample_rate)->capture_default_str();
  sim->add_flag("--plan-only", sim_no_audio, "write plans and transcripts, no audio");

  // pipeline
  auto *pip = app.add_subcommand("pipeline", "segment, diarize, templates, remap, score");
  std::string pip_config;
  std::vector<std::string> pip_set;
  bool pip_resume = false;
  pip->add_option("--config", pip_config)->required();
  pip->add_option("--set", pip_set, "override section.key=value");
  pip->add_flag("--resume", pip_resume, "reuse intact stage outputs");

  // sweep
  auto *swp = app.add_subcommand("sweep", "segment counts over a silence threshold grid");
  std::string swp_vad, swp_out;
  std::vector<double> swp_th = {0.1, 0.3, 0.5, 0.7, 0.9};
  VadThresholds swp_vth;
  swp->add_option("--vad", swp_vad)->required();
  swp->add_option("--thresholds", swp_th)->delimiter(',')->capture_default_str();
  swp->add_option("--onset", swp_vth.onset)->capture_default_str();
  swp->add_option("--offset", swp_vth.offset)->capture_default_str();
  swp->add_option("--min-speech", swp_vth.min_speech)->capture_default_str();
  swp->add_option("--min-silence", swp_vth.min_silence)->capture_default_str();
  swp->add_option("--out", swp_out, "table (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    set_workers(workers >= 0 ? workers : default_workers());

    if (*seg) {
      seg_cfg.method = parse_segmentation_method(seg_method);
      seg_cfg.validate();
      SegmentLists lists;
      switch (seg_cfg.method) {
        case SegmentationMethod::kVadMerge:
          if (seg_vad.empty()) throw ConfigError("--method vad needs --vad");
          lists = segment_vad(read_vad_streams(seg_vad), seg_th, seg_cfg.silence_threshold);
          break;
        case SegmentationMethod::kGroundTruth:
          if (seg_utts.empty()) throw ConfigError("--method gt needs --utterances");
          lists = segment_ground_truth(read_utterances(seg_utts), seg_cfg);
          break;
        case SegmentationMethod::kFixedSize:
          if (seg_words.empty() || seg_ref.empty())
            throw ConfigError("--method fixed needs --words and --reference");
          lists = segment_fixed(read_words(seg_words), read_rttm(seg_ref), seg_cfg);
          break;
      }
      emit(seg_out, format_segment_list(lists));
    } else if (*dia) {
      dia_cfg.fixed_k = dia_k;
      const auto index = index_embeddings(read_embeddings(dia_emb));
      emit(dia_out, format_rttm(diarize_recordings(read_segment_list(dia_seg), index, dia_cfg)));
    } else if (*tpl) {
      CandidateFilter filter;
      filter.allow_overlap = !tpl_no_overlap;
      if (!tpl_len.empty()) parse_length_range(tpl_len, filter);
      parse_selection(tpl_sel, filter);
      const TemplateOutput t =
          build_templates(read_rttm(tpl_rttm), index_embeddings(read_embeddings(tpl_emb)), filter);
      emit(tpl_out, format_embeddings(t.templates));
      if (!tpl_report.empty()) write_text_file(tpl_report, t.report);
      else std::cerr << t.report;
    } else if (*rmp) {
      emit(rmp_out, format_mappings(remap_recordings(read_rttm(rmp_sd), read_rttm(rmp_ref),
                                                     parse_remap_mode(rmp_mode))));
    } else if (*scr) {
      scr_opts.by_speakers = scr_by;
      const auto refs = read_sot(scr_ref);
      auto hyps = read_sot(scr_hyp);
      std::optional<std::vector<SotSample>> cmp;
      if (!scr_cmp.empty()) cmp = read_sot(scr_cmp);
      if (!scr_map.empty()) {
        const RecordingMappings m = read_mappings(scr_map);
        hyps = apply_mappings(hyps, m);
        if (cmp) cmp = apply_mappings(*cmp, m);
      }
      emit(scr_out, format_score_report(
                        score_report(refs, hyps, scr_opts, cmp ? &*cmp : nullptr)));
    } else if (*sim) {
      sim_cfg.out_dir = sim_out;
      sim_cfg.render_audio = !sim_no_audio;
      const auto mixtures = run_simulation(read_catalog(sim_catalog), sim_cfg);
      std::cerr << fmt::format("simulated {} mixtures into {}\n", mixtures.size(), sim_out);
    } else if (*pip) {
      RunConfig cfg = load_run_config(pip_config, pip_set);
      if (workers >= 0) cfg.workers = workers;
      else if (cfg.workers == 0) cfg.workers = default_workers();
      PipelineOptions opts;
      opts.resume = pip_resume;
      const PipelineResult r = run_pipeline(cfg, opts);
      for (const StageRecord &s : r.stages) std::cerr << fmt::format("{}: {}\n", s.stage, s.status);
      std::cerr << fmt::format("manifest: {}\n", r.manifest.string());
    } else if (*swp) {
      emit(swp_out, format_sweep(sweep_thresholds(read_vad_streams(swp_vad), swp_vth, swp_th)));
    }
  } catch (const ConfigError &e) {
    std::cerr << "sastk: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const DataError &e) {
    std::cerr << "sastk: data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception &e) {
    std::cerr << "sastk: error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
