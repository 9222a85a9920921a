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

#ifndef SASTK_SIMULATE_H_
#define SASTK_SIMULATE_H_

// Far-field multi-speaker mixture simulation: random shoebox rooms,
// image-source impulse responses, FIFO utterance scheduling, mixing and
// SOT transcripts with a fixed-size template list per mixture.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sastk/ingest.h"
#include "sastk/kernels.h"
#include "sastk/wav.h"

namespace sastk {

using kernels::Point3;

inline constexpr double kSpeedOfSound = 343.0;
inline constexpr std::size_t kTemplatesPerMixture = 8;

struct RoomSpec {
  Point3 size;  // length, width, height (m)
  double rt60 = 0.0;
  Point3 mic;
  std::vector<Point3> sources;
};

// Length/width in [3,8] m, height in [2.4,3] m, rt60 in [0.4,1] s, mic within
// 0.5 m of the room center, sources at least 0.5 m from the side walls at
// height H/2 + U(0.6,0.8) m, capped 0.1 m below the ceiling.
RoomSpec sample_room(std::uint64_t seed, std::size_t num_sources = 3);

// Violated range constraints; empty when the room is valid.
std::vector<std::string> room_violations(const RoomSpec &room);

// Sabine absorption coefficient alpha = 0.161 V / (S rt60). Throws
// ConfigError when alpha >= 1.
double sabine_absorption(const RoomSpec &room);

// Impulse response of length direct_tap + ceil(rt60 * fs), high-passed as in
// the original image method. max_order < 0 keeps every image that arrives
// within the response.
std::vector<double> generate_rir(const RoomSpec &room, std::size_t source_index,
                                 double sample_rate, int max_order = -1);

struct CatalogEntry {
  std::string utterance_id;
  std::string speaker_id;
  double duration = 0.0;
  std::string text;
  std::string audio_path;  // may be empty
};

// CSV with header utterance_id,speaker_id,duration,text and optional path.
std::vector<CatalogEntry> read_catalog(const std::filesystem::path &path);

struct PlannedUtterance {
  std::string utterance_id;
  std::string speaker_id;
  std::size_t source_index = 0;
  std::string audio_ref;
  std::string text;
  double duration = 0.0;
  double start = 0.0;
};

struct MixturePlan {
  std::string mixture_id;
  std::vector<PlannedUtterance> utterances;  // in start order
  SotSample transcript;
  std::vector<std::string> templates;
};

// One utterance from each of n distinct speakers. The first starts at 0, each
// later one 0.5 s to (previous duration) after the previous start. Utterances
// shorter than 0.5 s are never scheduled before another one. Throws
// DataError when the catalog lacks n usable speakers.
MixturePlan plan_mixture(const std::vector<CatalogEntry> &catalog, std::size_t n_speakers,
                         std::uint64_t seed, const std::string &mixture_id = "mix");

// The actual speakers plus fillers drawn without replacement from the pool,
// shuffled. Throws DataError when the pool has fewer than `count` speakers.
std::vector<std::string> assign_templates(const std::vector<std::string> &actual,
                                          const std::vector<std::string> &pool,
                                          std::uint64_t seed,
                                          std::size_t count = kTemplatesPerMixture);

struct RenderResult {
  std::vector<double> samples;
  double scale = 1.0;  // applied peak normalization (1 when none)
};

// Sums each utterance convolved with its source's RIR, shifted by its start.
// Rescales to a -1 dBFS peak if the sum would clip. All audio must share
// `sample_rate`.
RenderResult render_mixture(const MixturePlan &plan,
                            const std::vector<std::vector<double>> &rirs,
                            const std::vector<Audio> &waveforms, int sample_rate);

// Deterministic per-job seed.
std::uint64_t job_seed(std::uint64_t base_seed, std::uint64_t job_index);

struct SimulationConfig {
  std::filesystem::path out_dir;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  bool render_audio = true;
  int sample_rate = 16000;
  std::size_t min_speakers = 1;
  std::size_t max_speakers = 3;
};

struct SimulatedMixture {
  MixturePlan plan;
  RoomSpec room;
  double scale = 1.0;
};

// Plans (and optionally renders) one mixture.
SimulatedMixture simulate_one(const std::vector<CatalogEntry> &catalog,
                              const SimulationConfig &cfg, std::size_t index);

// Runs `count` jobs in parallel and writes mix_NNNNN.wav (when rendering),
// ref.sot, templates.txt and plan.txt into out_dir. Outputs do not depend on
// scheduling.
std::vector<SimulatedMixture> run_simulation(const std::vector<CatalogEntry> &catalog,
                                             const SimulationConfig &cfg);

std::string format_plan_manifest(const std::vector<SimulatedMixture> &mixtures);

}  // namespace sastk

#endif  // SASTK_SIMULATE_H_
