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

#include "sastk/simulate.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "sastk/error.h"

namespace sastk {

namespace {

double uniform(std::mt19937_64 &rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

constexpr int kMaxRetries = 1000;

}  // namespace

RoomSpec sample_room(std::uint64_t seed, std::size_t num_sources) {
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    RoomSpec room;
    room.size = {uniform(rng, 3.0, 8.0), uniform(rng, 3.0, 8.0), uniform(rng, 2.4, 3.0)};
    room.rt60 = uniform(rng, 0.4, 1.0);
    const Point3 center{room.size.x / 2, room.size.y / 2, room.size.z / 2};
    bool placed = false;
    for (int t = 0; t < kMaxRetries && !placed; ++t) {
      const Point3 off{uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5),
                       uniform(rng, -0.5, 0.5)};
      if (off.x * off.x + off.y * off.y + off.z * off.z <= 0.25) {
        room.mic = {center.x + off.x, center.y + off.y, center.z + off.z};
        placed = true;
      }
    }
    if (!placed) continue;
    for (std::size_t s = 0; s < num_sources; ++s) {
      const double z = std::min(room.size.z / 2 + uniform(rng, 0.6, 0.8), room.size.z - 0.1);
      room.sources.push_back({uniform(rng, 0.5, room.size.x - 0.5),
                              uniform(rng, 0.5, room.size.y - 0.5), z});
    }
    const double volume = room.size.x * room.size.y * room.size.z;
    const double surface = 2.0 * (room.size.x * room.size.y + room.size.x * room.size.z +
                                  room.size.y * room.size.z);
    if (0.161 * volume / (surface * room.rt60) < 1.0 && room_violations(room).empty())
      return room;
  }
  throw DataError(fmt::format("no valid room after {} attempts (seed {})", kMaxRetries, seed));
}

std::vector<std::string> room_violations(const RoomSpec &room) {
  std::vector<std::string> out;
  constexpr double eps = 1e-9;
  auto in = [](double v, double lo, double hi) { return v >= lo - eps && v <= hi + eps; };
  if (!in(room.size.x, 3.0, 8.0)) out.push_back(fmt::format("length {} outside [3,8]", room.size.x));
  if (!in(room.size.y, 3.0, 8.0)) out.push_back(fmt::format("width {} outside [3,8]", room.size.y));
  if (!in(room.size.z, 2.4, 3.0)) out.push_back(fmt::format("height {} outside [2.4,3]", room.size.z));
  if (!in(room.rt60, 0.4, 1.0)) out.push_back(fmt::format("rt60 {} outside [0.4,1]", room.rt60));
  const Point3 center{room.size.x / 2, room.size.y / 2, room.size.z / 2};
  if (kernels::distance(room.mic, center) > 0.5 + eps)
    out.push_back("microphone more than 0.5 m from the room center");
  for (std::size_t i = 0; i < room.sources.size(); ++i) {
    const Point3 &s = room.sources[i];
    if (!in(s.x, 0.5, room.size.x - 0.5) || !in(s.y, 0.5, room.size.y - 0.5))
      out.push_back(fmt::format("source {} closer than 0.5 m to a wall", i));
    const double lo = room.size.z / 2 + 0.6;
    const double hi = std::min(room.size.z / 2 + 0.8, room.size.z - 0.1);
    if (!in(s.z, std::min(lo, hi), hi))
      out.push_back(fmt::format("source {} height {} outside its band", i, s.z));
    if (!(s.z > 0.0 && s.z < room.size.z))
      out.push_back(fmt::format("source {} outside the room", i));
  }
  return out;
}

double sabine_absorption(const RoomSpec &room) {
  const double volume = room.size.x * room.size.y * room.size.z;
  const double surface = 2.0 * (room.size.x * room.size.y + room.size.x * room.size.z +
                                room.size.y * room.size.z);
  if (!(room.rt60 > 0.0)) throw ConfigError("rt60 must be positive");
  const double alpha = 0.161 * volume / (surface * room.rt60);
  if (alpha >= 1.0)
    throw ConfigError(fmt::format(
        "Sabine absorption {:.3f} >= 1 is unphysical; use a larger room or longer rt60",
        alpha));
  return alpha;
}

std::vector<double> generate_rir(const RoomSpec &room, std::size_t source_index,
                                 double sample_rate, int max_order) {
  if (source_index >= room.sources.size())
    throw ConfigError(fmt::format("room has no source {}", source_index));
  const double alpha = sabine_absorption(room);
  const double direct = kernels::distance(room.sources[source_index], room.mic);
  const auto direct_tap =
      static_cast<std::size_t>(std::llround(direct / kSpeedOfSound * sample_rate));
  kernels::ImageSourceParams p;
  p.room = room.size;
  p.source = room.sources[source_index];
  p.mic = room.mic;
  p.reflection = std::sqrt(1.0 - alpha);
  p.sample_rate = sample_rate;
  p.speed_of_sound = kSpeedOfSound;
  p.length = direct_tap + static_cast<std::size_t>(std::ceil(room.rt60 * sample_rate));
  p.max_order = max_order;
  std::vector<double> rir = kernels::image_source_rir(p);
  kernels::image_source_highpass(rir, sample_rate);
  return rir;
}

std::vector<CatalogEntry> read_catalog(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  const std::string source = path.string();
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> col;
  std::size_t width = 0;
  std::vector<CatalogEntry> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto f = split_csv_record(line);
    if (col.empty()) {
      for (std::size_t i = 0; i < f.size(); ++i) col[f[i]] = i;
      for (const char *need : {"utterance_id", "speaker_id", "duration", "text"})
        if (!col.count(need))
          throw DataError(fmt::format("{}:{}: missing column '{}'", source, line_no, need));
      width = f.size();
      continue;
    }
    if (f.size() != width)
      throw DataError(fmt::format("{}:{}: expected {} columns, got {}", source, line_no,
                                  width, f.size()));
    CatalogEntry e;
    e.utterance_id = f[col["utterance_id"]];
    e.speaker_id = f[col["speaker_id"]];
    e.text = f[col["text"]];
    const std::string &d = f[col["duration"]];
    auto [ptr, ec] = std::from_chars(d.data(), d.data() + d.size(), e.duration);
    if (ec != std::errc() || ptr != d.data() + d.size() || !(e.duration > 0.0))
      throw DataError(fmt::format("{}:{}: bad duration '{}'", source, line_no, d));
    if (col.count("path")) {
      e.audio_path = f[col["path"]];
      if (!e.audio_path.empty() && std::filesystem::path(e.audio_path).is_relative())
        e.audio_path = (path.parent_path() / e.audio_path).string();
    }
    if (e.utterance_id.empty() || e.speaker_id.empty())
      throw DataError(fmt::format("{}:{}: empty utterance or speaker id", source, line_no));
    if (e.text.find_first_not_of(" \t") == std::string::npos)
      throw DataError(fmt::format("{}:{}: empty transcript", source, line_no));
    out.push_back(std::move(e));
  }
  return out;
}

MixturePlan plan_mixture(const std::vector<CatalogEntry> &catalog, std::size_t n_speakers,
                         std::uint64_t seed, const std::string &mixture_id) {
  if (n_speakers < 1) throw ConfigError("a mixture needs at least one speaker");
  std::mt19937_64 rng(seed);
  std::map<std::string, std::vector<const CatalogEntry *>> by_speaker;
  for (const CatalogEntry &e : catalog) by_speaker[e.speaker_id].push_back(&e);
  std::vector<std::string> speakers;
  for (const auto &[spk, utts] : by_speaker) speakers.push_back(spk);
  std::shuffle(speakers.begin(), speakers.end(), rng);

  auto long_utts = [&](const std::string &spk) {
    std::vector<const CatalogEntry *> out;
    for (const CatalogEntry *e : by_speaker[spk])
      if (e->duration >= 0.5) out.push_back(e);
    return out;
  };
  auto pick = [&](const std::vector<const CatalogEntry *> &v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };

  std::vector<const CatalogEntry *> chosen;
  std::vector<bool> used(speakers.size(), false);
  for (std::size_t i = 0; i < speakers.size() && chosen.size() + 1 < n_speakers; ++i) {
    auto candidates = long_utts(speakers[i]);
    if (candidates.empty()) continue;
    chosen.push_back(pick(candidates));
    used[i] = true;
  }
  if (chosen.size() + 1 < n_speakers)
    throw DataError(fmt::format(
        "catalog has {} speakers with an utterance of at least 0.5 s; a {}-speaker mixture "
        "needs {}", chosen.size(), n_speakers, n_speakers - 1));
  for (std::size_t i = 0; i < speakers.size() && chosen.size() < n_speakers; ++i) {
    if (used[i]) continue;
    chosen.push_back(pick(by_speaker[speakers[i]]));
    used[i] = true;
  }
  if (chosen.size() < n_speakers)
    throw DataError(fmt::format("catalog has too few usable speakers for a {}-speaker mixture",
                                n_speakers));

  MixturePlan plan;
  plan.mixture_id = mixture_id;
  double start = 0.0, end = 0.0;
  for (std::size_t j = 0; j < chosen.size(); ++j) {
    if (j > 0) {
      const double prev = chosen[j - 1]->duration;
      start += prev > 0.5 ? uniform(rng, 0.5, prev) : 0.5;
    }
    const CatalogEntry &e = *chosen[j];
    plan.utterances.push_back({e.utterance_id, e.speaker_id, j, e.audio_path, e.text,
                               e.duration, start});
    end = std::max(end, start + e.duration);
  }
  plan.transcript.recording_id = mixture_id;
  // whole milliseconds, as written to SOT files
  plan.transcript.segment = {0.0, std::ceil(end * 1000.0 - 1e-6) / 1000.0};
  for (const PlannedUtterance &u : plan.utterances) {
    if (!plan.transcript.speakers.empty() && plan.transcript.speakers.back() != u.speaker_id) {
      plan.transcript.tokens.emplace_back(kSpeakerChange);
      plan.transcript.speakers.push_back(u.speaker_id);
    }
    std::size_t i = 0;
    while (i < u.text.size()) {
      while (i < u.text.size() && (u.text[i] == ' ' || u.text[i] == '\t')) ++i;
      std::size_t j = i;
      while (j < u.text.size() && u.text[j] != ' ' && u.text[j] != '\t') ++j;
      if (j > i) {
        plan.transcript.tokens.push_back(u.text.substr(i, j - i));
        plan.transcript.speakers.push_back(u.speaker_id);
      }
      i = j;
    }
  }
  return plan;
}

std::vector<std::string> assign_templates(const std::vector<std::string> &actual,
                                          const std::vector<std::string> &pool,
                                          std::uint64_t seed, std::size_t count) {
  const std::set<std::string> pool_set(pool.begin(), pool.end());
  const std::set<std::string> actual_set(actual.begin(), actual.end());
  if (actual_set.size() != actual.size()) throw DataError("duplicate actual speakers");
  if (actual.size() > count)
    throw DataError(fmt::format("{} actual speakers exceed {} templates", actual.size(), count));
  if (pool_set.size() < count)
    throw DataError(fmt::format("speaker pool of {} is smaller than {} templates",
                                pool_set.size(), count));
  std::vector<std::string> fillers;
  for (const std::string &s : pool_set)
    if (!actual_set.count(s)) fillers.push_back(s);
  const std::size_t need = count - actual.size();
  if (fillers.size() < need)
    throw DataError(fmt::format("speaker pool has only {} fillers, need {}", fillers.size(), need));
  std::mt19937_64 rng(seed);
  std::vector<std::string> out = actual;
  std::sample(fillers.begin(), fillers.end(), std::back_inserter(out), need, rng);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

RenderResult render_mixture(const MixturePlan &plan,
                            const std::vector<std::vector<double>> &rirs,
                            const std::vector<Audio> &waveforms, int sample_rate) {
  if (waveforms.size() != plan.utterances.size())
    throw DataError(fmt::format("{} waveforms for {} planned utterances", waveforms.size(),
                                plan.utterances.size()));
  std::vector<std::vector<double>> parts;
  std::vector<std::size_t> offsets;
  std::size_t total = 0;
  for (std::size_t j = 0; j < plan.utterances.size(); ++j) {
    const PlannedUtterance &u = plan.utterances[j];
    if (waveforms[j].sample_rate != sample_rate)
      throw DataError(fmt::format("utterance '{}' has sample rate {}, expected {}",
                                  u.utterance_id, waveforms[j].sample_rate, sample_rate));
    if (u.source_index >= rirs.size())
      throw DataError(fmt::format("no RIR for source {}", u.source_index));
    const std::vector<double> signal = waveforms[j].channel0();
    const std::vector<double> &ir = rirs[u.source_index];
    std::vector<double> wet;
    if (signal.size() * ir.size() <= (std::size_t{1} << 22)) {
      wet.assign(signal.empty() || ir.empty() ? 0 : signal.size() + ir.size() - 1, 0.0);
      kernels::convolve_add(signal, ir, 0, wet);
    } else {
      wet = kernels::convolve_fft(signal, ir);
    }
    const auto offset = static_cast<std::size_t>(std::llround(u.start * sample_rate));
    total = std::max(total, offset + wet.size());
    parts.push_back(std::move(wet));
    offsets.push_back(offset);
  }
  RenderResult r;
  r.samples.assign(total, 0.0);
  for (std::size_t j = 0; j < parts.size(); ++j)
    for (std::size_t i = 0; i < parts[j].size(); ++i) r.samples[offsets[j] + i] += parts[j][i];
  double peak = 0.0;
  for (double v : r.samples) peak = std::max(peak, std::abs(v));
  if (peak > 1.0) {
    r.scale = std::pow(10.0, -1.0 / 20.0) / peak;
    for (double &v : r.samples) v *= r.scale;
  }
  return r;
}

std::uint64_t job_seed(std::uint64_t base_seed, std::uint64_t job_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(job_index),
                    static_cast<std::uint32_t>(job_index >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

SimulatedMixture simulate_one(const std::vector<CatalogEntry> &catalog,
                              const SimulationConfig &cfg, std::size_t index) {
  if (cfg.min_speakers < 1 || cfg.min_speakers > cfg.max_speakers)
    throw ConfigError("need 1 <= min_speakers <= max_speakers");
  std::mt19937_64 rng(job_seed(cfg.seed, index));
  const std::size_t n =
      std::uniform_int_distribution<std::size_t>(cfg.min_speakers, cfg.max_speakers)(rng);
  SimulatedMixture m;
  m.room = sample_room(rng(), n);
  m.plan = plan_mixture(catalog, n, rng(), fmt::format("mix_{:05d}", index));
  std::vector<std::string> actual, pool;
  for (const PlannedUtterance &u : m.plan.utterances) actual.push_back(u.speaker_id);
  for (const CatalogEntry &e : catalog) pool.push_back(e.speaker_id);
  m.plan.templates = assign_templates(actual, pool, rng());
  if (cfg.render_audio) {
    std::vector<Audio> waves;
    for (const PlannedUtterance &u : m.plan.utterances) {
      if (u.audio_ref.empty())
        throw DataError(fmt::format("utterance '{}' has no audio path", u.utterance_id));
      waves.push_back(read_wav(u.audio_ref));
    }
    std::vector<std::vector<double>> rirs;
    for (std::size_t s = 0; s < m.room.sources.size(); ++s)
      rirs.push_back(generate_rir(m.room, s, cfg.sample_rate));
    RenderResult r = render_mixture(m.plan, rirs, waves, cfg.sample_rate);
    m.scale = r.scale;
    Audio out;
    out.sample_rate = cfg.sample_rate;
    out.samples = std::move(r.samples);
    write_wav(out, cfg.out_dir / (m.plan.mixture_id + ".wav"));
  }
  return m;
}

std::string format_plan_manifest(const std::vector<SimulatedMixture> &mixtures) {
  std::string out;
  for (const SimulatedMixture &m : mixtures) {
    const RoomSpec &r = m.room;
    out += fmt::format("mixture\t{}\troom={:.4f},{:.4f},{:.4f}\trt60={:.4f}\tmic={:.4f},{:.4f},{:.4f}"
                       "\tscale={:.6f}\n",
                       m.plan.mixture_id, r.size.x, r.size.y, r.size.z, r.rt60, r.mic.x,
                       r.mic.y, r.mic.z, m.scale);
    for (const PlannedUtterance &u : m.plan.utterances) {
      const Point3 &s = r.sources[u.source_index];
      out += fmt::format("utt\t{}\t{}\t{}\tsource={:.4f},{:.4f},{:.4f}\tstart={:.4f}\t"
                         "duration={:.4f}\n",
                         m.plan.mixture_id, u.utterance_id, u.speaker_id, s.x, s.y, s.z,
                         u.start, u.duration);
    }
  }
  return out;
}

std::vector<SimulatedMixture> run_simulation(const std::vector<CatalogEntry> &catalog,
                                             const SimulationConfig &cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  std::vector<SimulatedMixture> out(cfg.count);
  std::vector<std::exception_ptr> errors(cfg.count);
  const auto n = static_cast<long long>(cfg.count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    try {
      out[i] = simulate_one(catalog, cfg, i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto &e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<SotRecord> refs;
  std::string templates;
  for (const SimulatedMixture &m : out) {
    refs.push_back(m.plan.transcript);
    templates += fmt::format("{}\t{}\n", m.plan.mixture_id, fmt::join(m.plan.templates, " "));
  }
  write_sot(refs, cfg.out_dir / "ref.sot");
  write_text_file(cfg.out_dir / "templates.txt", templates);
  write_text_file(cfg.out_dir / "plan.txt", format_plan_manifest(out));
  return out;
}

}  // namespace sastk
