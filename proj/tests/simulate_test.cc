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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include <doctest.h>
#include <fmt/format.h>

#include "oracles.h"
#include "sastk/error.h"
#include "sastk/simulate.h"
#include "sastk/sot.h"

using namespace sastk;
namespace fs = std::filesystem;

namespace {

std::vector<CatalogEntry> make_catalog(std::size_t speakers, std::size_t per_speaker) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dur(0.8, 8.0);
  std::vector<CatalogEntry> out;
  for (std::size_t s = 0; s < speakers; ++s)
    for (std::size_t u = 0; u < per_speaker; ++u) {
      const std::string spk = "spk" + std::to_string(s);
      const std::string id = spk + "_" + std::to_string(u);
      out.push_back({id, spk, std::round(dur(rng) * 100) / 100, "w" + id + " x" + id, ""});
    }
  return out;
}

std::uint32_t le32(const std::string &b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[at + i]);
  return v;
}

fs::path scratch(const std::string &name) {
  const fs::path d = fs::temp_directory_path() / ("sastk_sim_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("room sampling ranges") {
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const RoomSpec r = sample_room(seed, 3);
    const auto v = room_violations(r);
    REQUIRE_MESSAGE(v.empty(), "seed " << seed << ": " << v.front());
    // restated independently of room_violations
    CHECK((r.size.x >= 3 && r.size.x <= 8 && r.size.y >= 3 && r.size.y <= 8));
    CHECK((r.size.z >= 2.4 && r.size.z <= 3.0 && r.rt60 >= 0.4 && r.rt60 <= 1.0));
    const kernels::Point3 c{r.size.x / 2, r.size.y / 2, r.size.z / 2};
    CHECK(kernels::distance(r.mic, c) <= 0.5 + 1e-12);
    for (const auto &s : r.sources) {
      CHECK((s.x >= 0.5 && s.x <= r.size.x - 0.5 && s.y >= 0.5 && s.y <= r.size.y - 0.5));
      CHECK(s.z <= r.size.z - 0.1 + 1e-12);
      CHECK(s.z >= std::min(r.size.z / 2 + 0.6, r.size.z - 0.1) - 1e-12);
      CHECK(s.z <= r.size.z / 2 + 0.8 + 1e-12);
    }
  }
  const RoomSpec a = sample_room(42), b = sample_room(42);
  CHECK(a.size.x == b.size.x);
  CHECK(a.sources.size() == b.sources.size());
  CHECK(a.sources[0].z == b.sources[0].z);
}

TEST_CASE("room violations are reported") {
  RoomSpec r = sample_room(1, 1);
  r.size.x = 9;
  CHECK_FALSE(room_violations(r).empty());
  r = sample_room(1, 1);
  r.sources[0].x = 0.2;
  CHECK_FALSE(room_violations(r).empty());
  // smallest room still fits a source
  RoomSpec tiny{{3, 3, 2.4}, 0.4, {1.5, 1.5, 1.2}, {{0.5, 2.5, 1.85}}};
  CHECK(room_violations(tiny).empty());
}

TEST_CASE("sabine absorption") {
  RoomSpec r{{5, 4, 3}, 0.5, {2.5, 2, 1.5}, {{1, 1, 2.2}}};
  const double v = 60, s = 2 * (20 + 15 + 12);
  CHECK(sabine_absorption(r) == doctest::Approx(0.161 * v / (s * 0.5)));
  r.rt60 = 0.05;
  CHECK_THROWS_AS(sabine_absorption(r), ConfigError);
}

TEST_CASE("generated rir") {
  const RoomSpec r = sample_room(7, 2);
  for (std::size_t src = 0; src < 2; ++src) {
    const auto h = generate_rir(r, src, 16000.0);
    const double d = kernels::distance(r.sources[src], r.mic);
    const auto tap = static_cast<std::size_t>(std::lround(d / kSpeedOfSound * 16000.0));
    CHECK(h.size() == tap + static_cast<std::size_t>(std::ceil(r.rt60 * 16000.0)));
    auto first = std::find_if(h.begin(), h.end(), [](double x) { return x != 0.0; });
    CHECK(static_cast<std::size_t>(first - h.begin()) == tap);
  }
  CHECK_THROWS(generate_rir(r, 5, 16000.0));

  // longer reverberation decays more slowly
  RoomSpec a{{6, 5, 2.8}, 0.4, {3, 2.5, 1.4}, {{1.0, 1.0, 2.1}}};
  RoomSpec b = a;
  b.rt60 = 0.9;
  const double ta = oracle::schroeder_t60(generate_rir(a, 0, 16000.0), 16000.0);
  const double tb = oracle::schroeder_t60(generate_rir(b, 0, 16000.0), 16000.0);
  CHECK(tb > 1.5 * ta);
}

TEST_CASE("mixture plans") {
  const auto cat = make_catalog(12, 4);
  std::map<std::string, const CatalogEntry *> by_id;
  for (const auto &e : cat) by_id[e.utterance_id] = &e;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const std::size_t n = 1 + seed % 3;
    const MixturePlan p = plan_mixture(cat, n, seed);
    REQUIRE(p.utterances.size() == n);
    CHECK(p.utterances[0].start == 0.0);
    std::set<std::string> spk;
    for (std::size_t j = 0; j < n; ++j) {
      const auto &u = p.utterances[j];
      spk.insert(u.speaker_id);
      CHECK(by_id.at(u.utterance_id)->speaker_id == u.speaker_id);
      CHECK(u.duration == by_id.at(u.utterance_id)->duration);
      if (j > 0) {
        const double gap = u.start - p.utterances[j - 1].start;
        CHECK(gap >= 0.5);
        CHECK(gap <= p.utterances[j - 1].duration);
      }
    }
    CHECK(spk.size() == n);
    // FIFO: transcript words appear in start order
    std::vector<std::string> expect;
    for (std::size_t j = 0; j < n; ++j) {
      if (j > 0) expect.push_back("<sc>");
      expect.push_back("w" + p.utterances[j].utterance_id);
      expect.push_back("x" + p.utterances[j].utterance_id);
    }
    CHECK(p.transcript.tokens == expect);
    CHECK(change_token_count(p.transcript) == n);
    CHECK(sample_findings(p.transcript).empty());
  }
  CHECK_THROWS_AS(plan_mixture(make_catalog(2, 3), 3, 0), DataError);
  const MixturePlan a = plan_mixture(cat, 3, 5), b = plan_mixture(cat, 3, 5);
  CHECK(a.transcript == b.transcript);
}

TEST_CASE("short utterances only go last") {
  auto cat = make_catalog(3, 1);
  cat[0].duration = 0.3;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const MixturePlan p = plan_mixture(cat, 3, seed);
    for (std::size_t j = 0; j + 1 < p.utterances.size(); ++j)
      CHECK(p.utterances[j].duration >= 0.5);
  }
  cat[1].duration = 0.2;
  CHECK_THROWS_AS(plan_mixture(cat, 3, 0), DataError);
}

TEST_CASE("template assignment") {
  std::vector<std::string> pool;
  for (int i = 0; i < 20; ++i) pool.push_back("p" + std::to_string(i));
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::vector<std::string> actual{"p3", "p17", "p8"};
    auto t = assign_templates(actual, pool, seed);
    CHECK(t.size() == 8);
    CHECK(std::set<std::string>(t.begin(), t.end()).size() == 8);
    for (const auto &a : actual) CHECK(std::count(t.begin(), t.end(), a) == 1);
    for (const auto &x : t) CHECK(std::count(pool.begin(), pool.end(), x) == 1);
    CHECK(assign_templates(actual, pool, seed) == t);
  }
  CHECK(assign_templates({"p0"}, pool, 3).size() == 8);
  // repeated pool entries count once
  std::vector<std::string> small(pool.begin(), pool.begin() + 7);
  small.push_back("p0");
  CHECK_THROWS_AS(assign_templates({"p0"}, small, 1), DataError);
}

TEST_CASE("wav header arithmetic and round trip") {
  Audio a;
  a.samples.assign(16000, 0.0);
  const std::string bytes = encode_wav(a);
  CHECK(bytes.size() == 32044);
  CHECK(bytes.substr(0, 4) == "RIFF");
  CHECK(le32(bytes, 4) == 32044 - 8);
  CHECK(le32(bytes, 40) == 32000);

  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> pcm(-32768, 32767);
  Audio st;
  st.channels = 2;
  st.sample_rate = 8000;
  for (int i = 0; i < 1000; ++i) st.samples.push_back(pcm(rng) / 32768.0);
  const Audio back = decode_wav(encode_wav(st), "mem");
  CHECK(back.channels == 2);
  CHECK(back.sample_rate == 8000);
  CHECK(back.samples == st.samples);
  CHECK(back.channel0().size() == 500);

  std::string bad = encode_wav(a);
  bad[34] = 24;  // bits per sample
  CHECK_THROWS_AS(decode_wav(bad, "mem"), DataError);
}

TEST_CASE("rendering") {
  MixturePlan p;
  p.utterances = {{"u0", "A", 0, "", "", 0.5, 0.0}, {"u1", "B", 1, "", "", 0.5, 1.0}};
  Audio w0, w1;
  w0.sample_rate = w1.sample_rate = 100;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int i = 0; i < 50; ++i) {
    w0.samples.push_back(u(rng));
    w1.samples.push_back(u(rng));
  }
  const std::vector<std::vector<double>> unit{{1.0}, {1.0}};
  const RenderResult r = render_mixture(p, unit, {w0, w1}, 100);
  CHECK(r.scale == 1.0);
  REQUIRE(r.samples.size() >= 150);
  double e_in = 0, e_out = 0;
  for (int i = 0; i < 50; ++i) {
    CHECK(r.samples[static_cast<std::size_t>(i)] == w0.samples[static_cast<std::size_t>(i)]);
    CHECK(r.samples[static_cast<std::size_t>(100 + i)] == w1.samples[static_cast<std::size_t>(i)]);
    e_in += w0.samples[static_cast<std::size_t>(i)] * w0.samples[static_cast<std::size_t>(i)] +
            w1.samples[static_cast<std::size_t>(i)] * w1.samples[static_cast<std::size_t>(i)];
  }
  for (double x : r.samples) e_out += x * x;
  CHECK(e_out == doctest::Approx(e_in).epsilon(1e-6));

  // superposition with real impulse responses
  const std::vector<std::vector<double>> rirs{{0.5, 0.2, -0.1}, {0.3, 0.0, 0.4, 0.1}};
  MixturePlan solo0 = p, solo1 = p;
  solo0.utterances.resize(1);
  solo1.utterances.erase(solo1.utterances.begin());
  const auto both = render_mixture(p, rirs, {w0, w1}, 100).samples;
  const auto only0 = render_mixture(solo0, rirs, {w0}, 100).samples;
  const auto only1 = render_mixture(solo1, rirs, {w1}, 100).samples;
  for (std::size_t i = 0; i < both.size(); ++i) {
    const double a = i < only0.size() ? only0[i] : 0.0;
    const double b = i < only1.size() ? only1[i] : 0.0;
    CHECK(both[i] == doctest::Approx(a + b).epsilon(1e-12).scale(1.0));
  }

  // loud input is brought to -1 dBFS
  Audio loud = w0;
  for (double &x : loud.samples) x *= 10;
  const auto big = render_mixture(solo0, unit, {loud}, 100);
  double peak = 0;
  for (double x : big.samples) peak = std::max(peak, std::abs(x));
  CHECK(peak == doctest::Approx(std::pow(10.0, -1.0 / 20)));
  CHECK(big.scale < 1.0);

  Audio quiet;
  quiet.sample_rate = 100;
  quiet.samples.assign(50, 0.0);
  for (double x : render_mixture(solo0, unit, {quiet}, 100).samples) CHECK(x == 0.0);
  quiet.sample_rate = 200;
  CHECK_THROWS_AS(render_mixture(solo0, unit, {quiet}, 100), DataError);
}

TEST_CASE("job seeds") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(job_seed(7, i));
  CHECK(seen.size() == 1000);
  CHECK(job_seed(7, 3) == job_seed(7, 3));
  CHECK(job_seed(7, 3) != job_seed(8, 3));
}

TEST_CASE("simulation run") {
  const fs::path dir = scratch("run");
  // catalog of short tones, one file per utterance
  std::string csv = "utterance_id,speaker_id,duration,text,path\n";
  for (int s = 0; s < 10; ++s)
    for (int u = 0; u < 2; ++u) {
      Audio a;
      const double dur = 0.6 + 0.1 * u + 0.02 * s;
      const std::size_t n = static_cast<std::size_t>(std::lround(dur * 16000));
      for (std::size_t i = 0; i < n; ++i)
        a.samples.push_back(0.1 * std::sin(2 * std::numbers::pi * (200.0 + 50 * s) *
                                           static_cast<double>(i) / 16000));
      const std::string id = "s" + std::to_string(s) + "u" + std::to_string(u);
      write_wav(a, dir / (id + ".wav"));
      csv += id + ",s" + std::to_string(s) + "," + std::to_string(dur) + ",\"hello, " + id +
             "\"," + id + ".wav\n";
    }
  {
    std::ofstream(dir / "catalog.csv") << csv;
  }
  const auto cat = read_catalog(dir / "catalog.csv");
  REQUIRE(cat.size() == 20);
  CHECK(cat[0].text == "hello, s0u0");
  CHECK(cat[0].audio_path == (dir / "s0u0.wav").string());

  SimulationConfig cfg;
  cfg.out_dir = dir / "out1";
  cfg.count = 4;
  cfg.seed = 11;
  fs::create_directories(cfg.out_dir);
  const auto mixes = run_simulation(cat, cfg);
  REQUIRE(mixes.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const fs::path wav = cfg.out_dir / fmt::format("mix_{:05d}.wav", i);
    REQUIRE(fs::exists(wav));
    const Audio a = read_wav(wav);
    const auto &last = mixes[i].plan.utterances.back();
    CHECK(a.frames() >= static_cast<std::size_t>((last.start + last.duration) * 16000) - 1);
  }
  const auto refs = read_sot(cfg.out_dir / "ref.sot");
  REQUIRE(refs.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(refs[i] == mixes[i].plan.transcript);

  // the same seed in another directory gives the same bytes
  SimulationConfig cfg2 = cfg;
  cfg2.out_dir = dir / "out2";
  fs::create_directories(cfg2.out_dir);
  run_simulation(cat, cfg2);
  auto slurp = [](const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  for (const char *f : {"ref.sot", "templates.txt", "plan.txt", "mix_00003.wav"})
    CHECK(slurp(cfg.out_dir / f) == slurp(cfg2.out_dir / f));
  fs::remove_all(dir);
}

TEST_CASE("catalog errors") {
  const fs::path dir = scratch("cat");
  std::ofstream(dir / "a.csv") << "utterance_id,speaker_id,text\nu,s,hi\n";
  CHECK_THROWS_AS(read_catalog(dir / "a.csv"), DataError);
  std::ofstream(dir / "b.csv") << "utterance_id,speaker_id,duration,text\nu,s,-1,hi\n";
  CHECK_THROWS_AS(read_catalog(dir / "b.csv"), DataError);
  std::ofstream(dir / "c.csv") << "utterance_id,speaker_id,duration,text\nu,s,1.0, \n";
  CHECK_THROWS_AS(read_catalog(dir / "c.csv"), DataError);
  CHECK_THROWS_AS(read_catalog(dir / "missing.csv"), DataError);
  fs::remove_all(dir);
}
