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
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "sastk/config.h"
#include "sastk/error.h"

using namespace sastk;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() : dir(fs::temp_directory_path() / "sastk_config_test") {
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (const char *f : {"vad.txt", "emb.txt", "ref.rttm"}) std::ofstream(dir / f) << "";
  }
  ~Scratch() { fs::remove_all(dir); }
};

const char *kValid =
    "[paths]\n"
    "vad = vad.txt\n"
    "embeddings = emb.txt\n"
    "reference_rttm = ref.rttm\n"
    "out_dir = out\n"
    "[segmentation]\n"
    "method = vad\n"
    "silence_threshold = 0.5\n"
    "[diarization]\n"
    "max_speakers = 6\n"
    "k = auto\n"
    "[templates]\n"
    "selection = n:2\n"
    "length = 2:5\n"
    "allow_overlap = false\n"
    "[remap]\n"
    "mode = one_to_one\n"
    "[score]\n"
    "by_speakers = 1, 2\n"
    "[run]\n"
    "seed = 7\n";

bool mentions(const std::vector<std::string> &findings, const std::string &what) {
  return std::any_of(findings.begin(), findings.end(),
                     [&](const std::string &f) { return f.find(what) != std::string::npos; });
}

}  // namespace

TEST_CASE("a valid config") {
  Scratch s;
  std::ofstream(s.dir / "run.ini") << kValid;
  const RunConfig c = load_run_config(s.dir / "run.ini");
  CHECK(validate_config(c).empty());
  CHECK(c.paths.vad == s.dir / "vad.txt");
  CHECK(c.segmentation.method == SegmentationMethod::kVadMerge);
  CHECK(c.diarization.max_speakers == 6);
  CHECK_FALSE(c.diarization.fixed_k.has_value());
  CHECK(c.diarization.seed == 7);
  CHECK(c.templates.n_longest == std::optional<std::size_t>(2));
  CHECK(c.templates.min_len == 2.0);
  CHECK_FALSE(c.templates.allow_overlap);
  CHECK(c.remap_mode == RemapMode::kOneToOne);
  CHECK(c.score.by_speakers == std::vector<std::size_t>{1, 2});
}

TEST_CASE("findings") {
  Scratch s;
  auto with = [&](std::vector<std::string> overrides) {
    return validate_config(parse_run_config(kValid, overrides, s.dir));
  };
  CHECK(mentions(with({"segmentation.silence_threshold=-1"}), "silence"));
  CHECK(mentions(with({"diarization.k=9"}), "max_speakers"));
  CHECK(mentions(with({"segmentation.onset=0.2", "segmentation.offset=0.4"}), "onset"));
  CHECK(mentions(with({"paths.vad=nowhere.txt"}), "paths.vad"));
  CHECK(mentions(with({"paths.embeddings="}), "paths.embeddings"));
  CHECK(mentions(with({"run.workers=-2"}), "workers"));
  CHECK(mentions(with({"paths.hypothesis_sot=ref.rttm"}), "reference_sot"));
  CHECK(mentions(with({"segmentation.method=gt"}), "paths.utterances"));

  RunConfig no_seed = parse_run_config(kValid, {}, s.dir);
  no_seed.seed.reset();
  CHECK(mentions(validate_config(no_seed), "seed"));
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_run_config("[bogus]\na = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[run]\ncolour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[run]\nseed = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[templates]\nallow_overlap = maybe\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[remap]\nmode = best\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[segmentation]\nmethod = oracle\n"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("", {"no_equals"}), ConfigError);
  CHECK_THROWS_AS(parse_run_config("", {"nodot=1"}), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[run\n"), ConfigError);
  CHECK_THROWS_AS(load_run_config("/nonexistent/run.ini"), ConfigError);
}

TEST_CASE("overrides win over the file") {
  const RunConfig c = parse_run_config(kValid, {"run.seed=99", "diarization.k=3"});
  CHECK(*c.seed == 99);
  CHECK(c.diarization.seed == 99);
  CHECK(c.diarization.fixed_k == std::optional<std::size_t>(3));
}

TEST_CASE("canonical form") {
  const RunConfig a = parse_run_config(kValid);
  const RunConfig b = parse_run_config(kValid, {"paths.out_dir=elsewhere", "run.workers=4"});
  CHECK(canonical_config(a) == canonical_config(b));
  const RunConfig c = parse_run_config(kValid, {"segmentation.silence_threshold=0.25"});
  CHECK(canonical_config(a) != canonical_config(c));
  CHECK(canonical_config(a).find("templates.length=2:5\n") != std::string::npos);
  // the canonical text parses back to the same settings
  std::string ini;
  std::string section;
  std::istringstream in(canonical_config(a));
  for (std::string line; std::getline(in, line);) {
    const auto dot = line.find('.');
    if (line.substr(0, dot) != section) {
      section = line.substr(0, dot);
      ini += "[" + section + "]\n";
    }
    std::string kv = line.substr(dot + 1);
    if (kv == "seed=none") continue;
    ini += kv + "\n";
  }
  CHECK(canonical_config(parse_run_config(ini)) == canonical_config(a));
}

TEST_CASE("worker count from the environment") {
  ::setenv("SASTK_WORKERS", "3", 1);
  CHECK(default_workers() == 3);
  ::setenv("SASTK_WORKERS", "-1", 1);
  CHECK_THROWS_AS(default_workers(), ConfigError);
  ::setenv("SASTK_WORKERS", "x", 1);
  CHECK_THROWS_AS(default_workers(), ConfigError);
  ::unsetenv("SASTK_WORKERS");
  CHECK(default_workers() == 0);
}
