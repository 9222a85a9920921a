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

// Serial vs OpenMP timings for the hot kernels.

#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "sastk/kernels.h"
#include "sastk/linalg.h"
#include "sastk/scoring.h"

namespace {

using namespace sastk;

Matrix random_rows(std::size_t n, std::size_t d) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  Matrix m(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = g(rng);
  return m;
}

std::vector<double> random_signal(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double &x : v) x = u(rng);
  return v;
}

kernels::ImageSourceParams room() {
  kernels::ImageSourceParams p;
  p.room = {6.0, 5.0, 2.8};
  p.source = {2.0, 1.5, 2.1};
  p.mic = {3.1, 2.4, 1.3};
  p.reflection = 0.85;
  p.length = 8000;
  return p;
}

std::vector<SequencePair> random_pairs(std::size_t n) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> word(0, 20), len(10, 60);
  std::vector<SequencePair> out(n);
  for (SequencePair &p : out) {
    for (int i = len(rng); i > 0; --i) p.ref.push_back("w" + std::to_string(word(rng)));
    for (int i = len(rng); i > 0; --i) p.hyp.push_back("w" + std::to_string(word(rng)));
  }
  return out;
}

void BM_CosineSerial(benchmark::State &state) {
  const Matrix m = random_rows(static_cast<std::size_t>(state.range(0)), 192);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::cosine_similarity_serial(m));
}
void BM_CosineParallel(benchmark::State &state) {
  const Matrix m = random_rows(static_cast<std::size_t>(state.range(0)), 192);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::cosine_similarity(m));
}
BENCHMARK(BM_CosineSerial)->Arg(300)->Arg(1000);
BENCHMARK(BM_CosineParallel)->Arg(300)->Arg(1000);

void BM_ConvolveSerial(benchmark::State &state) {
  const auto sig = random_signal(static_cast<std::size_t>(state.range(0)), 1);
  const auto ir = random_signal(4000, 2);
  std::vector<double> out(sig.size() + ir.size() - 1);
  for (auto _ : state) {
    kernels::convolve_add_serial(sig, ir, 0, out);
    benchmark::ClobberMemory();
  }
}
void BM_ConvolveParallel(benchmark::State &state) {
  const auto sig = random_signal(static_cast<std::size_t>(state.range(0)), 1);
  const auto ir = random_signal(4000, 2);
  std::vector<double> out(sig.size() + ir.size() - 1);
  for (auto _ : state) {
    kernels::convolve_add(sig, ir, 0, out);
    benchmark::ClobberMemory();
  }
}
void BM_ConvolveFft(benchmark::State &state) {
  const auto sig = random_signal(static_cast<std::size_t>(state.range(0)), 1);
  const auto ir = random_signal(4000, 2);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::convolve_fft(sig, ir));
}
BENCHMARK(BM_ConvolveSerial)->Arg(16000);
BENCHMARK(BM_ConvolveParallel)->Arg(16000);
BENCHMARK(BM_ConvolveFft)->Arg(16000);

void BM_RirSerial(benchmark::State &state) {
  const auto p = room();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::image_source_rir_serial(p));
}
void BM_RirParallel(benchmark::State &state) {
  const auto p = room();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::image_source_rir(p));
}
BENCHMARK(BM_RirSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RirParallel)->Unit(benchmark::kMillisecond);

void BM_AlignSerial(benchmark::State &state) {
  const auto pairs = random_pairs(2000);
  for (auto _ : state) benchmark::DoNotOptimize(align_batch_serial(pairs));
}
void BM_AlignParallel(benchmark::State &state) {
  const auto pairs = random_pairs(2000);
  for (auto _ : state) benchmark::DoNotOptimize(align_batch(pairs));
}
BENCHMARK(BM_AlignSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AlignParallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
