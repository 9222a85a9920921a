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

#ifndef SASTK_KERNELS_H_
#define SASTK_KERNELS_H_

// Data-parallel inner loops. Each OpenMP kernel has a plain serial
// counterpart (suffix _serial) that the tests use as the reference and the
// benchmark compares against. The parallel versions are deterministic: their
// results do not depend on the number of threads.

#include <cstddef>
#include <span>
#include <vector>

#include "sastk/linalg.h"

namespace sastk::kernels {

// M(i,j) = <r_i, r_j> / (|r_i| |r_j|) over the rows of `rows`, diagonal set
// to exactly 1. Throws DataError for a zero row.
Matrix cosine_similarity(const Matrix &rows);
Matrix cosine_similarity_serial(const Matrix &rows);

// out[offset + n] += sum_k signal[k] * ir[n - k]. Contributions that fall
// past the end of `out` are dropped.
void convolve_add(std::span<const double> signal, std::span<const double> ir,
                  std::size_t offset, std::span<double> out);
void convolve_add_serial(std::span<const double> signal,
                         std::span<const double> ir, std::size_t offset,
                         std::span<double> out);

// Full linear convolution through FFTW; used for audio-length inputs.
std::vector<double> convolve_fft(std::span<const double> signal,
                                 std::span<const double> ir);

struct Point3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

double distance(const Point3 &a, const Point3 &b);

struct ImageSourceParams {
  Point3 room;    // dimensions (m)
  Point3 source;  // position (m)
  Point3 mic;     // position (m)
  double reflection = 0.0;  // pressure reflection coefficient of every wall
  double sample_rate = 16000.0;
  double speed_of_sound = 343.0;
  std::size_t length = 0;   // taps
  int max_order = -1;       // max reflections per image; < 0 means unbounded
};

// Image-source room impulse response with frequency-independent walls and
// nearest-sample placement. Each image contributes
// reflection^order / (4 pi d) at tap round(d / c * fs).
std::vector<double> image_source_rir(const ImageSourceParams &params);
std::vector<double> image_source_rir_serial(const ImageSourceParams &params);

// In-place second-order high-pass (Allen and Berkley, 100 Hz by default).
// Removes the DC build-up of many same-sign images; output sample 0 equals
// input sample 0.
void image_source_highpass(std::span<double> rir, double sample_rate, double cutoff = 100.0);

}  // namespace sastk::kernels

#endif  // SASTK_KERNELS_H_
