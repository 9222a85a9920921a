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

#include "sastk/kernels.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <fftw3.h>
#include <fmt/format.h>

#include "sastk/error.h"

namespace sastk::kernels {

namespace {

std::vector<double> row_norms(const Matrix &rows) {
  std::vector<double> norms(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    norms[i] = l2_norm(rows.row(i));
    if (!(norms[i] > 0.0))
      throw DataError(fmt::format("row {} is a zero vector", i));
  }
  return norms;
}

}  // namespace

Matrix cosine_similarity(const Matrix &rows) {
  const std::size_t n = rows.rows();
  const std::vector<double> norms = row_norms(rows);
  Matrix m(n, n);
  const auto signed_n = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (long long ii = 0; ii < signed_n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    m(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double c = dot(rows.row(i), rows.row(j)) / (norms[i] * norms[j]);
      c = std::clamp(c, -1.0, 1.0);
      m(i, j) = c;
      m(j, i) = c;
    }
  }
  return m;
}

Matrix cosine_similarity_serial(const Matrix &rows) {
  const std::size_t n = rows.rows();
  const std::vector<double> norms = row_norms(rows);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        m(i, j) = 1.0;
        continue;
      }
      double c = dot(rows.row(i), rows.row(j)) / (norms[i] * norms[j]);
      m(i, j) = std::clamp(c, -1.0, 1.0);
    }
  }
  return m;
}

void convolve_add(std::span<const double> signal, std::span<const double> ir,
                  std::size_t offset, std::span<double> out) {
  if (signal.empty() || ir.empty() || offset >= out.size()) return;
  const std::size_t full = signal.size() + ir.size() - 1;
  const std::size_t count = std::min(full, out.size() - offset);
  const auto signed_count = static_cast<long long>(count);
#pragma omp parallel for schedule(static)
  for (long long nn = 0; nn < signed_count; ++nn) {
    const auto n = static_cast<std::size_t>(nn);
    const std::size_t k_lo = n >= ir.size() ? n - ir.size() + 1 : 0;
    const std::size_t k_hi = std::min(n, signal.size() - 1);
    double acc = 0.0;
    for (std::size_t k = k_lo; k <= k_hi; ++k) acc += signal[k] * ir[n - k];
    out[offset + n] += acc;
  }
}

void convolve_add_serial(std::span<const double> signal,
                         std::span<const double> ir, std::size_t offset,
                         std::span<double> out) {
  for (std::size_t k = 0; k < signal.size(); ++k) {
    for (std::size_t m = 0; m < ir.size(); ++m) {
      const std::size_t idx = offset + k + m;
      if (idx >= out.size()) break;
      out[idx] += signal[k] * ir[m];
    }
  }
}

std::vector<double> convolve_fft(std::span<const double> signal,
                                 std::span<const double> ir) {
  if (signal.empty() || ir.empty()) return {};
  const std::size_t full = signal.size() + ir.size() - 1;
  std::size_t n = 1;
  while (n < full) n <<= 1;
  const std::size_t bins = n / 2 + 1;

  std::vector<double> a(n, 0.0), b(n, 0.0);
  std::copy(signal.begin(), signal.end(), a.begin());
  std::copy(ir.begin(), ir.end(), b.begin());
  std::vector<std::complex<double>> fa(bins), fb(bins);

  const int size = static_cast<int>(n);
  auto *fa_ptr = reinterpret_cast<fftw_complex *>(fa.data());
  auto *fb_ptr = reinterpret_cast<fftw_complex *>(fb.data());
  fftw_plan pa, pb, inv;
  // Planner calls are not thread-safe.
#pragma omp critical(sastk_fftw_planner)
  {
    pa = fftw_plan_dft_r2c_1d(size, a.data(), fa_ptr, FFTW_ESTIMATE);
    pb = fftw_plan_dft_r2c_1d(size, b.data(), fb_ptr, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(size, fa_ptr, a.data(), FFTW_ESTIMATE);
  }
  fftw_execute(pa);
  fftw_execute(pb);
  for (std::size_t i = 0; i < bins; ++i) fa[i] *= fb[i];
  fftw_execute(inv);
#pragma omp critical(sastk_fftw_planner)
  {
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(inv);
  }
  a.resize(full);
  const double scale = 1.0 / static_cast<double>(n);
  for (double &v : a) v *= scale;
  return a;
}

double distance(const Point3 &a, const Point3 &b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

namespace {

void check_params(const ImageSourceParams &p) {
  if (!(p.room.x > 0 && p.room.y > 0 && p.room.z > 0))
    throw ConfigError("room dimensions must be positive");
  if (!(p.sample_rate > 0 && p.speed_of_sound > 0))
    throw ConfigError("sample rate and speed of sound must be positive");
  if (!(p.reflection >= 0.0 && p.reflection <= 1.0))
    throw ConfigError(fmt::format("reflection coefficient {} outside [0,1]",
                                  p.reflection));
}

int lattice_extent(double reach, double dim) {
  return static_cast<int>(std::ceil(reach / (2.0 * dim))) + 1;
}

// Adds every image with x-lattice index nx into `out`.
void accumulate_slab(const ImageSourceParams &p, int nx, int ny_max, int nz_max,
                     std::span<double> out) {
  const double reach = static_cast<double>(p.length) / p.sample_rate * p.speed_of_sound;
  const double reach2 = reach * reach;
  const double taps_per_meter = p.sample_rate / p.speed_of_sound;
  const double inv_4pi = 1.0 / (4.0 * std::numbers::pi);
  for (int qx = 0; qx <= 1; ++qx) {
    const double dx = (1 - 2 * qx) * p.source.x + 2.0 * nx * p.room.x - p.mic.x;
    const int rx = std::abs(nx - qx) + std::abs(nx);
    if (dx * dx > reach2) continue;
    for (int ny = -ny_max; ny <= ny_max; ++ny) {
      for (int qy = 0; qy <= 1; ++qy) {
        const double dy = (1 - 2 * qy) * p.source.y + 2.0 * ny * p.room.y - p.mic.y;
        const double dxy2 = dx * dx + dy * dy;
        if (dxy2 > reach2) continue;
        const int rxy = rx + std::abs(ny - qy) + std::abs(ny);
        for (int nz = -nz_max; nz <= nz_max; ++nz) {
          for (int qz = 0; qz <= 1; ++qz) {
            const double dz = (1 - 2 * qz) * p.source.z + 2.0 * nz * p.room.z - p.mic.z;
            const double d2 = dxy2 + dz * dz;
            if (d2 > reach2) continue;
            const int order = rxy + std::abs(nz - qz) + std::abs(nz);
            if (p.max_order >= 0 && order > p.max_order) continue;
            const double d = std::sqrt(d2);
            const auto tap = static_cast<std::size_t>(std::llround(d * taps_per_meter));
            if (tap >= out.size()) continue;
            out[tap] += std::pow(p.reflection, order) * inv_4pi / d;
          }
        }
      }
    }
  }
}

}  // namespace

std::vector<double> image_source_rir(const ImageSourceParams &p) {
  check_params(p);
  std::vector<double> rir(p.length, 0.0);
  if (p.length == 0) return rir;
  const double reach = static_cast<double>(p.length) / p.sample_rate * p.speed_of_sound;
  const int nx_max = lattice_extent(reach, p.room.x);
  const int ny_max = lattice_extent(reach, p.room.y);
  const int nz_max = lattice_extent(reach, p.room.z);
  const int slabs = 2 * nx_max + 1;
  // One buffer per x slab, summed in slab order afterwards so the result is
  // independent of scheduling.
  std::vector<std::vector<double>> partial(static_cast<std::size_t>(slabs));
#pragma omp parallel for schedule(dynamic, 1)
  for (int s = 0; s < slabs; ++s) {
    auto &buf = partial[static_cast<std::size_t>(s)];
    buf.assign(p.length, 0.0);
    accumulate_slab(p, s - nx_max, ny_max, nz_max, buf);
  }
  for (const auto &buf : partial)
    for (std::size_t i = 0; i < p.length; ++i) rir[i] += buf[i];
  return rir;
}

std::vector<double> image_source_rir_serial(const ImageSourceParams &p) {
  check_params(p);
  std::vector<double> rir(p.length, 0.0);
  if (p.length == 0) return rir;
  const double reach = static_cast<double>(p.length) / p.sample_rate * p.speed_of_sound;
  const int nx_max = lattice_extent(reach, p.room.x);
  const int ny_max = lattice_extent(reach, p.room.y);
  const int nz_max = lattice_extent(reach, p.room.z);
  // same per-slab summation as the parallel version
  std::vector<double> buf(p.length);
  for (int nx = -nx_max; nx <= nx_max; ++nx) {
    std::fill(buf.begin(), buf.end(), 0.0);
    accumulate_slab(p, nx, ny_max, nz_max, buf);
    for (std::size_t i = 0; i < p.length; ++i) rir[i] += buf[i];
  }
  return rir;
}

void image_source_highpass(std::span<double> rir, double sample_rate, double cutoff) {
  if (!(sample_rate > 0.0 && cutoff > 0.0 && cutoff < sample_rate / 2))
    throw ConfigError(fmt::format("high-pass cutoff {} invalid for rate {}", cutoff, sample_rate));
  const double w = 2.0 * std::numbers::pi * cutoff / sample_rate;
  const double r1 = std::exp(-w);
  const double b1 = 2.0 * r1 * std::cos(w);
  const double b2 = -r1 * r1;
  const double a1 = -(1.0 + r1);
  double y1 = 0.0, y2 = 0.0;
  for (double &x : rir) {
    const double y0 = b1 * y1 + b2 * y2 + x;
    x = y0 + a1 * y1 + r1 * y2;
    y2 = y1;
    y1 = y0;
  }
}

}  // namespace sastk::kernels
