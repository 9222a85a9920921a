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

#include "sastk/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>

#include <fmt/format.h>

#include "sastk/error.h"
#include "sastk/ingest.h"

namespace sastk {

namespace {

void put_u32(std::string &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::string &out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

std::uint32_t get_u32(std::string_view b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i)
    v = (v << 8) | static_cast<unsigned char>(b[at + static_cast<std::size_t>(i)]);
  return v;
}

std::uint16_t get_u16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    (static_cast<unsigned char>(b[at + 1]) << 8));
}

}  // namespace

std::vector<double> Audio::channel0() const {
  if (channels == 1) return samples;
  std::vector<double> out(frames());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = samples[i * static_cast<std::size_t>(channels)];
  return out;
}

std::string encode_wav(const Audio &audio) {
  if (audio.channels < 1 || audio.sample_rate < 1)
    throw ConfigError("WAV needs at least one channel and a positive sample rate");
  if (audio.samples.size() % static_cast<std::size_t>(audio.channels) != 0)
    throw DataError("sample count is not a multiple of the channel count");
  const auto data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 2);
  const auto block_align = static_cast<std::uint16_t>(audio.channels * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVE";
  out += "fmt ";
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, static_cast<std::uint16_t>(audio.channels));
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate) * block_align);
  put_u16(out, block_align);
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_bytes);
  for (double x : audio.samples) {
    const double scaled = std::clamp(std::round(x * 32768.0), -32768.0, 32767.0);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
  }
  return out;
}

Audio decode_wav(std::string_view b, const std::string &source) {
  auto fail = [&](const std::string &what) {
    throw DataError(fmt::format("{}: {}", source, what));
  };
  if (b.size() < 12 || b.substr(0, 4) != "RIFF" || b.substr(8, 4) != "WAVE")
    fail("not a RIFF/WAVE file");
  Audio audio;
  bool have_fmt = false, have_data = false;
  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const std::string_view id = b.substr(pos, 4);
    const std::size_t size = get_u32(b, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > b.size()) fail(fmt::format("chunk '{}' runs past end of file", id));
    if (id == "fmt ") {
      if (size < 16) fail("fmt chunk too short");
      const std::uint16_t format = get_u16(b, body);
      audio.channels = get_u16(b, body + 2);
      audio.sample_rate = static_cast<int>(get_u32(b, body + 4));
      const std::uint16_t bits = get_u16(b, body + 14);
      if (format != 1) fail(fmt::format("unsupported audio format {} (PCM only)", format));
      if (bits != 16) fail(fmt::format("unsupported bit depth {} (16 only)", bits));
      if (audio.channels < 1) fail("zero channels");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) fail("data chunk before fmt chunk");
      const std::size_t count = size / 2;
      audio.samples.resize(count);
      for (std::size_t i = 0; i < count; ++i)
        audio.samples[i] =
            static_cast<double>(static_cast<std::int16_t>(get_u16(b, body + 2 * i))) / 32768.0;
      have_data = true;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt || !have_data) fail("missing fmt or data chunk");
  if (audio.samples.size() % static_cast<std::size_t>(audio.channels) != 0)
    fail("data size is not a whole number of frames");
  return audio;
}

Audio read_wav(const std::filesystem::path &path) {
  return decode_wav(read_text_file(path), path.string());
}

void write_wav(const Audio &audio, const std::filesystem::path &path) {
  write_text_file(path, encode_wav(audio));
}

}  // namespace sastk
