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

#ifndef SASTK_WAV_H_
#define SASTK_WAV_H_

// 16-bit PCM WAV, any channel count.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sastk {

struct Audio {
  int sample_rate = 16000;
  int channels = 1;
  std::vector<double> samples;  // interleaved, nominally in [-1, 1)

  std::size_t frames() const {
    return channels > 0 ? samples.size() / static_cast<std::size_t>(channels) : 0;
  }
  // First channel only.
  std::vector<double> channel0() const;
};

// Samples are scaled by 32768 and clamped to the int16 range.
std::string encode_wav(const Audio &audio);
// Throws DataError for anything but 16-bit PCM.
Audio decode_wav(std::string_view bytes, const std::string &source);

Audio read_wav(const std::filesystem::path &path);
void write_wav(const Audio &audio, const std::filesystem::path &path);

}  // namespace sastk

#endif  // SASTK_WAV_H_
