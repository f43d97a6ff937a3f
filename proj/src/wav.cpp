// Copyright 2026 The Chewtex Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "chewtex/corpus.hpp"
#include "chewtex/error.hpp"

namespace chewtex {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

bool tag_is(const std::uint8_t* p, const char* tag) { return std::memcmp(p, tag, 4) == 0; }

}  // namespace

AudioRecording decode_wav(std::span<const std::uint8_t> bytes) {
  require(bytes.size() >= 12 && tag_is(bytes.data(), "RIFF") && tag_is(bytes.data() + 8, "WAVE"),
          ErrorKind::kFormat, "not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    require(body + size <= bytes.size(), ErrorKind::kFormat, "truncated WAV chunk");
    if (tag_is(chunk, "fmt ")) {
      require(size >= 16, ErrorKind::kFormat, "fmt chunk too small");
      format = read_u16(chunk + 8);
      channels = read_u16(chunk + 10);
      rate = read_u32(chunk + 12);
      bits = read_u16(chunk + 22);
      if (format == kFormatExtensible) {
        require(size >= 40, ErrorKind::kFormat, "extensible fmt chunk too small");
        format = read_u16(chunk + 8 + 24);
      }
      have_fmt = true;
    } else if (tag_is(chunk, "data")) {
      data = bytes.subspan(body, size);
      have_data = true;
    }
    pos = body + size + (size & 1u);
  }
  require(have_fmt, ErrorKind::kFormat, "WAV has no fmt chunk");
  require(have_data, ErrorKind::kFormat, "WAV has no data chunk");
  require(channels >= 1, ErrorKind::kFormat, "WAV declares zero channels");
  require(rate > 0, ErrorKind::kFormat, "WAV declares zero sample rate");

  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool float32 = format == kFormatFloat && bits == 32;
  require(pcm16 || float32, ErrorKind::kUnsupportedCodec,
          "unsupported WAV encoding (format " + std::to_string(format) + ", " +
              std::to_string(bits) + " bits); only PCM16 and float32 are decoded");

  const std::size_t frame_bytes = static_cast<std::size_t>(channels) * (bits / 8);
  const std::size_t frames = data.size() / frame_bytes;

  AudioRecording rec;
  rec.sample_rate = static_cast<int>(rate);
  rec.samples.resize(static_cast<Eigen::Index>(frames));
  for (std::size_t f = 0; f < frames; ++f) {
    const std::uint8_t* frame = data.data() + f * frame_bytes;
    double sum = 0.0;
    for (std::uint16_t c = 0; c < channels; ++c) {
      if (pcm16) {
        const auto raw = static_cast<std::int16_t>(read_u16(frame + 2 * c));
        sum += raw / 32768.0;
      } else {
        const float v = std::bit_cast<float>(read_u32(frame + 4 * c));
        require(std::isfinite(v), ErrorKind::kFormat, "non-finite float sample");
        sum += v;
      }
    }
    rec.samples[static_cast<Eigen::Index>(f)] = sum / channels;
  }
  return rec;
}

AudioRecording load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_wav(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void quantize_pcm16(Eigen::VectorXd& samples) {
  samples = samples.unaryExpr([](double x) {
    return std::clamp(std::round(x * 32768.0), -32768.0, 32767.0) / 32768.0;
  });
}

std::vector<std::uint8_t> encode_wav_pcm16(const AudioRecording& recording) {
  require(recording.sample_rate > 0, ErrorKind::kConfig, "sample rate must be positive");
  const auto n = static_cast<std::uint32_t>(recording.samples.size());
  std::vector<std::uint8_t> out;
  out.reserve(44 + 2 * static_cast<std::size_t>(n));
  put_tag(out, "RIFF");
  put_u32(out, 36 + 2 * n);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(recording.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(recording.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, 2 * n);
  for (Eigen::Index i = 0; i < recording.samples.size(); ++i) {
    const double v = std::clamp(std::round(recording.samples[i] * 32768.0), -32768.0, 32767.0);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const AudioRecording& recording) {
  const auto bytes = encode_wav_pcm16(recording);
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  require(out.good(), ErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace chewtex
