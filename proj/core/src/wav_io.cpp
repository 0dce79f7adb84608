// Copyright 2026 The acbench Authors
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

#include "acb/wav_io.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include "binio.hpp"

namespace acb {
namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatIeeeFloat = 3;

struct FmtChunk {
  uint16_t format = 0;
  uint16_t channels = 0;
  uint32_t sample_rate = 0;
  uint16_t bits_per_sample = 0;
};

int16_t as_i16(uint16_t v) {
  int16_t out;
  std::memcpy(&out, &v, 2);
  return out;
}

}  // namespace

Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  auto u16_at = [&](size_t off) -> uint16_t {
    return static_cast<uint16_t>(buf[off] | (buf[off + 1] << 8));
  };
  auto u32_at = [&](size_t off) -> uint32_t {
    return static_cast<uint32_t>(buf[off]) | (static_cast<uint32_t>(buf[off + 1]) << 8) |
           (static_cast<uint32_t>(buf[off + 2]) << 16) | (static_cast<uint32_t>(buf[off + 3]) << 24);
  };

  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    throw IoError("malformed container: not a RIFF/WAVE file: " + path);
  }

  FmtChunk fmt;
  bool have_fmt = false;
  size_t data_off = 0;
  size_t data_len = 0;

  size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    char id[5] = {0};
    std::memcpy(id, buf.data() + pos, 4);
    uint32_t chunk_len = u32_at(pos + 4);
    size_t body = pos + 8;
    if (body + chunk_len > buf.size()) {
      throw IoError("malformed container: truncated chunk '" + std::string(id) + "': " + path);
    }
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk_len < 16) throw IoError("malformed container: short fmt chunk: " + path);
      fmt.format = u16_at(body);
      fmt.channels = u16_at(body + 2);
      fmt.sample_rate = u32_at(body + 4);
      fmt.bits_per_sample = u16_at(body + 14);
      if (fmt.format == 0xfffe && chunk_len >= 40) {
        // WAVE_FORMAT_EXTENSIBLE: sub-format GUID starts with the format tag.
        fmt.format = u16_at(body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = body;
      data_len = chunk_len;
    }
    pos = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }

  if (!have_fmt) throw IoError("malformed container: missing fmt chunk: " + path);
  if (data_off == 0) throw IoError("malformed container: missing data chunk: " + path);
  if (data_len == 0) throw IoError("malformed container: zero-length data chunk: " + path);
  if (fmt.channels == 0 || fmt.sample_rate == 0) {
    throw IoError("malformed container: bad fmt fields: " + path);
  }

  const bool pcm16 = fmt.format == kFormatPcm && fmt.bits_per_sample == 16;
  const bool f32 = fmt.format == kFormatIeeeFloat && fmt.bits_per_sample == 32;
  if (!pcm16 && !f32) {
    throw IoError("unsupported encoding (want PCM16 or float32): " + path);
  }

  const size_t bytes_per_sample = fmt.bits_per_sample / 8;
  const size_t frame_bytes = bytes_per_sample * fmt.channels;
  if (data_len % frame_bytes != 0) {
    throw IoError("malformed container: data chunk not frame-aligned: " + path);
  }
  const size_t n_frames = data_len / frame_bytes;

  Waveform w;
  w.sample_rate = fmt.sample_rate;
  w.samples.resize(n_frames);
  for (size_t t = 0; t < n_frames; ++t) {
    double acc = 0.0;
    for (uint16_t c = 0; c < fmt.channels; ++c) {
      size_t off = data_off + t * frame_bytes + c * bytes_per_sample;
      if (pcm16) {
        acc += as_i16(u16_at(off)) / 32768.0;
      } else {
        uint32_t bits = u32_at(off);
        float v;
        std::memcpy(&v, &bits, 4);
        acc += v;
      }
    }
    w.samples[t] = acc / fmt.channels;
  }
  w.validate();
  return w;
}

void write_wav(const Waveform& w, const std::string& path) {
  w.validate();
  const uint32_t n = static_cast<uint32_t>(w.samples.size());
  const uint32_t data_bytes = n * 4;

  binio::Writer out(path);
  out.bytes("RIFF", 4);
  // 4 (WAVE) + fmt chunk (8+18) + fact chunk (8+4) + data chunk header (8) + payload
  out.u32(4 + 26 + 12 + 8 + data_bytes);
  out.bytes("WAVE", 4);

  out.bytes("fmt ", 4);
  out.u32(18);
  out.u16(kFormatIeeeFloat);
  out.u16(1);                 // mono
  out.u32(w.sample_rate);
  out.u32(w.sample_rate * 4);  // byte rate
  out.u16(4);                 // block align
  out.u16(32);                // bits per sample
  out.u16(0);                 // cbSize

  out.bytes("fact", 4);
  out.u32(4);
  out.u32(n);

  out.bytes("data", 4);
  out.u32(data_bytes);
  for (double s : w.samples) out.f32(static_cast<float>(s));
  out.close();
}

}  // namespace acb
