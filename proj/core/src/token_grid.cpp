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

#include "acb/token_grid.hpp"

#include <cstring>

#include "acb/error.hpp"
#include "binio.hpp"

namespace acb {

namespace {
constexpr char kMagic[4] = {'A', 'C', 'B', 'T'};
constexpr uint16_t kVersion = 1;
}  // namespace

std::vector<uint32_t> TokenGrid::column(uint32_t c) const {
  std::vector<uint32_t> out(n_frames);
  for (uint32_t t = 0; t < n_frames; ++t) out[t] = at(t, c);
  return out;
}

void TokenGrid::validate() const {
  if (n_codebooks == 0) throw ValidationError("token grid: no codebooks");
  if (codebook_sizes.size() != n_codebooks)
    throw ValidationError("token grid: codebook size list does not match N");
  for (uint32_t s : codebook_sizes)
    if (s == 0) throw ValidationError("token grid: zero-size codebook");
  if (tokens.size() != static_cast<size_t>(n_frames) * n_codebooks)
    throw ValidationError("token grid: token count does not match T*N");
  if (token_rate.num == 0 || token_rate.den == 0)
    throw ValidationError("token grid: token rate must be positive");
  for (uint32_t t = 0; t < n_frames; ++t)
    for (uint32_t c = 0; c < n_codebooks; ++c)
      if (at(t, c) >= codebook_sizes[c])
        throw ValidationError("token grid: token id out of range at frame " +
                              std::to_string(t) + ", codebook " +
                              std::to_string(c));
}

void save_token_grid(const TokenGrid& g, const std::string& path) {
  g.validate();
  binio::Writer w(path);
  w.bytes(kMagic, 4);
  w.u16(kVersion);
  w.u16(0);  // flags
  w.u32(g.token_rate.num);
  w.u32(g.token_rate.den);
  w.u16(static_cast<uint16_t>(g.n_codebooks));
  w.u32(g.n_frames);
  for (uint32_t s : g.codebook_sizes) w.u32(s);
  for (uint32_t v : g.tokens) w.u32(v);
  w.close();
}

TokenGrid load_token_grid(const std::string& path) {
  binio::Reader r(path);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw IoError(path + ": bad token file magic");
  uint16_t version = r.u16();
  if (version != kVersion)
    throw IoError(path + ": unsupported token file version " +
                  std::to_string(version));
  uint16_t flags = r.u16();
  if (flags != 0) throw IoError(path + ": unsupported token file flags");
  TokenGrid g;
  g.token_rate.num = r.u32();
  g.token_rate.den = r.u32();
  g.n_codebooks = r.u16();
  g.n_frames = r.u32();
  if (g.n_codebooks == 0) throw IoError(path + ": token file has no codebooks");
  g.codebook_sizes.resize(g.n_codebooks);
  for (auto& s : g.codebook_sizes) s = r.u32();
  g.tokens.resize(static_cast<size_t>(g.n_frames) * g.n_codebooks);
  for (auto& v : g.tokens) v = r.u32();
  if (!r.at_eof()) throw IoError(path + ": trailing bytes after token data");
  try {
    g.validate();
  } catch (const ValidationError& e) {
    throw IoError(path + ": " + e.what());
  }
  return g;
}

TokenGrid truncate_codebooks(const TokenGrid& g, uint32_t k) {
  if (k == 0 || k > g.n_codebooks)
    throw ValidationError("truncate_codebooks: k out of range");
  TokenGrid out;
  out.n_frames = g.n_frames;
  out.n_codebooks = k;
  out.codebook_sizes.assign(g.codebook_sizes.begin(),
                            g.codebook_sizes.begin() + k);
  out.token_rate = g.token_rate;
  out.source_codec = g.source_codec;
  out.tokens.resize(static_cast<size_t>(g.n_frames) * k);
  for (uint32_t t = 0; t < g.n_frames; ++t)
    for (uint32_t c = 0; c < k; ++c) out.at(t, c) = g.at(t, c);
  return out;
}

uint64_t grid_hash(const TokenGrid& g) {
  uint64_t h = 1469598103934665603ull;
  auto mix32 = [&h](uint32_t v) {
    for (int i = 0; i < 4; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  };
  mix32(g.n_frames);
  mix32(g.n_codebooks);
  mix32(g.token_rate.num);
  mix32(g.token_rate.den);
  for (uint32_t s : g.codebook_sizes) mix32(s);
  for (uint32_t v : g.tokens) mix32(v);
  return h;
}

}  // namespace acb
