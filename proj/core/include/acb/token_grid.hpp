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

#ifndef ACBENCH_ACB_TOKEN_GRID_HPP_
#define ACBENCH_ACB_TOKEN_GRID_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "acb/rational.hpp"

namespace acb {

// T x N matrix of codebook indices, frame-major. Every token satisfies
// tokens[t][c] < codebook_sizes[c].
struct TokenGrid {
  std::vector<uint32_t> tokens;          // n_frames * n_codebooks, frame-major
  uint32_t n_frames = 0;
  uint32_t n_codebooks = 0;
  std::vector<uint32_t> codebook_sizes;  // one per codebook
  Rational token_rate;                   // frames per second
  std::string source_codec;

  uint32_t at(uint32_t t, uint32_t c) const {
    return tokens[static_cast<size_t>(t) * n_codebooks + c];
  }
  uint32_t& at(uint32_t t, uint32_t c) {
    return tokens[static_cast<size_t>(t) * n_codebooks + c];
  }

  // Column c as a flat stream (one entry per frame).
  std::vector<uint32_t> column(uint32_t c) const;

  void validate() const;  // throws ValidationError on any invariant breach
};

// Binary token file, little-endian:
//   magic "ACBT", u16 version = 1, u16 flags = 0,
//   u32 token_rate numerator, u32 denominator, u16 N, u32 T,
//   N x u32 codebook sizes, T*N x u32 tokens frame-major.
void save_token_grid(const TokenGrid& g, const std::string& path);
TokenGrid load_token_grid(const std::string& path);

// Keeps codebook columns 0..k-1.
TokenGrid truncate_codebooks(const TokenGrid& g, uint32_t k);

// Content hash over shape, rate, sizes and tokens (FNV-1a 64).
uint64_t grid_hash(const TokenGrid& g);

}  // namespace acb

#endif  // ACBENCH_ACB_TOKEN_GRID_HPP_
