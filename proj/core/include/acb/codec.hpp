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

#ifndef ACBENCH_ACB_CODEC_HPP_
#define ACBENCH_ACB_CODEC_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "acb/rational.hpp"
#include "acb/token_grid.hpp"
#include "acb/waveform.hpp"

namespace acb {

enum class FeatureType { kAcoustic, kSemantic, kFused, kDecoupled };

std::string to_string(FeatureType t);
FeatureType feature_type_from_string(const std::string& s);

struct CodecDescriptor {
  std::string name;
  FeatureType feature_type = FeatureType::kAcoustic;
  uint32_t sample_rate = 0;
  Rational token_rate;
  uint32_t n_codebooks = 0;
  std::vector<uint32_t> codebook_sizes;
  std::optional<double> bitrate_bps;
  // Codebook columns carrying semantic content; meaningful for decoupled
  // codecs. Empty means the default split (column 0 semantic, rest acoustic).
  std::vector<uint32_t> semantic_columns;

  // Throws ValidationError; checks bitrate against
  // token_rate * sum(log2(size)) within 1% when bitrate is present.
  void validate() const;
  double nominal_bitrate_bps() const;
};

CodecDescriptor descriptor_from_json(const std::string& text);
CodecDescriptor load_descriptor(const std::string& path);
std::string descriptor_to_json(const CodecDescriptor& d);

class CodecAdapter {
 public:
  virtual ~CodecAdapter() = default;

  const CodecDescriptor& descriptor() const { return descriptor_; }

  // Encode without an utterance identity. File-backed codecs reject this.
  virtual TokenGrid encode(const Waveform& w) = 0;

  // Encode with the manifest id, which file-backed codecs use to locate
  // their per-utterance artifacts. Defaults to encode(w).
  virtual TokenGrid encode_utterance(const std::string& utt_id,
                                     const Waveform& w) {
    (void)utt_id;
    return encode(w);
  }

  virtual Waveform decode(const TokenGrid& g) = 0;

  // Whether decode can run at all (file-backed codecs may ship tokens only).
  virtual bool can_decode() const { return true; }

  // Whether encode accepts arbitrary waveforms. False for file-backed
  // codecs, which makes them ineligible for multi-round re-encoding.
  virtual bool supports_waveform_encode() const { return true; }

 protected:
  explicit CodecAdapter(CodecDescriptor d) : descriptor_(std::move(d)) {}

  CodecDescriptor descriptor_;
};

// Reads per-utterance token files `<utt_id>.tokens` (and reconstructions
// `<utt_id>.rec.wav` when present) from dir. Grids are checked against the
// descriptor on load.
std::unique_ptr<CodecAdapter> external_codec(const std::string& dir,
                                             const CodecDescriptor& descriptor);

// external_codec with the descriptor read from `dir/descriptor.json`.
std::unique_ptr<CodecAdapter> external_codec(const std::string& dir);

// Test oracle: one size-1024 codebook whose token is the registry index of
// the frame's exact content, modulo 1024; decode returns the cached input.
std::unique_ptr<CodecAdapter> identity_codec(uint32_t frame_len);

// Null model: i.i.d. uniform tokens over eight size-1024 codebooks from a
// generator re-keyed per encode call; decode emits seeded white noise.
std::unique_ptr<CodecAdapter> random_codec(uint64_t seed);

}  // namespace acb

#endif  // ACBENCH_ACB_CODEC_HPP_
