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

#ifndef ACBENCH_ACB_SYNTHETIC_HPP_
#define ACBENCH_ACB_SYNTHETIC_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace acb {

// Desk-scale stand-in corpora with known ground truth.
//   tones             balanced sine / chirp / noise classes for probes
//   markov-speechlike token files drawn from a 16-state chain with a known
//                     entropy rate, plus matching audio
//   ctc-mapped        token files whose token -> character rule is exact
enum class SyntheticKind : uint8_t { kTones, kMarkovSpeechlike, kCtcMapped };
SyntheticKind synthetic_kind_from_string(const std::string& s);
std::string to_string(SyntheticKind k);

struct SyntheticResult {
  std::string manifest_path;
  std::vector<std::string> files;  // every file written, sorted
};

// Entropy rate in nats of the planted markov-speechlike chain.
double markov_entropy_rate_nats();

// Writes a dataset of `size` utterances under out_dir. The same
// (kind, size, seed) produces identical bytes. Token-backed kinds emit a
// codec/ directory loadable as a file-based codec adapter.
SyntheticResult make_synthetic_dataset(SyntheticKind kind, uint32_t size,
                                       uint64_t seed,
                                       const std::string& out_dir);

}  // namespace acb

#endif  // ACBENCH_ACB_SYNTHETIC_HPP_
