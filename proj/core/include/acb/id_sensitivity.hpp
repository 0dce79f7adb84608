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

#ifndef ACBENCH_ACB_ID_SENSITIVITY_HPP_
#define ACBENCH_ACB_ID_SENSITIVITY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "acb/codec.hpp"
#include "acb/waveform.hpp"

namespace acb {

// Same-ID fraction per round r = 2..n against the round-1 grid, plus the
// least-squares slope of ratio over round.
struct StabilityCurve {
  uint32_t codebook_index = 0;
  std::vector<double> ratios;   // entry i is round i+2
  double slope = 0.0;
  uint64_t n_compared = 0;      // frames entering each comparison
};

struct ShiftStability {
  uint32_t codebook_index = 0;
  double ratio = 0.0;
  double shift_ms = 0.0;
  uint64_t n_compared = 0;
};

// Ordinary least-squares slope of y over x; 0 when fewer than 2 points.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

// Round 1 encodes w; round r encodes the decode of round r-1. Grids are
// compared index-wise over the shorter length. utt_id reaches file-backed
// codecs that need it.
std::vector<StabilityCurve> multi_round(CodecAdapter& codec, const Waveform& w,
                                        uint32_t n,
                                        const std::string& utt_id = "");

// Compares encode(w) against encode(w shifted by shift_ms).
std::vector<ShiftStability> time_shift_eval(CodecAdapter& codec,
                                            const Waveform& w,
                                            double shift_ms = 2.0,
                                            const std::string& utt_id = "");

// Mean ratio per codebook and round over utterances, slope recomputed on the
// mean curve. pooled weights each utterance by its compared-frame count
// instead of averaging per-utterance ratios.
std::vector<StabilityCurve> aggregate_stability(
    const std::vector<std::vector<StabilityCurve>>& per_utterance,
    bool pooled = false);

std::vector<ShiftStability> aggregate_shift(
    const std::vector<std::vector<ShiftStability>>& per_utterance,
    bool pooled = false);

}  // namespace acb

#endif  // ACBENCH_ACB_ID_SENSITIVITY_HPP_
