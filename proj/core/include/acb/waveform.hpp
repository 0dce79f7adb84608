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

#ifndef ACBENCH_ACB_WAVEFORM_HPP_
#define ACBENCH_ACB_WAVEFORM_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "acb/error.hpp"

namespace acb {

// Mono sample sequence, nominal amplitude range [-1, 1].
struct Waveform {
  std::vector<double> samples;
  uint32_t sample_rate = 0;

  double duration_s() const {
    return sample_rate == 0 ? 0.0 : static_cast<double>(samples.size()) / sample_rate;
  }

  void validate() const {
    if (sample_rate == 0) throw ValidationError("waveform: sample_rate must be positive");
    if (samples.empty()) throw ValidationError("waveform: empty sample buffer");
    for (double s : samples) {
      if (!std::isfinite(s)) throw ValidationError("waveform: non-finite sample");
    }
  }
};

}  // namespace acb

#endif  // ACBENCH_ACB_WAVEFORM_HPP_
