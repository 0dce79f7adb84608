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

#ifndef ACBENCH_ACB_WAV_IO_HPP_
#define ACBENCH_ACB_WAV_IO_HPP_

#include <string>

#include "acb/waveform.hpp"

namespace acb {

// Reads a RIFF/WAVE file. Accepts PCM16 and IEEE float32, any channel count;
// channels are downmixed by arithmetic mean and PCM16 is scaled by 1/32768.
Waveform read_wav(const std::string& path);

// Writes IEEE float32 mono. read_wav(write_wav(w)) reproduces float32-valued
// samples bit-exactly.
void write_wav(const Waveform& w, const std::string& path);

}  // namespace acb

#endif  // ACBENCH_ACB_WAV_IO_HPP_
