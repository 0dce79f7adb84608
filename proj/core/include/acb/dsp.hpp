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

#ifndef ACBENCH_ACB_DSP_HPP_
#define ACBENCH_ACB_DSP_HPP_

#include <complex>
#include <cstdint>
#include <vector>

#include "acb/rational.hpp"
#include "acb/waveform.hpp"

namespace acb {

enum class FrameKind { kStftMagnitude, kLogMel, kTimeDomain };

enum class Window { kHann, kRect };

// T x F real matrix of per-frame features.
struct FrameMatrix {
  std::vector<double> data;  // row-major, n_frames * n_bins
  size_t n_frames = 0;
  size_t n_bins = 0;
  Rational frame_rate;       // sample_rate / hop, exact
  FrameKind kind = FrameKind::kTimeDomain;

  double at(size_t t, size_t b) const { return data[t * n_bins + b]; }
  double& at(size_t t, size_t b) { return data[t * n_bins + b]; }
  const double* row(size_t t) const { return data.data() + t * n_bins; }
  double* row(size_t t) { return data.data() + t * n_bins; }
};

// In-place forward DFT, any length (radix-2 for powers of two, Bluestein
// otherwise). Unnormalized: X_k = sum_n x_n e^{-2*pi*i*n*k/N}.
void fft(std::vector<std::complex<double>>& a);

// Periodic Hann window of length n (sums to a constant at 50% overlap).
std::vector<double> hann_window(size_t n);

// Framing count for frame/hop over len samples: 1 + floor((len - frame)/hop).
size_t frame_count(size_t len, size_t frame_len, size_t hop);

// Magnitude STFT over the first frame_len/2 + 1 bins.
FrameMatrix stft(const Waveform& w, size_t frame_len, size_t hop, Window window);

// Triangular HTK-mel filterbank with rows normalized to sum to 1.
// Returned matrix is n_mels x n_bins, row-major.
std::vector<double> mel_filterbank(size_t n_mels, size_t n_bins, uint32_t sample_rate,
                                   double fmin, double fmax);

// Mel energies of an STFT magnitude matrix: power = magnitude^2, filterbank,
// floor at 1e-10, natural log.
FrameMatrix log_mel(const FrameMatrix& spec, size_t n_mels, double fmin, double fmax,
                    uint32_t sample_rate);

// DCT-II cepstra per row: c_k = sum_m row[m] * cos(pi*k*(m+0.5)/M), k in
// [first_coeff, first_coeff + n_coeffs).
FrameMatrix cepstra(const FrameMatrix& logmel, size_t n_coeffs, size_t first_coeff);

// Drops the first round(shift_ms * sample_rate / 1000) samples.
Waveform time_shift(const Waveform& w, double shift_ms);

// Band-limited polyphase resampler: Kaiser-windowed sinc, beta = 14,
// 64 zero-crossings per side. Output length = round(len * target / src).
Waveform resample(const Waveform& w, uint32_t target_rate);

}  // namespace acb

#endif  // ACBENCH_ACB_DSP_HPP_
