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

#include <algorithm>
#include <cmath>
#include <complex>

#include "acb/dsp.hpp"
#include "acb/error.hpp"

namespace acb {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kMelFloor = 1e-10;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

}  // namespace

std::vector<double> hann_window(size_t n) {
  std::vector<double> w(n);
  for (size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

size_t frame_count(size_t len, size_t frame_len, size_t hop) {
  if (len < frame_len) return 0;
  return 1 + (len - frame_len) / hop;
}

FrameMatrix stft(const Waveform& w, size_t frame_len, size_t hop, Window window) {
  w.validate();
  if (hop == 0 || hop > frame_len) throw ValidationError("stft: need 0 < hop <= frame_len");
  if (w.samples.size() < frame_len) {
    throw ValidationError("stft: signal shorter than one frame");
  }

  const size_t t_frames = frame_count(w.samples.size(), frame_len, hop);
  const size_t n_bins = frame_len / 2 + 1;
  std::vector<double> win;
  if (window == Window::kHann) win = hann_window(frame_len);

  FrameMatrix out;
  out.n_frames = t_frames;
  out.n_bins = n_bins;
  out.frame_rate = Rational{w.sample_rate, static_cast<uint32_t>(hop)}.reduced();
  out.kind = FrameKind::kStftMagnitude;
  out.data.resize(t_frames * n_bins);

  std::vector<std::complex<double>> buf(frame_len);
  for (size_t t = 0; t < t_frames; ++t) {
    const double* x = w.samples.data() + t * hop;
    for (size_t i = 0; i < frame_len; ++i) {
      buf[i] = window == Window::kHann ? x[i] * win[i] : x[i];
    }
    fft(buf);
    for (size_t b = 0; b < n_bins; ++b) out.at(t, b) = std::abs(buf[b]);
  }
  return out;
}

std::vector<double> mel_filterbank(size_t n_mels, size_t n_bins, uint32_t sample_rate,
                                   double fmin, double fmax) {
  if (n_mels < 2) throw ValidationError("mel_filterbank: n_mels must be >= 2");
  if (fmin >= fmax) throw ValidationError("mel_filterbank: fmin must be < fmax");

  const size_t n_fft = (n_bins - 1) * 2;
  const double mel_lo = hz_to_mel(fmin);
  const double mel_hi = hz_to_mel(fmax);

  std::vector<double> edges(n_mels + 2);
  for (size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / (n_mels + 1));
  }

  std::vector<double> fb(n_mels * n_bins, 0.0);
  for (size_t m = 0; m < n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    double row_sum = 0.0;
    for (size_t b = 0; b < n_bins; ++b) {
      double f = static_cast<double>(b) * sample_rate / static_cast<double>(n_fft);
      double v = 0.0;
      if (f > lo && f < mid) {
        v = (f - lo) / (mid - lo);
      } else if (f >= mid && f < hi) {
        v = (hi - f) / (hi - mid);
      }
      fb[m * n_bins + b] = v;
      row_sum += v;
    }
    if (row_sum > 0.0) {
      for (size_t b = 0; b < n_bins; ++b) fb[m * n_bins + b] /= row_sum;
    }
  }
  return fb;
}

FrameMatrix log_mel(const FrameMatrix& spec, size_t n_mels, double fmin, double fmax,
                    uint32_t sample_rate) {
  if (spec.kind != FrameKind::kStftMagnitude) {
    throw ValidationError("log_mel: input must be an STFT magnitude matrix");
  }
  const std::vector<double> fb = mel_filterbank(n_mels, spec.n_bins, sample_rate, fmin, fmax);

  FrameMatrix out;
  out.n_frames = spec.n_frames;
  out.n_bins = n_mels;
  out.frame_rate = spec.frame_rate;
  out.kind = FrameKind::kLogMel;
  out.data.resize(spec.n_frames * n_mels);

  for (size_t t = 0; t < spec.n_frames; ++t) {
    const double* mag = spec.row(t);
    for (size_t m = 0; m < n_mels; ++m) {
      double e = 0.0;
      const double* f = fb.data() + m * spec.n_bins;
      for (size_t b = 0; b < spec.n_bins; ++b) e += f[b] * mag[b] * mag[b];
      out.at(t, m) = std::log(std::max(e, kMelFloor));
    }
  }
  return out;
}

FrameMatrix cepstra(const FrameMatrix& logmel, size_t n_coeffs, size_t first_coeff) {
  const size_t n_mels = logmel.n_bins;
  FrameMatrix out;
  out.n_frames = logmel.n_frames;
  out.n_bins = n_coeffs;
  out.frame_rate = logmel.frame_rate;
  out.kind = FrameKind::kTimeDomain;
  out.data.resize(logmel.n_frames * n_coeffs);

  for (size_t t = 0; t < logmel.n_frames; ++t) {
    const double* l = logmel.row(t);
    for (size_t k = 0; k < n_coeffs; ++k) {
      const double kk = static_cast<double>(k + first_coeff);
      double c = 0.0;
      for (size_t m = 0; m < n_mels; ++m) {
        c += l[m] * std::cos(kPi * kk * (static_cast<double>(m) + 0.5) / static_cast<double>(n_mels));
      }
      out.at(t, k) = c;
    }
  }
  return out;
}

Waveform time_shift(const Waveform& w, double shift_ms) {
  w.validate();
  if (shift_ms < 0.0) throw ValidationError("time_shift: shift must be non-negative");
  const auto drop = static_cast<size_t>(std::llround(shift_ms * w.sample_rate / 1000.0));
  if (drop >= w.samples.size()) {
    throw ValidationError("time_shift: shift exceeds signal duration");
  }
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.assign(w.samples.begin() + static_cast<std::ptrdiff_t>(drop), w.samples.end());
  return out;
}

}  // namespace acb
