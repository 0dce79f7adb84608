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
#include <vector>

#include "acb/error.hpp"
#include "acb/recon.hpp"

namespace acb {

namespace {

constexpr uint32_t kRate = 10000;
constexpr uint32_t kFrame = 256;
constexpr uint32_t kHop = 128;
constexpr uint32_t kFft = 512;
constexpr uint32_t kBands = 15;
constexpr double kMinFreq = 150.0;
constexpr uint32_t kSegment = 30;
constexpr double kDynRangeDb = 40.0;
constexpr double kBetaDb = -15.0;
constexpr double kEps = 1e-15;

// One-third-octave band to FFT-bin ranges: centers 150*2^(k/3), edges a
// factor 2^(1/6) either side, snapped to the nearest bin.
std::vector<std::pair<uint32_t, uint32_t>> third_octave_bands() {
  uint32_t n_bins = kFft / 2 + 1;
  auto nearest_bin = [&](double freq) {
    uint32_t best = 0;
    double best_d = std::fabs(freq);
    for (uint32_t i = 0; i < n_bins; ++i) {
      double f = static_cast<double>(i) * kRate / kFft;
      double d = std::fabs(f - freq);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  };
  std::vector<std::pair<uint32_t, uint32_t>> bands;
  for (uint32_t k = 0; k < kBands; ++k) {
    double cf = kMinFreq * std::pow(2.0, k / 3.0);
    uint32_t lo = nearest_bin(cf * std::pow(2.0, -1.0 / 6.0));
    uint32_t hi = nearest_bin(cf * std::pow(2.0, 1.0 / 6.0));
    bands.emplace_back(lo, hi);
  }
  return bands;
}

std::vector<std::vector<double>> windowed_frames(const std::vector<double>& x,
                                                 const std::vector<double>& win) {
  std::vector<std::vector<double>> frames;
  if (x.size() < kFrame) return frames;
  for (size_t off = 0; off + kFrame <= x.size(); off += kHop) {
    std::vector<double> f(kFrame);
    for (uint32_t i = 0; i < kFrame; ++i) f[i] = x[off + i] * win[i];
    frames.push_back(std::move(f));
  }
  return frames;
}

// Band envelope magnitudes per frame: sqrt of summed bin powers.
std::vector<std::vector<double>> band_envelopes(
    const std::vector<std::vector<double>>& frames,
    const std::vector<std::pair<uint32_t, uint32_t>>& bands) {
  std::vector<std::vector<double>> env(bands.size(),
                                       std::vector<double>(frames.size()));
  std::vector<std::complex<double>> buf(kFft);
  for (size_t t = 0; t < frames.size(); ++t) {
    std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
    for (uint32_t i = 0; i < kFrame; ++i) buf[i] = frames[t][i];
    fft(buf);
    for (size_t b = 0; b < bands.size(); ++b) {
      double p = 0.0;
      for (uint32_t i = bands[b].first; i < bands[b].second; ++i)
        p += std::norm(buf[i]);
      env[b][t] = std::sqrt(p);
    }
  }
  return env;
}

}  // namespace

double stoi(const Waveform& ref, const Waveform& deg) {
  ref.validate();
  deg.validate();
  Waveform x = ref.sample_rate == kRate ? ref : resample(ref, kRate);
  Waveform y = deg.sample_rate == kRate ? deg : resample(deg, kRate);
  size_t len = std::min(x.samples.size(), y.samples.size());
  x.samples.resize(len);
  y.samples.resize(len);

  std::vector<double> win = hann_window(kFrame);
  auto xf = windowed_frames(x.samples, win);
  auto yf = windowed_frames(y.samples, win);

  // Silent-frame removal keyed on reference frame energy.
  double max_e = 0.0;
  std::vector<double> energy(xf.size());
  for (size_t t = 0; t < xf.size(); ++t) {
    double e = 0.0;
    for (double v : xf[t]) e += v * v;
    energy[t] = e;
    max_e = std::max(max_e, e);
  }
  double floor_e = max_e * std::pow(10.0, -kDynRangeDb / 10.0);
  std::vector<std::vector<double>> xk, yk;
  for (size_t t = 0; t < xf.size(); ++t)
    if (energy[t] > floor_e) {
      xk.push_back(xf[t]);
      yk.push_back(yf[t]);
    }
  if (xk.size() < kSegment)
    throw ValidationError(
        "stoi: insufficient non-silent duration (need at least 30 frames)");

  auto bands = third_octave_bands();
  auto ex = band_envelopes(xk, bands);
  auto ey = band_envelopes(yk, bands);

  double clip_factor = 1.0 + std::pow(10.0, -kBetaDb / 20.0);
  size_t n_frames = xk.size();
  double total = 0.0;
  size_t count = 0;
  for (size_t m = kSegment; m <= n_frames; ++m) {
    size_t start = m - kSegment;
    for (size_t b = 0; b < bands.size(); ++b) {
      const double* xs = ex[b].data() + start;
      const double* ys = ey[b].data() + start;
      double nx = 0.0, ny = 0.0;
      for (uint32_t i = 0; i < kSegment; ++i) {
        nx += xs[i] * xs[i];
        ny += ys[i] * ys[i];
      }
      double alpha = std::sqrt(nx / (ny + kEps));
      double xm = 0.0, ym = 0.0;
      double yc[kSegment];
      for (uint32_t i = 0; i < kSegment; ++i) {
        yc[i] = std::min(ys[i] * alpha, xs[i] * clip_factor);
        xm += xs[i];
        ym += yc[i];
      }
      xm /= kSegment;
      ym /= kSegment;
      double num = 0.0, dx = 0.0, dy = 0.0;
      for (uint32_t i = 0; i < kSegment; ++i) {
        double a = xs[i] - xm;
        double c = yc[i] - ym;
        num += a * c;
        dx += a * a;
        dy += c * c;
      }
      total += num / (std::sqrt(dx * dy) + kEps);
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace acb
