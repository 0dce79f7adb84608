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

#include <cmath>
#include <vector>

#include "acb/dsp.hpp"
#include "acb/error.hpp"

namespace acb {
namespace {

constexpr double kKaiserBeta = 14.0;
constexpr int kZeroCrossings = 64;
// Kernel table resolution per zero-crossing; linear interpolation between
// entries keeps the tabulation error below ~2e-5 of the kernel peak.
constexpr int kTableStep = 256;
constexpr double kPi = 3.1415926535897932384626433832795;

double bessel_i0(double x) {
  // Power series; converges quickly for |x| <= beta.
  double sum = 1.0, term = 1.0;
  const double half_x = x / 2.0;
  for (int k = 1; k < 64; ++k) {
    term *= (half_x / k) * (half_x / k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

// Windowed sinc g(v) = sinc(v) * kaiser(v / crossings) for v in [0, crossings],
// tabulated once.
const std::vector<double>& kernel_table() {
  static const std::vector<double> table = [] {
    const size_t n = static_cast<size_t>(kZeroCrossings) * kTableStep + 2;
    std::vector<double> t(n);
    const double i0_beta = bessel_i0(kKaiserBeta);
    for (size_t i = 0; i < n; ++i) {
      double v = static_cast<double>(i) / kTableStep;
      if (v > kZeroCrossings) {
        t[i] = 0.0;
        continue;
      }
      double u = v / kZeroCrossings;
      double kaiser = bessel_i0(kKaiserBeta * std::sqrt(std::max(0.0, 1.0 - u * u))) / i0_beta;
      t[i] = sinc(v) * kaiser;
    }
    return t;
  }();
  return table;
}

double kernel_at(double v) {
  v = std::abs(v);
  if (v >= kZeroCrossings) return 0.0;
  const double pos = v * kTableStep;
  const auto idx = static_cast<size_t>(pos);
  const double frac = pos - static_cast<double>(idx);
  const auto& t = kernel_table();
  return t[idx] + frac * (t[idx + 1] - t[idx]);
}

}  // namespace

Waveform resample(const Waveform& w, uint32_t target_rate) {
  w.validate();
  if (target_rate == 0) throw ValidationError("resample: target rate must be positive");
  if (target_rate == w.sample_rate) return w;

  const double ratio = static_cast<double>(target_rate) / w.sample_rate;
  // Cutoff scales with the ratio when downsampling so the filter stays
  // band-limited to the output Nyquist.
  const double scale = std::min(1.0, ratio);
  const double support = kZeroCrossings / scale;  // in input samples
  const auto len = static_cast<int64_t>(w.samples.size());

  const uint64_t out_len_u =
      (2ULL * w.samples.size() * target_rate + w.sample_rate) / (2ULL * w.sample_rate);
  Waveform out;
  out.sample_rate = target_rate;
  out.samples.resize(static_cast<size_t>(out_len_u), 0.0);

  for (size_t n = 0; n < out.samples.size(); ++n) {
    const double center = static_cast<double>(n) / ratio;
    const auto j0 = static_cast<int64_t>(std::ceil(center - support));
    const auto j1 = static_cast<int64_t>(std::floor(center + support));
    double acc = 0.0;
    for (int64_t j = std::max<int64_t>(0, j0); j <= std::min(len - 1, j1); ++j) {
      acc += w.samples[static_cast<size_t>(j)] * kernel_at(scale * (static_cast<double>(j) - center));
    }
    out.samples[n] = scale * acc;
  }
  return out;
}

}  // namespace acb
