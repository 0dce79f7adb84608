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
#include <complex>
#include <vector>

#include "acb/dsp.hpp"

namespace acb {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Iterative radix-2 Cooley-Tukey; n must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
  const size_t n = a.size();
  if (n <= 1) return;

  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = kTwoPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }

  if (inverse) {
    for (auto& x : a) x /= static_cast<double>(n);
  }
}

// Bluestein's algorithm: DFT of arbitrary length via a power-of-two
// convolution with the chirp sequence.
void fft_bluestein(std::vector<std::complex<double>>& a) {
  const size_t n = a.size();
  const size_t m = next_pow2(2 * n - 1);

  std::vector<std::complex<double>> chirp(n);
  for (size_t k = 0; k < n; ++k) {
    double phase = kTwoPi * 0.5 * (static_cast<double>(k) * k) / static_cast<double>(n);
    chirp[k] = std::complex<double>(std::cos(phase), -std::sin(phase));
  }

  std::vector<std::complex<double>> fa(m), fb(m);
  for (size_t k = 0; k < n; ++k) fa[k] = a[k] * chirp[k];
  fb[0] = std::conj(chirp[0]);
  for (size_t k = 1; k < n; ++k) fb[k] = fb[m - k] = std::conj(chirp[k]);

  fft_pow2(fa, false);
  fft_pow2(fb, false);
  for (size_t k = 0; k < m; ++k) fa[k] *= fb[k];
  fft_pow2(fa, true);

  for (size_t k = 0; k < n; ++k) a[k] = fa[k] * chirp[k];
}

}  // namespace

void fft(std::vector<std::complex<double>>& a) {
  if (a.size() <= 1) return;
  if (is_pow2(a.size())) {
    fft_pow2(a, false);
  } else {
    fft_bluestein(a);
  }
}

}  // namespace acb
