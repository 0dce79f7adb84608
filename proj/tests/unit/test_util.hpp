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

#ifndef ACBENCH_TESTS_UNIT_TEST_UTIL_HPP_
#define ACBENCH_TESTS_UNIT_TEST_UTIL_HPP_

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "acb/rng.hpp"
#include "acb/waveform.hpp"

namespace acbtest {

// Fresh directory under the system temp root, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<uint64_t> counter{0};
    auto base = std::filesystem::temp_directory_path();
    path_ = base / ("acbench_test_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& rel = "") const {
    return rel.empty() ? path_.string() : (path_ / rel).string();
  }

 private:
  std::filesystem::path path_;
};

inline acb::Waveform sine(double freq, double seconds, uint32_t rate,
                          double amp = 0.5) {
  acb::Waveform w;
  w.sample_rate = rate;
  w.samples.resize(static_cast<size_t>(seconds * rate));
  for (size_t n = 0; n < w.samples.size(); ++n)
    w.samples[n] = amp * std::sin(2.0 * M_PI * freq * static_cast<double>(n) /
                                  static_cast<double>(rate));
  return w;
}

inline acb::Waveform white_noise(double seconds, uint32_t rate, uint64_t seed,
                                 double amp = 0.1) {
  acb::Waveform w;
  w.sample_rate = rate;
  w.samples.resize(static_cast<size_t>(seconds * rate));
  acb::Rng rng(seed);
  for (auto& s : w.samples) s = amp * (2.0 * rng.uniform() - 1.0);
  return w;
}

// Speech-shaped test signal: a tone with a slow amplitude modulation plus a
// little noise, enough temporal structure for envelope metrics.
inline acb::Waveform modulated_tone(double seconds, uint32_t rate,
                                    uint64_t seed = 1) {
  acb::Waveform w = sine(440.0, seconds, rate, 0.4);
  acb::Rng rng(seed);
  for (size_t n = 0; n < w.samples.size(); ++n) {
    double t = static_cast<double>(n) / static_cast<double>(rate);
    double env = 0.55 + 0.45 * std::sin(2.0 * M_PI * 4.0 * t);
    w.samples[n] = w.samples[n] * env + 0.01 * (2.0 * rng.uniform() - 1.0);
  }
  return w;
}

inline acb::Waveform add_noise_snr(const acb::Waveform& clean, double snr_db,
                                   uint64_t seed) {
  double sig = 0.0;
  for (double s : clean.samples) sig += s * s;
  acb::Waveform out = clean;
  acb::Rng rng(seed);
  std::vector<double> noise(clean.samples.size());
  double pow_n = 0.0;
  for (auto& v : noise) {
    v = rng.normal();
    pow_n += v * v;
  }
  double target = sig / std::pow(10.0, snr_db / 10.0);
  double scale = std::sqrt(target / pow_n);
  for (size_t i = 0; i < noise.size(); ++i) out.samples[i] += scale * noise[i];
  return out;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace acbtest

#endif  // ACBENCH_TESTS_UNIT_TEST_UTIL_HPP_
