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

// Microbenchmarks for the numeric kernels that dominate harness runtime.
// Fixtures are built lazily on first use so registration stays cheap.

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "acb/ctc.hpp"
#include "acb/dsp.hpp"
#include "acb/edit_distance.hpp"
#include "acb/ngram.hpp"
#include "acb/recon.hpp"
#include "acb/rng.hpp"
#include "acb/rvq.hpp"
#include "acb/waveform.hpp"

namespace {

acb::Waveform noise_wave(double seconds, uint32_t rate, uint64_t seed) {
  acb::Waveform w;
  w.sample_rate = rate;
  w.samples.resize(static_cast<size_t>(seconds * rate));
  acb::Rng rng(seed);
  for (auto& s : w.samples) s = 0.4 * (2.0 * rng.uniform() - 1.0);
  return w;
}

const acb::RvqModel& bench_model() {
  static const acb::RvqModel model = [] {
    std::vector<acb::Waveform> corpus;
    for (uint64_t i = 0; i < 8; ++i) corpus.push_back(noise_wave(0.5, 16000, i));
    return acb::train_rvq(corpus, 4, {256, 256, 256, 256}, 3, 256, 128, 16000, 0);
  }();
  return model;
}

void BM_RvqEncode(benchmark::State& state) {
  const acb::RvqModel& m = bench_model();
  acb::Waveform w = noise_wave(1.0, 16000, 99);
  for (auto _ : state) {
    acb::TokenGrid g = acb::rvq_encode(m, w);
    benchmark::DoNotOptimize(g.tokens.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(w.samples.size()));
}
BENCHMARK(BM_RvqEncode)->Unit(benchmark::kMillisecond);

void BM_RvqDecode(benchmark::State& state) {
  const acb::RvqModel& m = bench_model();
  acb::TokenGrid g = acb::rvq_encode(m, noise_wave(1.0, 16000, 99));
  for (auto _ : state) {
    acb::Waveform w = acb::rvq_decode(m, g);
    benchmark::DoNotOptimize(w.samples.data());
  }
}
BENCHMARK(BM_RvqDecode)->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
  acb::Rng rng(17);
  const size_t n_points = 2048;
  const uint32_t dim = 64;
  std::vector<double> points(n_points * dim);
  for (auto& v : points) v = rng.normal();
  for (auto _ : state) {
    acb::KMeansResult r = acb::kmeans(points, n_points, dim, 64, 5, 10, 1e-6, 0);
    benchmark::DoNotOptimize(r.centroids.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n_points));
}
BENCHMARK(BM_KMeans)->Unit(benchmark::kMillisecond);

void BM_Stoi(benchmark::State& state) {
  acb::Waveform ref = noise_wave(3.0, 16000, 1);
  acb::Waveform deg = ref;
  acb::Rng rng(2);
  for (auto& s : deg.samples) s += 0.05 * rng.normal();
  for (auto _ : state) {
    double v = acb::stoi(ref, deg);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_Stoi)->Unit(benchmark::kMillisecond);

void BM_Mcd(benchmark::State& state) {
  acb::Waveform ref = noise_wave(3.0, 16000, 3);
  acb::Waveform deg = ref;
  acb::Rng rng(4);
  for (auto& s : deg.samples) s += 0.05 * rng.normal();
  for (auto _ : state) {
    double v = acb::mcd(ref, deg);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_Mcd)->Unit(benchmark::kMillisecond);

void BM_Resample(benchmark::State& state) {
  acb::Waveform w = noise_wave(1.0, 16000, 5);
  for (auto _ : state) {
    acb::Waveform out = acb::resample(w, 24000);
    benchmark::DoNotOptimize(out.samples.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(w.samples.size()));
}
BENCHMARK(BM_Resample)->Unit(benchmark::kMillisecond);

void BM_NgramTrain(benchmark::State& state) {
  acb::Rng rng(7);
  std::vector<std::vector<uint32_t>> streams(32);
  for (auto& s : streams) {
    s.resize(2048);
    for (auto& tok : s) tok = rng.uniform_u32(1024);
  }
  for (auto _ : state) {
    acb::NGramLM lm = acb::train_ngram(streams, 3, 1024);
    benchmark::DoNotOptimize(&lm);
  }
  state.SetItemsProcessed(state.iterations() * 32 * 2048);
}
BENCHMARK(BM_NgramTrain)->Unit(benchmark::kMillisecond);

void BM_NgramScore(benchmark::State& state) {
  acb::Rng rng(8);
  std::vector<std::vector<uint32_t>> streams(32);
  for (auto& s : streams) {
    s.resize(2048);
    for (auto& tok : s) tok = rng.uniform_u32(1024);
  }
  acb::NGramLM lm = acb::train_ngram(streams, 3, 1024);
  std::vector<uint32_t> probe(4096);
  for (auto& tok : probe) tok = rng.uniform_u32(1024);
  for (auto _ : state) {
    double ce = lm.cross_entropy(probe);
    benchmark::DoNotOptimize(ce);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(probe.size()));
}
BENCHMARK(BM_NgramScore)->Unit(benchmark::kMillisecond);

void BM_CtcLoss(benchmark::State& state) {
  acb::Rng rng(9);
  const uint32_t frames = 200;
  std::vector<double> logits(static_cast<size_t>(frames) * acb::kCtcCharLabels);
  for (auto& v : logits) v = rng.uniform_range(-2.0, 2.0);
  std::vector<uint32_t> target;
  for (int i = 0; i < 40; ++i) target.push_back(1 + rng.uniform_u32(26));
  for (auto _ : state) {
    acb::CtcResult r = acb::ctc_loss(logits, frames, acb::kCtcCharLabels, target);
    benchmark::DoNotOptimize(r.grad.data());
  }
}
BENCHMARK(BM_CtcLoss)->Unit(benchmark::kMicrosecond);

void BM_EditDistance(benchmark::State& state) {
  acb::Rng rng(10);
  auto sentence = [&](size_t n) {
    std::vector<std::string> words;
    for (size_t i = 0; i < n; ++i)
      words.push_back(std::string(1, static_cast<char>('a' + rng.uniform_u32(26))) +
                      std::string(1, static_cast<char>('a' + rng.uniform_u32(26))));
    return words;
  };
  std::vector<std::string> ref = sentence(64), hyp = sentence(64);
  for (auto _ : state) {
    size_t d = acb::edit_distance(ref, hyp);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_EditDistance)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
