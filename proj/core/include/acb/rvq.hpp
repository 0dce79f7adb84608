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

#ifndef ACBENCH_ACB_RVQ_HPP_
#define ACBENCH_ACB_RVQ_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "acb/codec.hpp"
#include "acb/dsp.hpp"
#include "acb/token_grid.hpp"
#include "acb/waveform.hpp"

namespace acb {

struct Codebook {
  std::vector<double> centroids;  // k * dim, row-major
  uint32_t k = 0;
  uint32_t dim = 0;

  const double* row(uint32_t i) const {
    return centroids.data() + static_cast<size_t>(i) * dim;
  }
  void validate() const;  // finite rows, no two rows equal within 1e-12
};

struct RvqModel {
  std::vector<Codebook> stages;
  uint32_t frame_len = 1024;
  uint32_t hop = 512;
  uint32_t sample_rate = 24000;
  std::vector<double> stage_inertia;  // final k-means inertia, training only

  uint32_t n_stages() const { return static_cast<uint32_t>(stages.size()); }
  std::vector<uint32_t> codebook_sizes() const;
  void validate() const;
};

// Hann-windowed 50%-overlap time-domain frames (hop must equal frame_len/2).
FrameMatrix extract_frames(const Waveform& w, uint32_t frame_len,
                           uint32_t hop);

// Weight-normalized overlap-add of time-domain frames windowed once at
// analysis. Output has (T-1)*hop + frame_len samples.
Waveform overlap_add(const FrameMatrix& frames, uint32_t frame_len,
                     uint32_t hop, uint32_t sample_rate);

struct KMeansResult {
  std::vector<double> centroids;  // k * dim
  double inertia = 0.0;
  uint32_t iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding. Stops after max_iter rounds or
// when relative inertia improvement drops below tol. Empty clusters are
// reseeded to the point farthest from its assigned centroid. The result is
// identical for any worker count.
KMeansResult kmeans(const std::vector<double>& points, size_t n_points,
                    uint32_t dim, uint32_t k, uint64_t seed,
                    uint32_t max_iter = 50, double tol = 1e-6,
                    unsigned workers = 1);

// Stage s is trained on the residuals left by stages 0..s-1.
RvqModel train_rvq(const std::vector<Waveform>& corpus, uint32_t n_stages,
                   const std::vector<uint32_t>& stage_sizes, uint64_t seed,
                   uint32_t frame_len = 1024, uint32_t hop = 512,
                   uint32_t sample_rate = 24000, unsigned workers = 1);

// Nearest centroid per stage on the residual; ties break to the lowest
// index. Inputs at another rate are resampled first.
TokenGrid rvq_encode(const RvqModel& m, const Waveform& w);

// Accepts grids truncated to the first N' <= N stages.
Waveform rvq_decode(const RvqModel& m, const TokenGrid& g);

// Model file: magic "ACBM", little-endian, centroids float64 stage-major.
void save_rvq(const RvqModel& m, const std::string& path);
RvqModel load_rvq(const std::string& path);

std::unique_ptr<CodecAdapter> rvq_codec(RvqModel m,
                                        const std::string& name = "ref-rvq");

}  // namespace acb

#endif  // ACBENCH_ACB_RVQ_HPP_
