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

#ifndef ACBENCH_ACB_CTC_HPP_
#define ACBENCH_ACB_CTC_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "acb/token_grid.hpp"

namespace acb {

inline constexpr uint32_t kCtcBlank = 0;

struct CtcResult {
  double loss = 0.0;            // -ln p(target | logits), nats
  std::vector<double> grad;     // T x n_labels, softmax(logits) - occupancy
  bool infeasible = false;      // target cannot fit in T frames
};

// Log-space forward-backward over the blank-interleaved target. logits are
// row-major T x n_labels with blank at column 0; target entries lie in
// [1, n_labels). Infeasible targets yield +inf loss, zero grad, flagged.
CtcResult ctc_loss(const std::vector<double>& logits, uint32_t n_frames,
                   uint32_t n_labels, const std::vector<uint32_t>& target);

// Per-frame argmax, collapse adjacent repeats, drop blanks.
std::vector<uint32_t> ctc_greedy_decode(const std::vector<double>& logits,
                                        uint32_t n_frames, uint32_t n_labels);

// Character targets: 'a'..'z' -> 1..26, space -> 27, apostrophe -> 28.
// Unsupported characters are dropped after lowercasing.
std::vector<uint32_t> text_to_labels(const std::string& text);
std::string labels_to_text(const std::vector<uint32_t>& labels);
inline constexpr uint32_t kCtcCharLabels = 29;  // 28 characters + blank

// Per-codebook token embedding tables (summed), +/-2 frame context stacking,
// and a linear projection to character logits.
struct CtcProbe {
  uint32_t emb_dim = 64;
  uint32_t context = 2;
  uint32_t n_logits = kCtcCharLabels;
  std::vector<uint32_t> codebook_sizes;
  std::vector<std::vector<double>> tables;  // per codebook, size * emb_dim
  std::vector<double> proj_w;               // n_logits x stacked_dim
  std::vector<double> proj_b;

  uint32_t stacked_dim() const { return emb_dim * (2 * context + 1); }
  // Row-major T x n_logits.
  std::vector<double> logits_for(const TokenGrid& g) const;
};

struct CtcProbeSpec {
  uint32_t epochs = 30;
  double learning_rate = 0.05;
  uint64_t seed = 0;
  uint64_t compute_budget = UINT64_MAX;  // max per-utterance gradient steps
};

struct CtcTrainStats {
  std::vector<double> epoch_loss;  // mean per-frame loss over feasible inputs
  uint64_t steps = 0;
  uint64_t infeasible_skipped = 0;
};

CtcProbe train_ctc_probe(const std::vector<TokenGrid>& grids,
                         const std::vector<std::string>& texts,
                         const CtcProbeSpec& spec,
                         CtcTrainStats* stats = nullptr);

struct CtcEval {
  double wer = 0.0;  // corpus-level: total edits / total reference words
  double cer = 0.0;
};

CtcEval eval_ctc_probe(const CtcProbe& probe,
                       const std::vector<TokenGrid>& grids,
                       const std::vector<std::string>& texts);

}  // namespace acb

#endif  // ACBENCH_ACB_CTC_HPP_
