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

#ifndef ACBENCH_ACB_NGRAM_HPP_
#define ACBENCH_ACB_NGRAM_HPP_

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "acb/token_grid.hpp"

namespace acb {

// Interpolated Kneser-Ney n-gram model over token ids. Raw counts at the
// top order, continuation counts below, uniform 1/vocab_size base case.
class NGramLM {
 public:
  NGramLM(uint32_t order, uint32_t vocab_size, double discount = 0.75);

  void add_stream(const std::vector<uint32_t>& stream);
  // Derives the continuation tables; called once after all add_stream calls.
  void finalize();

  // p(token | up to order-1 preceding tokens). Shorter contexts use the
  // matching lower-order distribution directly.
  double prob(const std::vector<uint32_t>& context, uint32_t token) const;

  // Natural-log per-token cross-entropy of one stream, position t
  // conditioned on the min(t, order-1) preceding tokens.
  double cross_entropy(const std::vector<uint32_t>& stream) const;

  uint32_t order() const { return order_; }
  uint32_t vocab_size() const { return vocab_size_; }
  double discount() const { return discount_; }

 private:
  struct Context {
    std::unordered_map<uint32_t, double> counts;
    double total = 0.0;
    uint32_t types = 0;  // distinct continuations
  };

  double prob_at_level(uint32_t level, const uint32_t* context,
                       uint32_t token) const;
  static std::string key_of(const uint32_t* tokens, uint32_t n);

  uint32_t order_;
  uint32_t vocab_size_;
  double discount_;
  bool finalized_ = false;
  // levels_[k-1]: contexts of length k-1 for the level-k distribution.
  std::vector<std::unordered_map<std::string, Context>> levels_;
};

NGramLM train_ngram(const std::vector<std::vector<uint32_t>>& streams,
                    uint32_t order, uint32_t vocab_size,
                    double discount = 0.75);

double cross_entropy(const NGramLM& lm,
                     const std::vector<uint32_t>& stream);

// exp(ce) / (codebook_size / 1024): size-normalized to the 1024 reference.
double normalize_ppl(double ce, double codebook_size);

struct PerCodebookPpl {
  uint32_t codebook_index = 0;
  double ce = 0.0;
  double ppl = 0.0;
};

struct PerplexityRecord {
  double ce_loss = 0.0;        // mean over codebooks, nats/token
  double codebook_size = 0.0;  // geometric mean across codebooks
  double normalized_ppl = 0.0;
  std::vector<PerCodebookPpl> per_codebook;
};

// One independent LM per codebook column, trained on train grids and scored
// on val grids. Overall CE is the mean of per-codebook CEs; the overall PPL
// normalizes by the geometric mean codebook size.
PerplexityRecord eval_grid_ppl(const std::vector<TokenGrid>& train,
                               const std::vector<TokenGrid>& val,
                               uint32_t order, double discount = 0.75,
                               unsigned workers = 1);

struct ExternalLogProbs {
  // 0xFFFF marks a whole-grid interleaved stream instead of one codebook.
  uint16_t codebook_index = 0;
  std::vector<double> values;  // natural-log probabilities, <= 0
};

// File format: magic "ACLP", u16 version = 1, u16 codebook_index,
// u64 count, then count float64 little-endian values.
ExternalLogProbs ingest_external_logprobs(const std::string& path);
void write_external_logprobs(const ExternalLogProbs& lp,
                             const std::string& path);

// PerplexityRecord from per-codebook external log-prob streams; stream i
// must carry codebook_sizes[i]'s column with the token count of val grids.
PerplexityRecord ppl_from_logprobs(const std::vector<ExternalLogProbs>& streams,
                                   const std::vector<uint32_t>& codebook_sizes,
                                   uint64_t tokens_per_codebook);

}  // namespace acb

#endif  // ACBENCH_ACB_NGRAM_HPP_
