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

#include "acb/error.hpp"
#include "acb/ngram.hpp"
#include "acb/rng.hpp"
#include "acb/token_grid.hpp"
#include "doctest.h"

using namespace acb;

namespace {

TokenGrid grid_of(const std::vector<std::vector<uint32_t>>& columns,
                  const std::vector<uint32_t>& sizes) {
  TokenGrid g;
  g.n_codebooks = static_cast<uint32_t>(columns.size());
  g.n_frames = static_cast<uint32_t>(columns[0].size());
  g.codebook_sizes = sizes;
  g.token_rate = Rational{50, 1};
  g.tokens.resize(static_cast<size_t>(g.n_frames) * g.n_codebooks);
  for (uint32_t t = 0; t < g.n_frames; ++t)
    for (uint32_t c = 0; c < g.n_codebooks; ++c) g.at(t, c) = columns[c][t];
  return g;
}

}  // namespace

TEST_CASE("bigram probabilities match the analytic hand case") {
  // Stream [0,1,0,2], V=3, d=0.75. Bigrams: 0->1, 1->0, 0->2. Every token
  // has continuation count 1, so the lower distribution is uniform 1/3.
  NGramLM lm(2, 3, 0.75);
  lm.add_stream({0, 1, 0, 2});
  lm.finalize();

  CHECK(lm.prob({}, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(lm.prob({}, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  CHECK(lm.prob({0}, 1) == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(lm.prob({0}, 2) == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(lm.prob({0}, 0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(lm.prob({1}, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(lm.prob({1}, 1) == doctest::Approx(0.25).epsilon(1e-12));

  // Context 2 never occurred: direct fallthrough to the lower level.
  CHECK(lm.prob({2}, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  double expect_ce =
      -(std::log(1.0 / 3.0) + std::log(0.375) + std::log(0.5) +
        std::log(0.375)) /
      4.0;
  CHECK(lm.cross_entropy({0, 1, 0, 2}) ==
        doctest::Approx(expect_ce).epsilon(1e-12));
}

TEST_CASE("distributions sum to one over many contexts") {
  Rng rng(101);
  const uint32_t vocab = 11;
  NGramLM lm(3, vocab, 0.75);
  for (int s = 0; s < 5; ++s) {
    std::vector<uint32_t> stream(400);
    for (auto& t : stream) t = rng.uniform_u32(vocab - 3);  // leave gaps
    lm.add_stream(stream);
  }
  lm.finalize();

  int checked = 0;
  for (int rep = 0; rep < 120; ++rep) {
    std::vector<uint32_t> ctx;
    size_t len = rng.uniform_u64(3);
    for (size_t i = 0; i < len; ++i) ctx.push_back(rng.uniform_u32(vocab));
    double total = 0.0;
    for (uint32_t v = 0; v < vocab; ++v) total += lm.prob(ctx, v);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("an untrained model is uniform and normalizes to 1024") {
  for (uint32_t size : {2u, 64u, 1024u, 16384u}) {
    NGramLM lm(3, size, 0.75);
    lm.finalize();
    std::vector<uint32_t> stream(100);
    Rng rng(size);
    for (auto& t : stream) t = rng.uniform_u32(size);
    double ce = lm.cross_entropy(stream);
    CHECK(ce == doctest::Approx(std::log(static_cast<double>(size)))
                    .epsilon(1e-12));
    CHECK(normalize_ppl(ce, size) == doctest::Approx(1024.0).epsilon(1e-9));
  }
}

TEST_CASE("normalize_ppl applies the 1024 reference") {
  CHECK(normalize_ppl(std::log(512.0), 512.0) ==
        doctest::Approx(1024.0).epsilon(1e-12));
  CHECK(normalize_ppl(0.0, 1024.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(normalize_ppl(std::log(2048.0), 1024.0) ==
        doctest::Approx(2048.0).epsilon(1e-12));
}

TEST_CASE("a deterministic stream drives cross-entropy toward zero") {
  NGramLM lm(2, 4, 0.75);
  lm.add_stream(std::vector<uint32_t>(2000, 2));
  lm.finalize();
  CHECK(lm.cross_entropy(std::vector<uint32_t>(500, 2)) < 0.02);
}

TEST_CASE("higher order captures a first-order pattern better") {
  // Deterministic cycle 0,1,2,0,1,2,... is learnable by a bigram and
  // invisible to a unigram.
  std::vector<uint32_t> cyc(3000);
  for (size_t i = 0; i < cyc.size(); ++i) cyc[i] = i % 3;
  NGramLM uni = train_ngram({cyc}, 1, 3);
  NGramLM bi = train_ngram({cyc}, 2, 3);
  double ce_uni = uni.cross_entropy(cyc);
  double ce_bi = bi.cross_entropy(cyc);
  CHECK(ce_bi < 0.05);
  CHECK(ce_uni > 1.0);  // ~ln 3
}

TEST_CASE("model guards its contract") {
  CHECK_THROWS_AS(NGramLM(0, 4), ValidationError);
  CHECK_THROWS_AS(NGramLM(2, 0), ValidationError);
  CHECK_THROWS_AS(NGramLM(2, 4, 1.0), ValidationError);
  CHECK_THROWS_AS(train_ngram({}, 2, 4), ValidationError);
  CHECK_THROWS_AS(train_ngram({{}}, 2, 4), ValidationError);

  NGramLM lm(2, 4, 0.75);
  lm.add_stream({0, 1});
  CHECK_THROWS_AS(lm.prob({0}, 1), ValidationError);  // not finalized
  lm.finalize();
  CHECK_THROWS_AS(lm.prob({0}, 7), ValidationError);
  CHECK_THROWS_AS(lm.add_stream({0}), ValidationError);
  CHECK_THROWS_AS(lm.cross_entropy({}), ValidationError);

  NGramLM other(2, 4, 0.75);
  CHECK_THROWS_AS(other.add_stream({9}), ValidationError);
}

TEST_CASE("grid perplexity trains one model per codebook column") {
  // Column 0 repeats one token; column 1 cycles through 8 values. Both are
  // perfectly predictable at order 2, with very different raw rates.
  std::vector<uint32_t> constant(600, 3), cycle(600);
  for (size_t i = 0; i < cycle.size(); ++i)
    cycle[i] = static_cast<uint32_t>(i % 8);
  TokenGrid train = grid_of({constant, cycle}, {16, 8});
  TokenGrid val = grid_of(
      {std::vector<uint32_t>(constant.begin(), constant.begin() + 300),
       std::vector<uint32_t>(cycle.begin(), cycle.begin() + 300)},
      {16, 8});

  PerplexityRecord rec = eval_grid_ppl({train}, {val}, 2, 0.75, 2);
  REQUIRE(rec.per_codebook.size() == 2);
  CHECK(rec.per_codebook[0].ce < 0.05);
  CHECK(rec.per_codebook[1].ce < 0.05);

  // The normalization identity holds per codebook and overall.
  CHECK(rec.per_codebook[0].ppl ==
        doctest::Approx(std::exp(rec.per_codebook[0].ce) / (16.0 / 1024.0))
            .epsilon(1e-12));
  CHECK(rec.per_codebook[1].ppl ==
        doctest::Approx(std::exp(rec.per_codebook[1].ce) / (8.0 / 1024.0))
            .epsilon(1e-12));
  double geo = std::sqrt(16.0 * 8.0);
  CHECK(rec.codebook_size == doctest::Approx(geo).epsilon(1e-12));
  CHECK(rec.ce_loss ==
        doctest::Approx((rec.per_codebook[0].ce + rec.per_codebook[1].ce) / 2.0)
            .epsilon(1e-12));
  CHECK(rec.normalized_ppl ==
        doctest::Approx(normalize_ppl(rec.ce_loss, geo)).epsilon(1e-12));
}

TEST_CASE("grid perplexity weights validation CE by token count") {
  // Two val grids of different lengths; the combined CE must equal the
  // token-weighted mean, not the grid mean.
  std::vector<uint32_t> pat(400);
  for (size_t i = 0; i < pat.size(); ++i) pat[i] = static_cast<uint32_t>(i % 4);
  TokenGrid train = grid_of({pat}, {4});

  std::vector<uint32_t> v1(pat.begin(), pat.begin() + 40);
  std::vector<uint32_t> v2(200, 0);  // constant, poorly predicted after 0
  TokenGrid g1 = grid_of({v1}, {4});
  TokenGrid g2 = grid_of({v2}, {4});

  NGramLM lm = train_ngram({pat}, 2, 4);
  double ce1 = lm.cross_entropy(v1);
  double ce2 = lm.cross_entropy(v2);
  double want = (ce1 * 40.0 + ce2 * 200.0) / 240.0;

  PerplexityRecord rec = eval_grid_ppl({train}, {g1, g2}, 2, 0.75, 1);
  CHECK(rec.per_codebook[0].ce == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("grid perplexity rejects mismatched codebooks") {
  TokenGrid a = grid_of({{0, 1, 2}}, {4});
  TokenGrid b = grid_of({{0, 1, 2}, {1, 2, 3}}, {4, 4});
  CHECK_THROWS_AS(eval_grid_ppl({a}, {b}, 2), ValidationError);
  CHECK_THROWS_AS(eval_grid_ppl({}, {a}, 2), ValidationError);
}
