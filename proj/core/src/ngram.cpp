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

#include "acb/ngram.hpp"

#include <cmath>
#include <cstring>

#include "acb/error.hpp"
#include "acb/parallel.hpp"
#include "binio.hpp"

namespace acb {

NGramLM::NGramLM(uint32_t order, uint32_t vocab_size, double discount)
    : order_(order), vocab_size_(vocab_size), discount_(discount) {
  if (order == 0) throw ValidationError("ngram: order must be >= 1");
  if (vocab_size == 0) throw ValidationError("ngram: empty vocabulary");
  if (discount <= 0.0 || discount >= 1.0)
    throw ValidationError("ngram: discount must lie in (0, 1)");
  levels_.resize(order_);
}

std::string NGramLM::key_of(const uint32_t* tokens, uint32_t n) {
  std::string key(static_cast<size_t>(n) * 4, '\0');
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t b = 0; b < 4; ++b)
      key[static_cast<size_t>(i) * 4 + b] =
          static_cast<char>((tokens[i] >> (8 * b)) & 0xff);
  return key;
}

void NGramLM::add_stream(const std::vector<uint32_t>& stream) {
  if (finalized_) throw ValidationError("ngram: model already finalized");
  for (uint32_t v : stream)
    if (v >= vocab_size_)
      throw ValidationError("ngram: training token out of range");
  // Top-level raw counts only; lower levels are derived in finalize().
  // Streams shorter than the order carry no full n-gram and are skipped.
  uint32_t ctx_len = order_ - 1;
  for (size_t t = 0; t < stream.size(); ++t) {
    if (t < ctx_len) continue;
    const uint32_t* ctx = stream.data() + t - ctx_len;
    Context& c = levels_[order_ - 1][key_of(ctx, ctx_len)];
    double& cnt = c.counts[stream[t]];
    if (cnt == 0.0) ++c.types;
    cnt += 1.0;
    c.total += 1.0;
  }
}

void NGramLM::finalize() {
  if (finalized_) return;
  finalized_ = true;
  // Continuation counts: each distinct level-(k+1) gram contributes one
  // count to the level-k gram obtained by dropping its leftmost token.
  for (uint32_t level = order_ - 1; level >= 1; --level) {
    for (const auto& [key, ctx] : levels_[level]) {
      const uint32_t n_ctx = level;  // context length at this level
      std::vector<uint32_t> context(n_ctx);
      for (uint32_t i = 0; i < n_ctx; ++i) {
        uint32_t v = 0;
        for (uint32_t b = 0; b < 4; ++b)
          v |= static_cast<uint32_t>(
                   static_cast<unsigned char>(key[static_cast<size_t>(i) * 4 + b]))
               << (8 * b);
        context[i] = v;
      }
      std::string lower_key = key_of(context.data() + 1, n_ctx - 1);
      for (const auto& [token, count] : ctx.counts) {
        (void)count;
        Context& lower = levels_[level - 1][lower_key];
        double& cnt = lower.counts[token];
        if (cnt == 0.0) ++lower.types;
        cnt += 1.0;
        lower.total += 1.0;
      }
    }
    if (level == 1) break;
  }
}

double NGramLM::prob_at_level(uint32_t level, const uint32_t* context,
                              uint32_t token) const {
  if (level == 0) {
    auto it = levels_[0].find(std::string());
    if (it == levels_[0].end() || it->second.total <= 0.0)
      return 1.0 / static_cast<double>(vocab_size_);
    const Context& c = it->second;
    auto jt = c.counts.find(token);
    double count = jt == c.counts.end() ? 0.0 : jt->second;
    double disc = std::max(count - discount_, 0.0) / c.total;
    double lambda = discount_ * static_cast<double>(c.types) / c.total;
    return disc + lambda / static_cast<double>(vocab_size_);
  }
  auto it = levels_[level].find(key_of(context, level));
  if (it == levels_[level].end() || it->second.total <= 0.0)
    return prob_at_level(level - 1, context + 1, token);
  const Context& c = it->second;
  auto jt = c.counts.find(token);
  double count = jt == c.counts.end() ? 0.0 : jt->second;
  double disc = std::max(count - discount_, 0.0) / c.total;
  double lambda = discount_ * static_cast<double>(c.types) / c.total;
  return disc + lambda * prob_at_level(level - 1, context + 1, token);
}

double NGramLM::prob(const std::vector<uint32_t>& context,
                     uint32_t token) const {
  if (!finalized_) throw ValidationError("ngram: model not finalized");
  if (token >= vocab_size_)
    throw ValidationError("ngram: token out of range");
  uint32_t level = static_cast<uint32_t>(
      std::min<size_t>(context.size(), order_ - 1));
  return prob_at_level(level, context.data() + context.size() - level, token);
}

double NGramLM::cross_entropy(const std::vector<uint32_t>& stream) const {
  if (!finalized_) throw ValidationError("ngram: model not finalized");
  if (stream.empty()) throw ValidationError("ngram: empty stream");
  for (uint32_t v : stream)
    if (v >= vocab_size_) throw ValidationError("ngram: token out of range");
  double ce = 0.0;
  for (size_t t = 0; t < stream.size(); ++t) {
    uint32_t level =
        static_cast<uint32_t>(std::min<size_t>(t, order_ - 1));
    double p = prob_at_level(level, stream.data() + t - level, stream[t]);
    ce -= std::log(p);
  }
  return ce / static_cast<double>(stream.size());
}

NGramLM train_ngram(const std::vector<std::vector<uint32_t>>& streams,
                    uint32_t order, uint32_t vocab_size, double discount) {
  bool any = false;
  for (const auto& s : streams) any = any || !s.empty();
  if (!any) throw ValidationError("train_ngram: empty training data");
  NGramLM lm(order, vocab_size, discount);
  for (const auto& s : streams)
    if (!s.empty()) lm.add_stream(s);
  lm.finalize();
  return lm;
}

double cross_entropy(const NGramLM& lm, const std::vector<uint32_t>& stream) {
  return lm.cross_entropy(stream);
}

double normalize_ppl(double ce, double codebook_size) {
  if (codebook_size < 1.0)
    throw ValidationError("normalize_ppl: codebook size must be >= 1");
  return std::exp(ce) / (codebook_size / 1024.0);
}

PerplexityRecord eval_grid_ppl(const std::vector<TokenGrid>& train,
                               const std::vector<TokenGrid>& val,
                               uint32_t order, double discount,
                               unsigned workers) {
  if (train.empty() || val.empty())
    throw ValidationError("eval_grid_ppl: empty split");
  uint32_t n_books = train.front().n_codebooks;
  std::vector<uint32_t> sizes = train.front().codebook_sizes;
  for (const auto& g : train)
    if (g.n_codebooks != n_books || g.codebook_sizes != sizes)
      throw ValidationError("eval_grid_ppl: inconsistent train grids");
  for (const auto& g : val)
    if (g.n_codebooks != n_books || g.codebook_sizes != sizes)
      throw ValidationError("eval_grid_ppl: inconsistent val grids");

  PerplexityRecord rec;
  rec.per_codebook.resize(n_books);
  parallel_for(n_books, workers, [&](size_t c) {
    NGramLM lm(order, sizes[c], discount);
    for (const auto& g : train) {
      auto col = g.column(static_cast<uint32_t>(c));
      if (!col.empty()) lm.add_stream(col);
    }
    lm.finalize();
    double nll = 0.0;
    uint64_t n_tokens = 0;
    for (const auto& g : val) {
      auto col = g.column(static_cast<uint32_t>(c));
      if (col.empty()) continue;
      nll += lm.cross_entropy(col) * static_cast<double>(col.size());
      n_tokens += col.size();
    }
    if (n_tokens == 0)
      throw ValidationError("eval_grid_ppl: empty val streams");
    double ce = nll / static_cast<double>(n_tokens);
    rec.per_codebook[c].codebook_index = static_cast<uint32_t>(c);
    rec.per_codebook[c].ce = ce;
    rec.per_codebook[c].ppl = normalize_ppl(ce, sizes[c]);
  });

  double ce_sum = 0.0, log_size_sum = 0.0;
  for (uint32_t c = 0; c < n_books; ++c) {
    ce_sum += rec.per_codebook[c].ce;
    log_size_sum += std::log(static_cast<double>(sizes[c]));
  }
  rec.ce_loss = ce_sum / n_books;
  rec.codebook_size = std::exp(log_size_sum / n_books);
  rec.normalized_ppl = normalize_ppl(rec.ce_loss, rec.codebook_size);
  return rec;
}

namespace {
constexpr char kLpMagic[4] = {'A', 'C', 'L', 'P'};
constexpr uint16_t kLpVersion = 1;
}  // namespace

ExternalLogProbs ingest_external_logprobs(const std::string& path) {
  binio::Reader r(path);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kLpMagic, 4) != 0)
    throw IoError(path + ": bad log-prob file magic");
  uint16_t version = r.u16();
  if (version != kLpVersion)
    throw IoError(path + ": unsupported log-prob version " +
                  std::to_string(version));
  ExternalLogProbs lp;
  lp.codebook_index = r.u16();
  uint64_t count = r.u64();
  lp.values.resize(count);
  for (auto& v : lp.values) {
    v = r.f64();
    if (!(v <= 0.0))
      throw IoError(path + ": positive log-probability");
  }
  if (!r.at_eof()) throw IoError(path + ": trailing bytes");
  return lp;
}

void write_external_logprobs(const ExternalLogProbs& lp,
                             const std::string& path) {
  binio::Writer w(path);
  w.bytes(kLpMagic, 4);
  w.u16(kLpVersion);
  w.u16(lp.codebook_index);
  w.u64(lp.values.size());
  for (double v : lp.values) w.f64(v);
  w.close();
}

PerplexityRecord ppl_from_logprobs(const std::vector<ExternalLogProbs>& streams,
                                   const std::vector<uint32_t>& codebook_sizes,
                                   uint64_t tokens_per_codebook) {
  if (streams.empty())
    throw ValidationError("ppl_from_logprobs: no streams");
  size_t n_books = codebook_sizes.size();
  if (n_books == 0)
    throw ValidationError("ppl_from_logprobs: no codebooks");

  std::vector<std::vector<double>> per_book(n_books);
  if (streams.size() == 1 && streams[0].codebook_index == 0xFFFF) {
    const auto& v = streams[0].values;
    if (v.size() != tokens_per_codebook * n_books)
      throw ValidationError(
          "ppl_from_logprobs: interleaved stream length does not match T*N");
    for (size_t c = 0; c < n_books; ++c) {
      per_book[c].resize(tokens_per_codebook);
      for (uint64_t t = 0; t < tokens_per_codebook; ++t)
        per_book[c][t] = v[t * n_books + c];
    }
  } else {
    std::vector<bool> seen(n_books, false);
    for (const auto& s : streams) {
      if (s.codebook_index >= n_books)
        throw ValidationError("ppl_from_logprobs: codebook index out of range");
      if (seen[s.codebook_index])
        throw ValidationError("ppl_from_logprobs: duplicate codebook stream");
      if (s.values.size() != tokens_per_codebook)
        throw ValidationError(
            "ppl_from_logprobs: stream length does not match the grid");
      seen[s.codebook_index] = true;
      per_book[s.codebook_index] = s.values;
    }
    for (size_t c = 0; c < n_books; ++c)
      if (!seen[c])
        throw ValidationError("ppl_from_logprobs: missing codebook " +
                              std::to_string(c));
  }

  PerplexityRecord rec;
  rec.per_codebook.resize(n_books);
  double ce_sum = 0.0, log_size_sum = 0.0;
  for (size_t c = 0; c < n_books; ++c) {
    double nll = 0.0;
    for (double v : per_book[c]) nll -= v;
    double ce = nll / static_cast<double>(per_book[c].size());
    rec.per_codebook[c].codebook_index = static_cast<uint32_t>(c);
    rec.per_codebook[c].ce = ce;
    rec.per_codebook[c].ppl = normalize_ppl(ce, codebook_sizes[c]);
    ce_sum += ce;
    log_size_sum += std::log(static_cast<double>(codebook_sizes[c]));
  }
  rec.ce_loss = ce_sum / static_cast<double>(n_books);
  rec.codebook_size = std::exp(log_size_sum / static_cast<double>(n_books));
  rec.normalized_ppl = normalize_ppl(rec.ce_loss, rec.codebook_size);
  return rec;
}

}  // namespace acb
