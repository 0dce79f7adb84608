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

#include "acb/ctc.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

#include "acb/edit_distance.hpp"
#include "acb/error.hpp"
#include "acb/rng.hpp"

namespace acb {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// Row-wise log-softmax of T x K logits.
std::vector<double> log_softmax(const std::vector<double>& logits, uint32_t t_len,
                                uint32_t k) {
  std::vector<double> lp(logits.size());
  for (uint32_t t = 0; t < t_len; ++t) {
    const double* z = logits.data() + static_cast<size_t>(t) * k;
    double* out = lp.data() + static_cast<size_t>(t) * k;
    double mx = z[0];
    for (uint32_t i = 1; i < k; ++i) mx = std::max(mx, z[i]);
    double sum = 0.0;
    for (uint32_t i = 0; i < k; ++i) sum += std::exp(z[i] - mx);
    double lse = mx + std::log(sum);
    for (uint32_t i = 0; i < k; ++i) out[i] = z[i] - lse;
  }
  return lp;
}

}  // namespace

CtcResult ctc_loss(const std::vector<double>& logits, uint32_t n_frames,
                   uint32_t n_labels, const std::vector<uint32_t>& target) {
  if (n_frames == 0 || n_labels < 2)
    throw ValidationError("ctc_loss: need frames and at least one label");
  if (logits.size() != static_cast<size_t>(n_frames) * n_labels)
    throw ValidationError("ctc_loss: logits shape mismatch");
  for (uint32_t v : target)
    if (v == kCtcBlank || v >= n_labels)
      throw ValidationError("ctc_loss: target label out of range");

  CtcResult res;
  res.grad.assign(logits.size(), 0.0);

  // Blank-interleaved expansion: [-, y0, -, y1, ..., -].
  uint32_t len = static_cast<uint32_t>(target.size());
  uint32_t l_len = 2 * len + 1;
  std::vector<uint32_t> lab(l_len, kCtcBlank);
  for (uint32_t i = 0; i < len; ++i) lab[2 * i + 1] = target[i];

  std::vector<double> lp = log_softmax(logits, n_frames, n_labels);
  auto lpt = [&](uint32_t t, uint32_t k) {
    return lp[static_cast<size_t>(t) * n_labels + k];
  };

  std::vector<double> alpha(static_cast<size_t>(n_frames) * l_len, kNegInf);
  std::vector<double> beta(static_cast<size_t>(n_frames) * l_len, kNegInf);
  auto a = [&](uint32_t t, uint32_t s) -> double& {
    return alpha[static_cast<size_t>(t) * l_len + s];
  };
  auto b = [&](uint32_t t, uint32_t s) -> double& {
    return beta[static_cast<size_t>(t) * l_len + s];
  };

  a(0, 0) = lpt(0, lab[0]);
  if (l_len > 1) a(0, 1) = lpt(0, lab[1]);
  for (uint32_t t = 1; t < n_frames; ++t) {
    for (uint32_t s = 0; s < l_len; ++s) {
      double v = a(t - 1, s);
      if (s >= 1) v = log_add(v, a(t - 1, s - 1));
      if (s >= 2 && lab[s] != kCtcBlank && lab[s] != lab[s - 2])
        v = log_add(v, a(t - 1, s - 2));
      if (v != kNegInf) a(t, s) = v + lpt(t, lab[s]);
    }
  }

  double log_p = a(n_frames - 1, l_len - 1);
  if (l_len > 1) log_p = log_add(log_p, a(n_frames - 1, l_len - 2));
  if (log_p == kNegInf) {
    res.loss = std::numeric_limits<double>::infinity();
    res.infeasible = true;
    return res;
  }

  b(n_frames - 1, l_len - 1) = 0.0;
  if (l_len > 1) b(n_frames - 1, l_len - 2) = 0.0;
  for (uint32_t t = n_frames - 1; t > 0; --t) {
    for (uint32_t s = 0; s < l_len; ++s) {
      double v = b(t, s) == kNegInf ? kNegInf : b(t, s) + lpt(t, lab[s]);
      if (s + 1 < l_len && b(t, s + 1) != kNegInf)
        v = log_add(v, b(t, s + 1) + lpt(t, lab[s + 1]));
      if (s + 2 < l_len && lab[s + 2] != kCtcBlank && lab[s + 2] != lab[s] &&
          b(t, s + 2) != kNegInf)
        v = log_add(v, b(t, s + 2) + lpt(t, lab[s + 2]));
      b(t - 1, s) = v;
    }
  }

  // Posterior occupancy per frame and label; grad = softmax - occupancy.
  res.loss = -log_p;
  for (uint32_t t = 0; t < n_frames; ++t) {
    std::vector<double> occ(n_labels, kNegInf);
    for (uint32_t s = 0; s < l_len; ++s) {
      double v = a(t, s);
      if (v == kNegInf || b(t, s) == kNegInf) continue;
      occ[lab[s]] = log_add(occ[lab[s]], v + b(t, s));
    }
    double* g = res.grad.data() + static_cast<size_t>(t) * n_labels;
    for (uint32_t k = 0; k < n_labels; ++k) {
      double gamma = occ[k] == kNegInf ? 0.0 : std::exp(occ[k] - log_p);
      g[k] = std::exp(lpt(t, k)) - gamma;
    }
  }
  return res;
}

std::vector<uint32_t> ctc_greedy_decode(const std::vector<double>& logits,
                                        uint32_t n_frames, uint32_t n_labels) {
  if (logits.size() != static_cast<size_t>(n_frames) * n_labels)
    throw ValidationError("ctc_greedy_decode: logits shape mismatch");
  std::vector<uint32_t> out;
  uint32_t prev = kCtcBlank;
  for (uint32_t t = 0; t < n_frames; ++t) {
    const double* z = logits.data() + static_cast<size_t>(t) * n_labels;
    uint32_t best = 0;
    for (uint32_t k = 1; k < n_labels; ++k)
      if (z[k] > z[best]) best = k;
    if (best != kCtcBlank && best != prev) out.push_back(best);
    prev = best;
  }
  return out;
}

std::vector<uint32_t> text_to_labels(const std::string& text) {
  std::vector<uint32_t> labels;
  for (unsigned char ch : text) {
    char c = static_cast<char>(std::tolower(ch));
    if (c >= 'a' && c <= 'z')
      labels.push_back(static_cast<uint32_t>(c - 'a') + 1);
    else if (c == ' ')
      labels.push_back(27);
    else if (c == '\'')
      labels.push_back(28);
  }
  return labels;
}

std::string labels_to_text(const std::vector<uint32_t>& labels) {
  std::string text;
  for (uint32_t v : labels) {
    if (v >= 1 && v <= 26)
      text.push_back(static_cast<char>('a' + v - 1));
    else if (v == 27)
      text.push_back(' ');
    else if (v == 28)
      text.push_back('\'');
    else
      throw ValidationError("labels_to_text: label out of range");
  }
  return text;
}

std::vector<double> CtcProbe::logits_for(const TokenGrid& g) const {
  if (g.codebook_sizes != codebook_sizes)
    throw ValidationError("ctc probe: grid codebooks do not match the probe");
  uint32_t t_len = g.n_frames;
  uint32_t window = 2 * context + 1;
  uint32_t s_dim = stacked_dim();

  std::vector<double> emb(static_cast<size_t>(t_len) * emb_dim, 0.0);
  for (uint32_t t = 0; t < t_len; ++t) {
    double* e = emb.data() + static_cast<size_t>(t) * emb_dim;
    for (uint32_t c = 0; c < g.n_codebooks; ++c) {
      const double* row =
          tables[c].data() + static_cast<size_t>(g.at(t, c)) * emb_dim;
      for (uint32_t j = 0; j < emb_dim; ++j) e[j] += row[j];
    }
  }

  std::vector<double> logits(static_cast<size_t>(t_len) * n_logits);
  std::vector<double> stacked(s_dim);
  for (uint32_t t = 0; t < t_len; ++t) {
    std::fill(stacked.begin(), stacked.end(), 0.0);
    for (uint32_t w = 0; w < window; ++w) {
      int64_t src = static_cast<int64_t>(t) + w - context;
      if (src < 0 || src >= static_cast<int64_t>(t_len)) continue;
      std::copy_n(emb.data() + static_cast<size_t>(src) * emb_dim, emb_dim,
                  stacked.data() + static_cast<size_t>(w) * emb_dim);
    }
    double* z = logits.data() + static_cast<size_t>(t) * n_logits;
    for (uint32_t k = 0; k < n_logits; ++k) {
      const double* wrow = proj_w.data() + static_cast<size_t>(k) * s_dim;
      double acc = proj_b[k];
      for (uint32_t j = 0; j < s_dim; ++j) acc += wrow[j] * stacked[j];
      z[k] = acc;
    }
  }
  return logits;
}

CtcProbe train_ctc_probe(const std::vector<TokenGrid>& grids,
                         const std::vector<std::string>& texts,
                         const CtcProbeSpec& spec, CtcTrainStats* stats) {
  if (grids.empty() || grids.size() != texts.size())
    throw ValidationError("train_ctc_probe: grids and texts must pair up");

  CtcProbe p;
  p.codebook_sizes = grids.front().codebook_sizes;
  for (const auto& g : grids)
    if (g.codebook_sizes != p.codebook_sizes)
      throw ValidationError("train_ctc_probe: inconsistent codebooks");

  std::vector<std::vector<uint32_t>> targets(grids.size());
  bool any_fits = false;
  for (size_t i = 0; i < grids.size(); ++i) {
    targets[i] = text_to_labels(texts[i]);
    if (targets[i].empty())
      throw ValidationError("train_ctc_probe: empty target after mapping");
    if (2 * targets[i].size() + 1 <= 2 * static_cast<size_t>(grids[i].n_frames))
      any_fits = true;
  }
  if (!any_fits)
    throw ValidationError("train_ctc_probe: all targets too long");

  Rng rng(spec.seed);
  uint32_t s_dim = p.stacked_dim();
  p.tables.resize(p.codebook_sizes.size());
  for (size_t c = 0; c < p.codebook_sizes.size(); ++c) {
    p.tables[c].resize(static_cast<size_t>(p.codebook_sizes[c]) * p.emb_dim);
    for (auto& v : p.tables[c]) v = rng.normal() * 0.5;
  }
  // Fan-in scaled projection keeps initial logits at O(1) so gradients reach
  // the tables from the first step.
  double w_scale = 1.0 / std::sqrt(static_cast<double>(s_dim));
  p.proj_w.resize(static_cast<size_t>(p.n_logits) * s_dim);
  for (auto& v : p.proj_w) v = rng.normal() * w_scale;
  p.proj_b.assign(p.n_logits, 0.0);

  // Heavy-ball momentum. Plain per-utterance steps leave the optimizer in
  // the all-blank basin for most of the epoch budget.
  const double kMomentum = 0.9;
  std::vector<double> v_w(p.proj_w.size(), 0.0);
  std::vector<double> v_b(p.n_logits, 0.0);
  std::vector<std::vector<double>> v_tables(p.tables.size());
  for (size_t c = 0; c < p.tables.size(); ++c)
    v_tables[c].assign(p.tables[c].size(), 0.0);

  std::vector<size_t> order(grids.size());
  std::iota(order.begin(), order.end(), 0);
  uint64_t steps = 0;
  uint32_t window = 2 * p.context + 1;
  std::vector<double> d_stacked(s_dim);
  for (uint32_t epoch = 0; epoch < spec.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_nll = 0.0;
    uint64_t epoch_frames = 0;
    for (size_t idx : order) {
      if (steps >= spec.compute_budget) break;
      const TokenGrid& g = grids[idx];
      uint32_t t_len = g.n_frames;
      std::vector<double> logits = p.logits_for(g);
      CtcResult r = ctc_loss(logits, t_len, p.n_logits, targets[idx]);
      if (r.infeasible) {
        if (stats) ++stats->infeasible_skipped;
        continue;
      }
      epoch_nll += r.loss;
      epoch_frames += t_len;

      // Per-frame-normalized gradient keeps the step size length-free.
      double scale = spec.learning_rate / static_cast<double>(t_len);

      // Recompute per-frame embeddings once for the backward pass.
      std::vector<double> emb(static_cast<size_t>(t_len) * p.emb_dim, 0.0);
      for (uint32_t t = 0; t < t_len; ++t) {
        double* e = emb.data() + static_cast<size_t>(t) * p.emb_dim;
        for (uint32_t c = 0; c < g.n_codebooks; ++c) {
          const double* row = p.tables[c].data() +
                              static_cast<size_t>(g.at(t, c)) * p.emb_dim;
          for (uint32_t j = 0; j < p.emb_dim; ++j) e[j] += row[j];
        }
      }
      std::vector<double> d_emb(static_cast<size_t>(t_len) * p.emb_dim, 0.0);
      std::vector<double> d_w(p.proj_w.size(), 0.0);
      std::vector<double> d_b(p.n_logits, 0.0);
      std::vector<double> stacked(s_dim);
      for (uint32_t t = 0; t < t_len; ++t) {
        std::fill(stacked.begin(), stacked.end(), 0.0);
        for (uint32_t w = 0; w < window; ++w) {
          int64_t src = static_cast<int64_t>(t) + w - p.context;
          if (src < 0 || src >= static_cast<int64_t>(t_len)) continue;
          std::copy_n(emb.data() + static_cast<size_t>(src) * p.emb_dim,
                      p.emb_dim,
                      stacked.data() + static_cast<size_t>(w) * p.emb_dim);
        }
        const double* gz = r.grad.data() + static_cast<size_t>(t) * p.n_logits;
        std::fill(d_stacked.begin(), d_stacked.end(), 0.0);
        for (uint32_t k = 0; k < p.n_logits; ++k) {
          double gk = gz[k];
          if (gk == 0.0) continue;
          double* wrow = d_w.data() + static_cast<size_t>(k) * s_dim;
          const double* prow = p.proj_w.data() + static_cast<size_t>(k) * s_dim;
          for (uint32_t j = 0; j < s_dim; ++j) {
            wrow[j] += gk * stacked[j];
            d_stacked[j] += gk * prow[j];
          }
          d_b[k] += gk;
        }
        for (uint32_t w = 0; w < window; ++w) {
          int64_t src = static_cast<int64_t>(t) + w - p.context;
          if (src < 0 || src >= static_cast<int64_t>(t_len)) continue;
          double* de = d_emb.data() + static_cast<size_t>(src) * p.emb_dim;
          const double* ds = d_stacked.data() + static_cast<size_t>(w) * p.emb_dim;
          for (uint32_t j = 0; j < p.emb_dim; ++j) de[j] += ds[j];
        }
      }
      for (size_t j = 0; j < p.proj_w.size(); ++j) {
        v_w[j] = kMomentum * v_w[j] + scale * d_w[j];
        p.proj_w[j] -= v_w[j];
      }
      for (uint32_t k = 0; k < p.n_logits; ++k) {
        v_b[k] = kMomentum * v_b[k] + scale * d_b[k];
        p.proj_b[k] -= v_b[k];
      }
      // Table velocities decay densely; the fresh gradient only touches the
      // rows present in this utterance.
      for (size_t c = 0; c < p.tables.size(); ++c)
        for (double& v : v_tables[c]) v *= kMomentum;
      for (uint32_t t = 0; t < t_len; ++t) {
        const double* de = d_emb.data() + static_cast<size_t>(t) * p.emb_dim;
        for (uint32_t c = 0; c < g.n_codebooks; ++c) {
          double* vrow = v_tables[c].data() +
                         static_cast<size_t>(g.at(t, c)) * p.emb_dim;
          for (uint32_t j = 0; j < p.emb_dim; ++j) vrow[j] += scale * de[j];
        }
      }
      for (size_t c = 0; c < p.tables.size(); ++c) {
        const double* v = v_tables[c].data();
        double* tab = p.tables[c].data();
        for (size_t j = 0; j < p.tables[c].size(); ++j) tab[j] -= v[j];
      }
      ++steps;
    }
    if (stats)
      stats->epoch_loss.push_back(
          epoch_frames == 0 ? 0.0
                            : epoch_nll / static_cast<double>(epoch_frames));
    if (steps >= spec.compute_budget) break;
  }
  if (stats) stats->steps = steps;
  return p;
}

CtcEval eval_ctc_probe(const CtcProbe& probe,
                       const std::vector<TokenGrid>& grids,
                       const std::vector<std::string>& texts) {
  if (grids.empty() || grids.size() != texts.size())
    throw ValidationError("eval_ctc_probe: grids and texts must pair up");
  size_t word_edits = 0, word_total = 0, char_edits = 0, char_total = 0;
  for (size_t i = 0; i < grids.size(); ++i) {
    std::vector<double> logits = probe.logits_for(grids[i]);
    std::string hyp =
        labels_to_text(ctc_greedy_decode(logits, grids[i].n_frames,
                                         probe.n_logits));
    std::string ref = normalize_text(labels_to_text(text_to_labels(texts[i])));
    std::string hn = normalize_text(hyp);
    auto rw = split_words(ref);
    auto hw = split_words(hn);
    if (rw.empty() || ref.empty())
      throw ValidationError("eval_ctc_probe: empty reference text");
    word_edits += edit_distance(rw, hw);
    word_total += rw.size();
    char_edits += edit_distance(ref, hn);
    char_total += ref.size();
  }
  CtcEval e;
  e.wer = static_cast<double>(word_edits) / static_cast<double>(word_total);
  e.cer = static_cast<double>(char_edits) / static_cast<double>(char_total);
  return e;
}

}  // namespace acb
