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

#include "acb/id_sensitivity.hpp"

#include <algorithm>

#include "acb/dsp.hpp"
#include "acb/error.hpp"

namespace acb {

namespace {

// Per-codebook same-ID fraction between two grids over the shorter length.
void compare_grids(const TokenGrid& a, const TokenGrid& b,
                   std::vector<double>& ratios, uint64_t& n_compared) {
  if (a.n_codebooks != b.n_codebooks)
    throw ValidationError("id-sensitivity: codebook counts differ");
  uint32_t t_min = std::min(a.n_frames, b.n_frames);
  n_compared = t_min;
  ratios.assign(a.n_codebooks, 0.0);
  if (t_min == 0) return;
  for (uint32_t c = 0; c < a.n_codebooks; ++c) {
    uint64_t same = 0;
    for (uint32_t t = 0; t < t_min; ++t)
      if (a.at(t, c) == b.at(t, c)) ++same;
    ratios[c] = static_cast<double>(same) / static_cast<double>(t_min);
  }
}

TokenGrid encode_any(CodecAdapter& codec, const Waveform& w,
                     const std::string& utt_id) {
  return utt_id.empty() ? codec.encode(w) : codec.encode_utterance(utt_id, w);
}

}  // namespace

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw ValidationError("ols_slope: length mismatch");
  size_t n = x.size();
  if (n < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < n; ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return den == 0.0 ? 0.0 : num / den;
}

std::vector<StabilityCurve> multi_round(CodecAdapter& codec, const Waveform& w,
                                        uint32_t n,
                                        const std::string& utt_id) {
  if (n < 2) throw ValidationError("multi_round: need n >= 2 rounds");
  if (!codec.can_decode())
    throw ValidationError("multi_round: codec '" + codec.descriptor().name +
                          "' has no decoder");
  TokenGrid first = encode_any(codec, w, utt_id);
  std::vector<StabilityCurve> curves(first.n_codebooks);
  for (uint32_t c = 0; c < first.n_codebooks; ++c)
    curves[c].codebook_index = c;

  TokenGrid prev = first;
  for (uint32_t r = 2; r <= n; ++r) {
    Waveform rec = codec.decode(prev);
    TokenGrid cur = codec.supports_waveform_encode()
                        ? codec.encode(rec)
                        : codec.encode_utterance(utt_id, rec);
    std::vector<double> ratios;
    uint64_t compared = 0;
    compare_grids(first, cur, ratios, compared);
    for (uint32_t c = 0; c < first.n_codebooks; ++c) {
      curves[c].ratios.push_back(ratios[c]);
      curves[c].n_compared = compared;
    }
    prev = std::move(cur);
  }

  std::vector<double> rounds(n - 1);
  for (uint32_t i = 0; i < n - 1; ++i) rounds[i] = static_cast<double>(i + 2);
  for (auto& curve : curves) curve.slope = ols_slope(rounds, curve.ratios);
  return curves;
}

std::vector<ShiftStability> time_shift_eval(CodecAdapter& codec,
                                            const Waveform& w, double shift_ms,
                                            const std::string& utt_id) {
  if (shift_ms * static_cast<double>(w.sample_rate) / 1000.0 >=
      static_cast<double>(w.samples.size()))
    throw ValidationError("time_shift_eval: shift at least as long as input");
  TokenGrid a = encode_any(codec, w, utt_id);
  Waveform shifted = time_shift(w, shift_ms);
  TokenGrid b = codec.encode(shifted);
  std::vector<double> ratios;
  uint64_t compared = 0;
  compare_grids(a, b, ratios, compared);
  std::vector<ShiftStability> out(a.n_codebooks);
  for (uint32_t c = 0; c < a.n_codebooks; ++c) {
    out[c].codebook_index = c;
    out[c].ratio = ratios[c];
    out[c].shift_ms = shift_ms;
    out[c].n_compared = compared;
  }
  return out;
}

std::vector<StabilityCurve> aggregate_stability(
    const std::vector<std::vector<StabilityCurve>>& per_utterance,
    bool pooled) {
  if (per_utterance.empty())
    throw ValidationError("aggregate_stability: empty corpus");
  const auto& head = per_utterance.front();
  size_t n_books = head.size();
  size_t n_rounds = n_books > 0 ? head.front().ratios.size() : 0;
  std::vector<StabilityCurve> agg(n_books);
  for (size_t c = 0; c < n_books; ++c) {
    agg[c].codebook_index = head[c].codebook_index;
    agg[c].ratios.assign(n_rounds, 0.0);
  }
  std::vector<double> weight_sum(n_books, 0.0);
  for (const auto& utt : per_utterance) {
    if (utt.size() != n_books)
      throw ValidationError("aggregate_stability: ragged codebook counts");
    for (size_t c = 0; c < n_books; ++c) {
      if (utt[c].ratios.size() != n_rounds)
        throw ValidationError("aggregate_stability: ragged round counts");
      double wgt = pooled ? static_cast<double>(utt[c].n_compared) : 1.0;
      for (size_t r = 0; r < n_rounds; ++r)
        agg[c].ratios[r] += wgt * utt[c].ratios[r];
      weight_sum[c] += wgt;
      agg[c].n_compared += utt[c].n_compared;
    }
  }
  std::vector<double> rounds(n_rounds);
  for (size_t i = 0; i < n_rounds; ++i) rounds[i] = static_cast<double>(i + 2);
  for (size_t c = 0; c < n_books; ++c) {
    if (weight_sum[c] <= 0.0)
      throw ValidationError("aggregate_stability: zero total weight");
    for (auto& v : agg[c].ratios) v /= weight_sum[c];
    agg[c].slope = ols_slope(rounds, agg[c].ratios);
  }
  return agg;
}

std::vector<ShiftStability> aggregate_shift(
    const std::vector<std::vector<ShiftStability>>& per_utterance,
    bool pooled) {
  if (per_utterance.empty())
    throw ValidationError("aggregate_shift: empty corpus");
  size_t n_books = per_utterance.front().size();
  std::vector<ShiftStability> agg(n_books);
  std::vector<double> weight_sum(n_books, 0.0);
  for (const auto& utt : per_utterance) {
    if (utt.size() != n_books)
      throw ValidationError("aggregate_shift: ragged codebook counts");
    for (size_t c = 0; c < n_books; ++c) {
      double wgt = pooled ? static_cast<double>(utt[c].n_compared) : 1.0;
      agg[c].codebook_index = utt[c].codebook_index;
      agg[c].shift_ms = utt[c].shift_ms;
      agg[c].ratio += wgt * utt[c].ratio;
      agg[c].n_compared += utt[c].n_compared;
      weight_sum[c] += wgt;
    }
  }
  for (size_t c = 0; c < n_books; ++c) {
    if (weight_sum[c] <= 0.0)
      throw ValidationError("aggregate_shift: zero total weight");
    agg[c].ratio /= weight_sum[c];
  }
  return agg;
}

}  // namespace acb
