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

#include "acb/probe.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <set>

#include "acb/error.hpp"
#include "acb/rng.hpp"
#include "binio.hpp"

namespace acb {

std::string to_string(ProbeKind k) {
  switch (k) {
    case ProbeKind::kMulticlass: return "multiclass";
    case ProbeKind::kMultilabel: return "multilabel";
    case ProbeKind::kRegression: return "regression";
    case ProbeKind::kCtcAsr: return "ctc_asr";
  }
  throw ValidationError("unknown probe kind");
}

ProbeKind probe_kind_from_string(const std::string& s) {
  if (s == "multiclass") return ProbeKind::kMulticlass;
  if (s == "multilabel") return ProbeKind::kMultilabel;
  if (s == "regression") return ProbeKind::kRegression;
  if (s == "ctc_asr") return ProbeKind::kCtcAsr;
  throw ValidationError("unknown probe kind: " + s);
}

void ProbeTaskSpec::validate() const {
  if (kind != ProbeKind::kCtcAsr && n_outputs == 0)
    throw ValidationError("probe spec: n_outputs must be positive");
  if (epochs == 0) throw ValidationError("probe spec: epochs must be positive");
  if (learning_rate <= 0.0)
    throw ValidationError("probe spec: learning rate must be positive");
  if (batch_size == 0)
    throw ValidationError("probe spec: batch size must be positive");
}

std::vector<double> pool_embeddings(const FrameMatrix& frames) {
  if (frames.n_frames == 0)
    throw ValidationError("pool_embeddings: no frames");
  size_t e = frames.n_bins;
  std::vector<double> out(2 * e, 0.0);
  for (size_t t = 0; t < frames.n_frames; ++t)
    for (size_t b = 0; b < e; ++b) out[b] += frames.at(t, b);
  double inv = 1.0 / static_cast<double>(frames.n_frames);
  for (size_t b = 0; b < e; ++b) out[b] *= inv;
  for (size_t t = 0; t < frames.n_frames; ++t)
    for (size_t b = 0; b < e; ++b) {
      double d = frames.at(t, b) - out[b];
      out[e + b] += d * d;
    }
  for (size_t b = 0; b < e; ++b) out[e + b] = std::sqrt(out[e + b] * inv);
  return out;
}

FrameMatrix rvq_frame_embeddings(const RvqModel& m, const TokenGrid& g) {
  if (g.n_codebooks > m.n_stages())
    throw ValidationError("rvq_frame_embeddings: grid exceeds model stages");
  for (uint32_t c = 0; c < g.n_codebooks; ++c)
    if (g.codebook_sizes[c] != m.stages[c].k)
      throw ValidationError("rvq_frame_embeddings: codebook size mismatch");
  FrameMatrix f;
  f.n_frames = g.n_frames;
  f.n_bins = m.frame_len;
  f.kind = FrameKind::kTimeDomain;
  f.frame_rate = g.token_rate;
  f.data.assign(static_cast<size_t>(g.n_frames) * m.frame_len, 0.0);
  for (uint32_t t = 0; t < g.n_frames; ++t) {
    double* dst = f.row(t);
    for (uint32_t c = 0; c < g.n_codebooks; ++c) {
      const double* row = m.stages[c].row(g.at(t, c));
      for (uint32_t j = 0; j < m.frame_len; ++j) dst[j] += row[j];
    }
  }
  return f;
}

std::vector<double> pooled_one_hot(const TokenGrid& g) {
  if (g.n_frames == 0) throw ValidationError("pooled_one_hot: no frames");
  size_t e = 0;
  std::vector<size_t> offsets(g.n_codebooks);
  for (uint32_t c = 0; c < g.n_codebooks; ++c) {
    offsets[c] = e;
    e += g.codebook_sizes[c];
  }
  // Indicator dims: mean is the occupancy rate p, population std is
  // sqrt(p * (1 - p)); both follow from token frequencies alone.
  std::vector<double> out(2 * e, 0.0);
  double inv = 1.0 / static_cast<double>(g.n_frames);
  for (uint32_t t = 0; t < g.n_frames; ++t)
    for (uint32_t c = 0; c < g.n_codebooks; ++c)
      out[offsets[c] + g.at(t, c)] += inv;
  for (size_t d = 0; d < e; ++d) {
    double p = out[d];
    out[e + d] = std::sqrt(std::max(p * (1.0 - p), 0.0));
  }
  return out;
}

namespace {
constexpr char kFeMagic[4] = {'A', 'C', 'F', 'E'};
}  // namespace

FrameMatrix read_frame_embeddings(const std::string& path) {
  binio::Reader r(path);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kFeMagic, 4) != 0)
    throw IoError(path + ": bad frame-embedding magic");
  FrameMatrix f;
  f.n_frames = r.u32();
  f.n_bins = r.u32();
  f.kind = FrameKind::kTimeDomain;
  f.data.resize(f.n_frames * f.n_bins);
  for (auto& v : f.data) v = static_cast<double>(r.f32());
  if (!r.at_eof()) throw IoError(path + ": trailing bytes");
  return f;
}

void write_frame_embeddings(const FrameMatrix& frames,
                            const std::string& path) {
  binio::Writer w(path);
  w.bytes(kFeMagic, 4);
  w.u32(static_cast<uint32_t>(frames.n_frames));
  w.u32(static_cast<uint32_t>(frames.n_bins));
  for (double v : frames.data) w.f32(static_cast<float>(v));
  w.close();
}

std::vector<double> LinearProbe::forward(const std::vector<double>& x) const {
  if (x.size() != dim)
    throw ValidationError("linear probe: feature dimension mismatch");
  std::vector<double> z(n_outputs);
  for (uint32_t k = 0; k < n_outputs; ++k) {
    const double* w = weights.data() + static_cast<size_t>(k) * dim;
    double acc = bias[k];
    for (uint32_t j = 0; j < dim; ++j)
      acc += w[j] * (x[j] - feat_mean[j]) * feat_scale[j];
    z[k] = acc;
  }
  return z;
}

namespace {

void check_dataset(const ProbeDataset& data, const ProbeTaskSpec& spec,
                   bool training) {
  if (data.features.empty())
    throw ValidationError("probe: empty dataset");
  size_t dim = data.features.front().size();
  if (dim == 0) throw ValidationError("probe: zero-dimensional features");
  for (const auto& f : data.features)
    if (f.size() != dim)
      throw ValidationError("probe: ragged feature dimensions");
  size_t n = data.features.size();
  switch (spec.kind) {
    case ProbeKind::kMulticlass: {
      if (data.class_labels.size() != n)
        throw ValidationError("probe: class labels do not pair with features");
      std::set<uint32_t> distinct;
      for (uint32_t y : data.class_labels) {
        if (y >= spec.n_outputs)
          throw ValidationError("probe: class label out of range");
        distinct.insert(y);
      }
      if (training && distinct.size() < 2)
        throw ValidationError(
            "probe: degenerate single-class training set for multiclass");
      break;
    }
    case ProbeKind::kMultilabel:
      if (data.multi_labels.size() != n)
        throw ValidationError("probe: multilabels do not pair with features");
      for (const auto& row : data.multi_labels)
        if (row.size() != spec.n_outputs)
          throw ValidationError("probe: multilabel width mismatch");
      break;
    case ProbeKind::kRegression:
      if (data.targets.size() != n)
        throw ValidationError("probe: targets do not pair with features");
      for (const auto& row : data.targets)
        if (row.size() != spec.n_outputs)
          throw ValidationError("probe: target width mismatch");
      break;
    case ProbeKind::kCtcAsr:
      throw ValidationError("probe: ctc_asr uses train_ctc_probe");
  }
}

}  // namespace

LinearProbe train_linear_probe(const ProbeDataset& train,
                               const ProbeTaskSpec& spec) {
  spec.validate();
  check_dataset(train, spec, true);
  if (train.size() < 2)
    throw ValidationError("probe: need at least 2 training examples");

  size_t n = train.size();
  uint32_t dim = static_cast<uint32_t>(train.features.front().size());
  LinearProbe p;
  p.kind = spec.kind;
  p.n_outputs = spec.n_outputs;
  p.dim = dim;
  p.feat_mean.assign(dim, 0.0);
  p.feat_scale.assign(dim, 1.0);
  for (const auto& f : train.features)
    for (uint32_t j = 0; j < dim; ++j) p.feat_mean[j] += f[j];
  for (uint32_t j = 0; j < dim; ++j)
    p.feat_mean[j] /= static_cast<double>(n);
  std::vector<double> var(dim, 0.0);
  for (const auto& f : train.features)
    for (uint32_t j = 0; j < dim; ++j) {
      double d = f[j] - p.feat_mean[j];
      var[j] += d * d;
    }
  for (uint32_t j = 0; j < dim; ++j) {
    double sd = std::sqrt(var[j] / static_cast<double>(n));
    p.feat_scale[j] = sd > 1e-12 ? 1.0 / sd : 1.0;
  }

  std::vector<std::vector<double>> scaled(n);
  for (size_t i = 0; i < n; ++i) {
    scaled[i].resize(dim);
    for (uint32_t j = 0; j < dim; ++j)
      scaled[i][j] = (train.features[i][j] - p.feat_mean[j]) * p.feat_scale[j];
  }

  uint32_t l = spec.n_outputs;
  p.weights.assign(static_cast<size_t>(l) * dim, 0.0);
  p.bias.assign(l, 0.0);

  Rng rng(spec.seed);
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> z(l), gz(l);
  std::vector<double> d_w(static_cast<size_t>(l) * dim);
  std::vector<double> d_b(l);
  uint64_t steps = 0;
  for (uint32_t epoch = 0; epoch < spec.epochs && steps < spec.compute_budget;
       ++epoch) {
    rng.shuffle(order);
    for (size_t start = 0; start < n && steps < spec.compute_budget;
         start += spec.batch_size) {
      size_t stop = std::min(n, start + spec.batch_size);
      double inv_batch = 1.0 / static_cast<double>(stop - start);
      std::fill(d_w.begin(), d_w.end(), 0.0);
      std::fill(d_b.begin(), d_b.end(), 0.0);
      for (size_t bi = start; bi < stop; ++bi) {
        size_t i = order[bi];
        const std::vector<double>& x = scaled[i];
        for (uint32_t k = 0; k < l; ++k) {
          const double* w = p.weights.data() + static_cast<size_t>(k) * dim;
          double acc = p.bias[k];
          for (uint32_t j = 0; j < dim; ++j) acc += w[j] * x[j];
          z[k] = acc;
        }
        switch (spec.kind) {
          case ProbeKind::kMulticlass: {
            double mx = *std::max_element(z.begin(), z.end());
            double sum = 0.0;
            for (uint32_t k = 0; k < l; ++k) {
              gz[k] = std::exp(z[k] - mx);
              sum += gz[k];
            }
            for (uint32_t k = 0; k < l; ++k) gz[k] /= sum;
            gz[train.class_labels[i]] -= 1.0;
            break;
          }
          case ProbeKind::kMultilabel:
            for (uint32_t k = 0; k < l; ++k)
              gz[k] = 1.0 / (1.0 + std::exp(-z[k])) -
                      static_cast<double>(train.multi_labels[i][k]);
            break;
          case ProbeKind::kRegression:
            for (uint32_t k = 0; k < l; ++k)
              gz[k] = z[k] - train.targets[i][k];
            break;
          case ProbeKind::kCtcAsr:
            break;
        }
        for (uint32_t k = 0; k < l; ++k) {
          double g = gz[k] * inv_batch;
          if (g == 0.0) continue;
          double* w = d_w.data() + static_cast<size_t>(k) * dim;
          for (uint32_t j = 0; j < dim; ++j) w[j] += g * x[j];
          d_b[k] += g;
        }
      }
      for (size_t j = 0; j < p.weights.size(); ++j)
        p.weights[j] -= spec.learning_rate * d_w[j];
      for (uint32_t k = 0; k < l; ++k)
        p.bias[k] -= spec.learning_rate * d_b[k];
      ++steps;
    }
  }
  return p;
}

double MetricRecord::value(const std::string& name) const {
  for (const auto& [k, v] : values)
    if (k == name) return v;
  throw ValidationError("metric record: no metric '" + name + "'");
}

double roc_auc(const std::vector<double>& scores,
               const std::vector<uint8_t>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw ValidationError("roc_auc: scores and labels must pair up");
  size_t n = scores.size();
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  // Average ranks over tied scores (1-based).
  std::vector<double> rank(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (size_t t = i; t <= j; ++t) rank[idx[t]] = avg;
    i = j + 1;
  }
  double pos_ranks = 0.0;
  size_t n_pos = 0;
  for (size_t t = 0; t < n; ++t)
    if (labels[t]) {
      pos_ranks += rank[t];
      ++n_pos;
    }
  size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw ValidationError("roc_auc: undefined for a single-class label set");
  double p = static_cast<double>(n_pos);
  return (pos_ranks - p * (p + 1.0) / 2.0) /
         (p * static_cast<double>(n_neg));
}

double average_precision(const std::vector<double>& scores,
                         const std::vector<uint8_t>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw ValidationError("average_precision: scores and labels must pair up");
  size_t n = scores.size();
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  size_t n_pos = 0;
  for (uint8_t y : labels) n_pos += y ? 1 : 0;
  if (n_pos == 0)
    throw ValidationError("average_precision: no positive labels");
  double ap = 0.0, prev_recall = 0.0;
  size_t tp = 0, fp = 0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    for (size_t t = i; t <= j; ++t) {
      if (labels[idx[t]])
        ++tp;
      else
        ++fp;
    }
    double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    double precision =
        static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j + 1;
  }
  return ap;
}

double r_squared(const std::vector<std::vector<double>>& predictions,
                 const std::vector<std::vector<double>>& targets) {
  if (predictions.size() != targets.size() || predictions.empty())
    throw ValidationError("r_squared: predictions and targets must pair up");
  size_t n = predictions.size();
  size_t width = targets.front().size();
  if (width == 0) throw ValidationError("r_squared: no targets");
  double total = 0.0;
  for (size_t k = 0; k < width; ++k) {
    double mean = 0.0;
    for (size_t i = 0; i < n; ++i) mean += targets[i][k];
    mean /= static_cast<double>(n);
    double ss_res = 0.0, ss_tot = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double r = predictions[i][k] - targets[i][k];
      double d = targets[i][k] - mean;
      ss_res += r * r;
      ss_tot += d * d;
    }
    if (ss_tot == 0.0)
      throw ValidationError("r_squared: target " + std::to_string(k) +
                            " is constant");
    total += 1.0 - ss_res / ss_tot;
  }
  return total / static_cast<double>(width);
}

MetricRecord eval_classifier(const LinearProbe& probe,
                             const ProbeDataset& eval) {
  ProbeTaskSpec spec;
  spec.kind = probe.kind;
  spec.n_outputs = probe.n_outputs;
  check_dataset(eval, spec, false);

  MetricRecord rec;
  size_t n = eval.size();
  switch (probe.kind) {
    case ProbeKind::kMulticlass: {
      size_t hits = 0;
      for (size_t i = 0; i < n; ++i) {
        std::vector<double> z = probe.forward(eval.features[i]);
        size_t best = 0;
        for (size_t k = 1; k < z.size(); ++k)
          if (z[k] > z[best]) best = k;
        if (best == eval.class_labels[i]) ++hits;
      }
      rec.values.emplace_back(
          "acc", static_cast<double>(hits) / static_cast<double>(n));
      break;
    }
    case ProbeKind::kMultilabel: {
      std::vector<std::vector<double>> all_z(n);
      for (size_t i = 0; i < n; ++i) all_z[i] = probe.forward(eval.features[i]);
      double auc_sum = 0.0, ap_sum = 0.0;
      size_t used = 0;
      for (uint32_t k = 0; k < probe.n_outputs; ++k) {
        std::vector<double> scores(n);
        std::vector<uint8_t> labels(n);
        bool has_pos = false, has_neg = false;
        for (size_t i = 0; i < n; ++i) {
          scores[i] = all_z[i][k];
          labels[i] = eval.multi_labels[i][k];
          (labels[i] ? has_pos : has_neg) = true;
        }
        if (!has_pos || !has_neg) {
          rec.notes.push_back("label " + std::to_string(k) +
                              " skipped: single class");
          continue;
        }
        auc_sum += roc_auc(scores, labels);
        ap_sum += average_precision(scores, labels);
        ++used;
      }
      if (used == 0)
        throw ValidationError(
            "eval_classifier: every label column is single-class");
      rec.values.emplace_back("roc_auc", auc_sum / static_cast<double>(used));
      rec.values.emplace_back("ap", ap_sum / static_cast<double>(used));
      break;
    }
    case ProbeKind::kRegression: {
      std::vector<std::vector<double>> preds(n);
      for (size_t i = 0; i < n; ++i) preds[i] = probe.forward(eval.features[i]);
      rec.values.emplace_back("r2", r_squared(preds, eval.targets));
      break;
    }
    case ProbeKind::kCtcAsr:
      throw ValidationError("eval_classifier: ctc_asr uses eval_ctc_probe");
  }
  return rec;
}

}  // namespace acb
