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

#ifndef ACBENCH_ACB_PROBE_HPP_
#define ACBENCH_ACB_PROBE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "acb/dsp.hpp"
#include "acb/rvq.hpp"
#include "acb/token_grid.hpp"

namespace acb {

enum class ProbeKind { kMulticlass, kMultilabel, kRegression, kCtcAsr };

std::string to_string(ProbeKind k);
ProbeKind probe_kind_from_string(const std::string& s);

struct ProbeTaskSpec {
  ProbeKind kind = ProbeKind::kMulticlass;
  uint32_t n_outputs = 0;  // classes, labels, or regression targets
  uint32_t epochs = 100;
  double learning_rate = 0.1;
  uint32_t batch_size = 32;
  uint64_t seed = 0;
  uint64_t compute_budget = UINT64_MAX;  // max minibatch gradient steps

  void validate() const;
};

// Mean and population standard deviation per dimension over frames,
// concatenated to a 2E vector.
std::vector<double> pool_embeddings(const FrameMatrix& frames);

// Frame embedding of an RVQ grid: sum of the selected stage centroids.
FrameMatrix rvq_frame_embeddings(const RvqModel& m, const TokenGrid& g);

// Pooled mean/std of concatenated per-codebook one-hots, computed in closed
// form from token frequencies. Dimension 2 * sum(codebook_sizes).
std::vector<double> pooled_one_hot(const TokenGrid& g);

// Per-frame embedding dump: magic "ACFE", u32 T, u32 E, float32 row-major.
FrameMatrix read_frame_embeddings(const std::string& path);
void write_frame_embeddings(const FrameMatrix& frames, const std::string& path);

// Exactly one of the label containers is used, chosen by the task kind.
struct ProbeDataset {
  std::vector<std::vector<double>> features;
  std::vector<uint32_t> class_labels;
  std::vector<std::vector<uint8_t>> multi_labels;
  std::vector<std::vector<double>> targets;

  size_t size() const { return features.size(); }
};

struct LinearProbe {
  ProbeKind kind = ProbeKind::kMulticlass;
  uint32_t n_outputs = 0;
  uint32_t dim = 0;                  // raw feature dimension
  std::vector<double> weights;       // n_outputs x dim, over scaled features
  std::vector<double> bias;
  std::vector<double> feat_mean;     // train-split standardization
  std::vector<double> feat_scale;    // 1/std, 1 where std ~ 0

  // Logits (multiclass/multilabel) or predictions (regression).
  std::vector<double> forward(const std::vector<double>& x) const;
};

LinearProbe train_linear_probe(const ProbeDataset& train,
                               const ProbeTaskSpec& spec);

struct MetricRecord {
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::string> notes;

  double value(const std::string& name) const;
};

MetricRecord eval_classifier(const LinearProbe& probe,
                             const ProbeDataset& eval);

// Mann-Whitney rank statistic with average ranks on ties. Throws when either
// class is empty.
double roc_auc(const std::vector<double>& scores,
               const std::vector<uint8_t>& labels);

// Sum over descending score thresholds of (R_k - R_{k-1}) * P_k, ties
// grouped.
double average_precision(const std::vector<double>& scores,
                         const std::vector<uint8_t>& labels);

// 1 - SS_res/SS_tot per target, averaged. Throws naming any constant target.
double r_squared(const std::vector<std::vector<double>>& predictions,
                 const std::vector<std::vector<double>>& targets);

}  // namespace acb

#endif  // ACBENCH_ACB_PROBE_HPP_
