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

#ifndef ACBENCH_ACB_ANALYSIS_HPP_
#define ACBENCH_ACB_ANALYSIS_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "acb/id_sensitivity.hpp"

namespace acb {

enum class Provenance : uint8_t { kInternal, kExternalIngested };

struct MetricCell {
  double value = 0.0;
  Provenance provenance = Provenance::kInternal;
};

// Cross-codec metric store. Metric ids are slash-structured as
// task/dataset_type/name, e.g. recon/speech/stoi or probe/music/acc.
// Per-codebook perplexities use ppl/<type>/cb<i> and the aggregate
// ppl/<type>/overall, which anchors correlations for that dataset type.
struct MetricTable {
  std::map<std::string, std::map<std::string, MetricCell>> rows;

  // Throws on a duplicate (codec, metric) cell or a non-finite value.
  void set(const std::string& codec, const std::string& metric, double value,
           Provenance provenance = Provenance::kInternal);
  bool has(const std::string& codec, const std::string& metric) const;
  double get(const std::string& codec, const std::string& metric) const;
  std::vector<std::string> codecs() const;
  // Union of metric ids over all codecs, sorted.
  std::vector<std::string> metrics() const;
};

// Components of a slash-structured metric id. Ids with fewer than three
// segments leave task and dataset_type empty from the left.
struct MetricId {
  std::string task;
  std::string dataset_type;
  std::string name;
};
MetricId parse_metric_id(const std::string& id);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

struct CorrelationRow {
  std::string metric;        // full slash-structured id
  std::string task;
  std::string dataset_type;
  std::string name;
  double r = 0.0;
  uint64_t n = 0;            // codecs contributing to this pair
};

struct CorrelationReport {
  std::vector<CorrelationRow> rows;  // sorted by |r| descending
  std::vector<std::string> notes;    // one entry per skipped metric
};

// Correlates every non-ppl metric against the ppl/<type>/overall series of
// its own dataset type, pairwise-deleting codecs that miss either value.
// Falls back to the single ppl/*/overall series when the matching type is
// absent and only one exists. Throws when no metric yields two pairs.
CorrelationReport correlate_against_ppl(const MetricTable& table);

enum class ReportFormat : uint8_t { kCsv, kJson, kMarkdown, kSvg };
ReportFormat report_format_from_string(const std::string& s);
std::string to_string(ReportFormat f);

struct ReportInputs {
  MetricTable metrics;
  // codec -> per-codebook multi-round curves.
  std::map<std::string, std::vector<StabilityCurve>> round_curves;
  // codec -> per-codebook time-shift ratios.
  std::map<std::string, std::vector<ShiftStability>> shift_bars;
  CorrelationReport correlations;
  std::vector<std::string> notes;
};

// Writes the report bundle into out_dir and returns the paths written,
// sorted. Output bytes are a pure function of the inputs: keys iterate in
// sorted order and every float is rendered with %.6g.
std::vector<std::string> emit_report(const ReportInputs& in,
                                     const std::string& out_dir,
                                     const std::vector<ReportFormat>& formats);

// Reads the long-format codec,metric,value,provenance table that
// emit_report writes as metrics.csv.
MetricTable load_metric_table_csv(const std::string& path);

}  // namespace acb

#endif  // ACBENCH_ACB_ANALYSIS_HPP_
