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

#ifndef ACBENCH_ACB_HARNESS_HPP_
#define ACBENCH_ACB_HARNESS_HPP_

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "acb/analysis.hpp"
#include "acb/codec.hpp"
#include "acb/ctc.hpp"
#include "acb/manifest.hpp"
#include "acb/probe.hpp"

namespace acb {

// One codec selection in a run configuration.
struct CodecRef {
  std::string name;  // metric row key; defaults to the adapter's own name
  std::string kind;  // rvq | external | identity | random
  std::string path;  // rvq: model file, external: adapter directory
  uint32_t frame_len = 1024;                 // identity
  uint64_t seed = 0;                         // random
  std::vector<std::string> exclude_domains;  // domains this codec skips
};

std::unique_ptr<CodecAdapter> open_codec(const CodecRef& ref,
                                         const std::string& base_dir);

struct ProbeJob {
  std::string name;      // metric id stem, e.g. probe/<domain>/<name>_acc
  std::string manifest;  // labeled dataset
  ProbeKind kind = ProbeKind::kMulticlass;
  uint32_t n_outputs = 0;          // unused for ctc_asr
  std::string source = "one-hot";  // one-hot | rvq-sum | frames
  std::string frames_dir;          // source=frames: <utt_id>.acfe per row
  ProbeTaskSpec training;
  CtcProbeSpec ctc;
};

struct RunConfig {
  std::string dir;  // directory of the config file; resolves relative paths
  std::vector<CodecRef> codecs;
  std::vector<std::string> experiments;  // subset of recon idsens ppl probe
  std::string manifest;                  // main corpus
  std::string out_dir = "out";
  uint64_t seed = 0;
  uint32_t workers = 0;  // 0 = hardware concurrency
  uint32_t rounds = 10;
  double shift_ms = 2.0;
  uint32_t first_k = 8;  // codebooks entering token-level evaluations
  uint32_t ngram_order = 3;
  double ngram_discount = 0.75;
  bool pooled_idsens = false;    // frame-count-weighted aggregation
  uint32_t idsens_max_utts = 0;  // 0 = all
  std::vector<ProbeJob> probes;
  std::vector<ReportFormat> formats = {ReportFormat::kCsv, ReportFormat::kJson,
                                       ReportFormat::kMarkdown,
                                       ReportFormat::kSvg};
  std::string pesq_csv;  // optional per-utterance scores to ingest
  std::string asr_gt;    // optional hypothesis transcripts, utt_id\ttext
  std::string asr_rec;

  void validate() const;
};

RunConfig load_run_config(const std::string& path);
std::string run_config_to_json(const RunConfig& c);

// Grid cache keyed by codec name, utterance and waveform content. A rerun
// over unchanged inputs reads every grid back instead of re-encoding.
class TokenCache {
 public:
  explicit TokenCache(std::string dir);
  // Cached grid, or encode-and-store. Safe to call concurrently; files
  // appear via write-temp-then-rename so readers never see partial grids.
  TokenGrid get_or_encode(CodecAdapter& codec, const std::string& utt_id,
                          const Waveform& w);
  uint64_t hits() const { return hits_.load(); }
  uint64_t misses() const { return misses_.load(); }

 private:
  std::string dir_;
  std::atomic<uint64_t> hits_{0};
  std::atomic<uint64_t> misses_{0};
};

// Experiment runners append metric cells under <task>/<domain>/<name> ids
// and push skip explanations onto notes. All of them leave already-present
// cells untouched and throw on duplicates instead.
void run_recon(const RunConfig& cfg, const CodecRef& ref, CodecAdapter& codec,
               const Manifest& m, TokenCache* cache, MetricTable* table,
               std::vector<std::string>* notes);

void run_idsens(const RunConfig& cfg, const CodecRef& ref, CodecAdapter& codec,
                const Manifest& m, MetricTable* table, ReportInputs* report,
                std::vector<std::string>* notes);

void run_ppl(const RunConfig& cfg, const CodecRef& ref, CodecAdapter& codec,
             const Manifest& m, TokenCache* cache, MetricTable* table,
             std::vector<std::string>* notes);

void run_probe_job(const RunConfig& cfg, const CodecRef& ref,
                   CodecAdapter& codec, const ProbeJob& job, TokenCache* cache,
                   MetricTable* table, std::vector<std::string>* notes);

struct RunResult {
  ReportInputs report;
  std::vector<std::string> files;  // report files written
  uint64_t cache_hits = 0;         // wall-clock bookkeeping, never serialized
  uint64_t cache_misses = 0;
};

// Executes every requested experiment for every codec and writes the
// report bundle plus a config echo (seeds included) into out_dir.
RunResult run(const RunConfig& cfg);

}  // namespace acb

#endif  // ACBENCH_ACB_HARNESS_HPP_
