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

#include "acb/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "acb/dsp.hpp"
#include "acb/edit_distance.hpp"
#include "acb/error.hpp"
#include "acb/id_sensitivity.hpp"
#include "acb/ngram.hpp"
#include "acb/parallel.hpp"
#include "acb/recon.hpp"
#include "acb/rvq.hpp"
#include "json.hpp"

namespace acb {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string> kExperiments = {"recon", "idsens", "ppl", "probe"};
const std::set<std::string> kCodecKinds = {"rvq", "external", "identity",
                                           "random"};
const std::set<std::string> kProbeSources = {"one-hot", "rvq-sum", "frames"};

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
            c == '_')
               ? c
               : '_';
  return out.empty() ? std::string("unnamed") : out;
}

bool excluded(const CodecRef& ref, const ManifestEntry& e) {
  return std::find(ref.exclude_domains.begin(), ref.exclude_domains.end(),
                   domain_bucket(e)) != ref.exclude_domains.end();
}

std::vector<const ManifestEntry*> eval_entries(const Manifest& m,
                                               const CodecRef& ref) {
  EvalSet test = m.test_set();
  std::vector<const ManifestEntry*> src =
      test.entries.empty() ? m.all() : test.entries;
  std::vector<const ManifestEntry*> out;
  for (const auto* e : src)
    if (!excluded(ref, *e)) out.push_back(e);
  return out;
}

// Encodes through the cache when one applies; file-backed codecs read
// their own artifacts and session-scoped ones must re-register grids.
TokenGrid encode_entry(CodecAdapter& codec, TokenCache* cache,
                       const std::string& utt_id, const Waveform& w) {
  if (cache && codec.supports_waveform_encode())
    return cache->get_or_encode(codec, utt_id, w);
  return codec.encode_utterance(utt_id, w);
}

[[noreturn]] void rethrow_with_context(const std::string& where) {
  try {
    throw;
  } catch (const ValidationError& ex) {
    throw ValidationError(where + ": " + ex.what());
  } catch (const IoError& ex) {
    throw IoError(where + ": " + ex.what());
  } catch (const std::exception& ex) {
    throw IoError(where + ": " + ex.what());
  }
}

struct BucketMean {
  double sum = 0.0;
  uint64_t n = 0;
  void add(double v) {
    sum += v;
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
};

uint64_t fnv1a(const void* data, size_t len, uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

std::unique_ptr<CodecAdapter> open_codec(const CodecRef& ref,
                                         const std::string& base_dir) {
  if (ref.kind == "rvq") {
    if (ref.path.empty())
      throw ValidationError("codec " + ref.name + ": rvq kind needs a path");
    RvqModel m = load_rvq(resolve_path(base_dir, ref.path));
    return rvq_codec(std::move(m),
                     ref.name.empty() ? std::string("ref-rvq") : ref.name);
  }
  if (ref.kind == "external") {
    if (ref.path.empty())
      throw ValidationError("codec " + ref.name +
                            ": external kind needs a path");
    return external_codec(resolve_path(base_dir, ref.path));
  }
  if (ref.kind == "identity") return identity_codec(ref.frame_len);
  if (ref.kind == "random") return random_codec(ref.seed);
  throw ValidationError("unknown codec kind: " + ref.kind);
}

void RunConfig::validate() const {
  if (codecs.empty()) throw ValidationError("config: no codecs");
  std::set<std::string> names;
  for (const auto& c : codecs) {
    if (!kCodecKinds.count(c.kind))
      throw ValidationError("config: unknown codec kind '" + c.kind + "'");
    if ((c.kind == "rvq" || c.kind == "external") && c.path.empty())
      throw ValidationError("config: codec '" + c.name + "' needs a path");
    if (!c.name.empty() && !names.insert(c.name).second)
      throw ValidationError("config: duplicate codec name " + c.name);
  }
  bool needs_manifest = false;
  for (const auto& e : experiments) {
    if (!kExperiments.count(e))
      throw ValidationError("config: unknown experiment '" + e + "'");
    needs_manifest |= e != "probe";
  }
  if (needs_manifest && manifest.empty())
    throw ValidationError("config: recon/idsens/ppl need a manifest");
  if (rounds < 1) throw ValidationError("config: rounds must be >= 1");
  if (shift_ms < 0.0 || !std::isfinite(shift_ms))
    throw ValidationError("config: shift_ms must be >= 0");
  if (first_k < 1) throw ValidationError("config: first_k must be >= 1");
  if (ngram_order < 1)
    throw ValidationError("config: ngram_order must be >= 1");
  if (ngram_discount <= 0.0 || ngram_discount >= 1.0)
    throw ValidationError("config: ngram_discount must be in (0, 1)");
  if (formats.empty()) throw ValidationError("config: no report formats");
  std::set<std::string> probe_names;
  for (const auto& p : probes) {
    if (p.name.empty()) throw ValidationError("config: probe without a name");
    if (!probe_names.insert(p.name).second)
      throw ValidationError("config: duplicate probe name " + p.name);
    if (p.manifest.empty())
      throw ValidationError("config: probe " + p.name + " needs a manifest");
    if (!kProbeSources.count(p.source))
      throw ValidationError("config: probe " + p.name +
                            " has unknown source '" + p.source + "'");
    if (p.source == "frames" && p.frames_dir.empty())
      throw ValidationError("config: probe " + p.name +
                            " needs frames_dir for the frames source");
    if (p.kind != ProbeKind::kCtcAsr && p.n_outputs == 0)
      throw ValidationError("config: probe " + p.name +
                            " needs n_outputs");
  }
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::exception& ex) {
    throw ValidationError(path + ": " + ex.what());
  }
  RunConfig c;
  c.dir = fs::path(path).parent_path().string();
  try {
    for (const auto& cj : j.value("codecs", json::array())) {
      CodecRef ref;
      ref.name = cj.value("name", "");
      ref.kind = cj.at("kind").get<std::string>();
      ref.path = cj.value("path", "");
      ref.frame_len = cj.value("frame_len", 1024u);
      ref.seed = cj.value("seed", uint64_t{0});
      if (cj.contains("exclude_domains"))
        ref.exclude_domains =
            cj["exclude_domains"].get<std::vector<std::string>>();
      c.codecs.push_back(std::move(ref));
    }
    if (j.contains("experiments"))
      c.experiments = j["experiments"].get<std::vector<std::string>>();
    else
      c.experiments = {"recon", "idsens", "ppl", "probe"};
    c.manifest = j.value("manifest", "");
    c.out_dir = j.value("out_dir", "out");
    c.seed = j.value("seed", uint64_t{0});
    c.workers = j.value("workers", 0u);
    c.rounds = j.value("rounds", 10u);
    c.shift_ms = j.value("shift_ms", 2.0);
    c.first_k = j.value("first_k", 8u);
    c.ngram_order = j.value("ngram_order", 3u);
    c.ngram_discount = j.value("ngram_discount", 0.75);
    c.pooled_idsens = j.value("pooled_idsens", false);
    c.idsens_max_utts = j.value("idsens_max_utts", 0u);
    c.pesq_csv = j.value("pesq_csv", "");
    c.asr_gt = j.value("asr_gt", "");
    c.asr_rec = j.value("asr_rec", "");
    if (j.contains("formats")) {
      c.formats.clear();
      for (const auto& f : j["formats"])
        c.formats.push_back(report_format_from_string(f.get<std::string>()));
    }
    for (const auto& pj : j.value("probes", json::array())) {
      ProbeJob job;
      job.name = pj.at("name").get<std::string>();
      job.manifest = pj.at("manifest").get<std::string>();
      job.kind = probe_kind_from_string(pj.value("kind", "multiclass"));
      job.n_outputs = pj.value("n_outputs", 0u);
      job.source = pj.value("source", "one-hot");
      job.frames_dir = pj.value("frames_dir", "");
      job.training.kind = job.kind;
      job.training.n_outputs = job.n_outputs;
      job.training.epochs = pj.value("epochs", 100u);
      job.training.learning_rate = pj.value("learning_rate", 0.1);
      job.training.batch_size = pj.value("batch_size", 32u);
      job.training.seed = pj.value("seed", uint64_t{0});
      uint64_t budget = pj.value("compute_budget", uint64_t{0});
      job.training.compute_budget = budget == 0 ? UINT64_MAX : budget;
      job.ctc.epochs = pj.value("ctc_epochs", 30u);
      job.ctc.learning_rate = pj.value("ctc_learning_rate", 0.05);
      job.ctc.seed = pj.value("ctc_seed", uint64_t{0});
      uint64_t cbudget = pj.value("ctc_budget", uint64_t{0});
      job.ctc.compute_budget = cbudget == 0 ? UINT64_MAX : cbudget;
      c.probes.push_back(std::move(job));
    }
  } catch (const json::exception& ex) {
    throw ValidationError(path + ": " + ex.what());
  }
  return c;
}

std::string run_config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json codecs = json::array();
  for (const auto& ref : c.codecs) {
    nlohmann::ordered_json cj;
    cj["name"] = ref.name;
    cj["kind"] = ref.kind;
    if (!ref.path.empty()) cj["path"] = ref.path;
    if (ref.kind == "identity") cj["frame_len"] = ref.frame_len;
    if (ref.kind == "random") cj["seed"] = ref.seed;
    if (!ref.exclude_domains.empty())
      cj["exclude_domains"] = ref.exclude_domains;
    codecs.push_back(std::move(cj));
  }
  j["codecs"] = std::move(codecs);
  j["experiments"] = c.experiments;
  if (!c.manifest.empty()) j["manifest"] = c.manifest;
  j["out_dir"] = c.out_dir;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["rounds"] = c.rounds;
  j["shift_ms"] = c.shift_ms;
  j["first_k"] = c.first_k;
  j["ngram_order"] = c.ngram_order;
  j["ngram_discount"] = c.ngram_discount;
  j["pooled_idsens"] = c.pooled_idsens;
  if (c.idsens_max_utts) j["idsens_max_utts"] = c.idsens_max_utts;
  if (!c.pesq_csv.empty()) j["pesq_csv"] = c.pesq_csv;
  if (!c.asr_gt.empty()) j["asr_gt"] = c.asr_gt;
  if (!c.asr_rec.empty()) j["asr_rec"] = c.asr_rec;
  std::vector<std::string> fmts;
  for (ReportFormat f : c.formats) fmts.push_back(to_string(f));
  j["formats"] = fmts;
  nlohmann::ordered_json probes = json::array();
  for (const auto& p : c.probes) {
    nlohmann::ordered_json pj;
    pj["name"] = p.name;
    pj["manifest"] = p.manifest;
    pj["kind"] = to_string(p.kind);
    if (p.kind != ProbeKind::kCtcAsr) pj["n_outputs"] = p.n_outputs;
    pj["source"] = p.source;
    if (!p.frames_dir.empty()) pj["frames_dir"] = p.frames_dir;
    if (p.kind == ProbeKind::kCtcAsr) {
      pj["ctc_epochs"] = p.ctc.epochs;
      pj["ctc_learning_rate"] = p.ctc.learning_rate;
      pj["ctc_seed"] = p.ctc.seed;
    } else {
      pj["epochs"] = p.training.epochs;
      pj["learning_rate"] = p.training.learning_rate;
      pj["batch_size"] = p.training.batch_size;
      pj["seed"] = p.training.seed;
    }
    probes.push_back(std::move(pj));
  }
  j["probes"] = std::move(probes);
  return j.dump(2) + "\n";
}

TokenCache::TokenCache(std::string dir) : dir_(std::move(dir)) {}

TokenGrid TokenCache::get_or_encode(CodecAdapter& codec,
                                    const std::string& utt_id,
                                    const Waveform& w) {
  const std::string& name = codec.descriptor().name;
  uint64_t h = 0xcbf29ce484222325ull;
  h = fnv1a(name.data(), name.size(), h);
  h = fnv1a(utt_id.data(), utt_id.size(), h);
  h = fnv1a(&w.sample_rate, sizeof(w.sample_rate), h);
  h = fnv1a(w.samples.data(), w.samples.size() * sizeof(double), h);

  fs::path dir = fs::path(dir_) / sanitize(name);
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(h));
  fs::path file = dir / (sanitize(utt_id) + "_" + hex + ".tokens");
  if (fs::exists(file)) {
    ++hits_;
    return load_token_grid(file.string());
  }
  ++misses_;
  TokenGrid g = codec.encode_utterance(utt_id, w);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string());
  static std::atomic<uint64_t> tmp_counter{0};
  fs::path tmp = file;
  tmp += ".tmp" + std::to_string(tmp_counter.fetch_add(1));
  save_token_grid(g, tmp.string());
  fs::rename(tmp, file, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + ": " + ec.message());
  return g;
}

void run_recon(const RunConfig& cfg, const CodecRef& ref, CodecAdapter& codec,
               const Manifest& m, TokenCache* cache, MetricTable* table,
               std::vector<std::string>* notes) {
  if (!codec.can_decode()) {
    notes->push_back("recon skipped for " + ref.name +
                     ": codec cannot decode");
    return;
  }
  std::vector<const ManifestEntry*> entries = eval_entries(m, ref);
  if (entries.empty()) {
    notes->push_back("recon skipped for " + ref.name + ": no entries");
    return;
  }

  struct Row {
    std::string bucket;
    double stoi_v = 0.0, si_snr_v = 0.0, mcd_v = 0.0;
    double spk = 0.0;
    bool has_spk = false;
  };
  std::vector<Row> rows(entries.size());
  parallel_for(entries.size(), cfg.workers, [&](size_t i) {
    const ManifestEntry& e = *entries[i];
    try {
      Waveform ref_w = load_entry_audio(m, e);
      TokenGrid g = encode_entry(codec, cache, e.utt_id, ref_w);
      Waveform deg = codec.decode(g);
      if (deg.sample_rate != ref_w.sample_rate)
        deg = resample(deg, ref_w.sample_rate);
      size_t n = std::min(ref_w.samples.size(), deg.samples.size());
      ref_w.samples.resize(n);
      deg.samples.resize(n);
      Row& r = rows[i];
      r.bucket = domain_bucket(e);
      r.stoi_v = stoi(ref_w, deg);
      r.si_snr_v = si_snr(ref_w, deg);
      r.mcd_v = mcd(ref_w, deg);
      if (ref_w.duration_s() >= 1.0 && deg.duration_s() >= 1.0) {
        r.spk = spk_sim(ref_w, deg);
        r.has_spk = true;
      }
    } catch (...) {
      rethrow_with_context("recon " + ref.name + " utterance " + e.utt_id);
    }
  });

  std::map<std::string, std::map<std::string, BucketMean>> agg;
  for (const Row& r : rows) {
    agg[r.bucket]["stoi"].add(r.stoi_v);
    agg[r.bucket]["si_snr"].add(r.si_snr_v);
    agg[r.bucket]["mcd"].add(r.mcd_v);
    if (r.has_spk) agg[r.bucket]["spk_sim"].add(r.spk);
  }

  if (!cfg.pesq_csv.empty()) {
    auto pesq = read_pesq_csv(resolve_path(cfg.dir, cfg.pesq_csv));
    uint64_t missing = 0;
    for (const auto* e : entries) {
      auto it = pesq.find(e->utt_id);
      if (it == pesq.end())
        ++missing;
      else
        agg[domain_bucket(*e)]["pesq"].add(it->second);
    }
    if (missing)
      notes->push_back("pesq for " + ref.name + ": " +
                       std::to_string(missing) + " utterance(s) unscored");
  }

  // Hypothesis transcripts come from an outside recognizer; error rates
  // compare them against the manifest references.
  auto ingest_asr = [&](const std::string& path, const std::string& wname,
                        const std::string& cname) {
    if (path.empty()) return;
    auto hyp = read_transcripts(resolve_path(cfg.dir, path));
    uint64_t missing = 0;
    for (const auto* e : entries) {
      if (!e->transcript) continue;
      auto it = hyp.find(e->utt_id);
      if (it == hyp.end()) {
        ++missing;
        continue;
      }
      agg[domain_bucket(*e)][wname].add(wer(*e->transcript, it->second));
      agg[domain_bucket(*e)][cname].add(cer(*e->transcript, it->second));
    }
    if (missing)
      notes->push_back(wname + " for " + ref.name + ": " +
                       std::to_string(missing) + " utterance(s) missing");
  };
  ingest_asr(cfg.asr_gt, "wer_gt", "cer_gt");
  ingest_asr(cfg.asr_rec, "wer_rec", "cer_rec");

  const std::set<std::string> external = {"pesq", "wer_gt", "wer_rec",
                                          "cer_gt", "cer_rec"};
  for (const auto& [bucket, metrics] : agg)
    for (const auto& [mname, mean] : metrics)
      table->set(ref.name, "recon/" + bucket + "/" + mname, mean.mean(),
                 external.count(mname) ? Provenance::kExternalIngested
                                       : Provenance::kInternal);
}

void run_idsens(const RunConfig& cfg, const CodecRef& ref, CodecAdapter& codec,
                const Manifest& m, MetricTable* table, ReportInputs* report,
                std::vector<std::string>* notes) {
  if (!codec.supports_waveform_encode()) {
    notes->push_back("idsens skipped for " + ref.name +
                     ": codec cannot re-encode waveforms");
    return;
  }
  std::vector<const ManifestEntry*> entries = eval_entries(m, ref);
  if (cfg.idsens_max_utts && entries.size() > cfg.idsens_max_utts)
    entries.resize(cfg.idsens_max_utts);
  if (entries.empty()) {
    notes->push_back("idsens skipped for " + ref.name + ": no entries");
    return;
  }

  std::vector<std::vector<StabilityCurve>> rounds(entries.size());
  std::vector<std::vector<ShiftStability>> shifts(entries.size());
  parallel_for(entries.size(), cfg.workers, [&](size_t i) {
    const ManifestEntry& e = *entries[i];
    try {
      Waveform w = load_entry_audio(m, e);
      rounds[i] = multi_round(codec, w, cfg.rounds, e.utt_id);
      shifts[i] = time_shift_eval(codec, w, cfg.shift_ms, e.utt_id);
    } catch (...) {
      rethrow_with_context("idsens " + ref.name + " utterance " + e.utt_id);
    }
  });

  auto clip_k = [&](auto& curves) {
    if (curves.size() > cfg.first_k) curves.resize(cfg.first_k);
  };
  std::vector<StabilityCurve> all_rounds =
      aggregate_stability(rounds, cfg.pooled_idsens);
  std::vector<ShiftStability> all_shifts =
      aggregate_shift(shifts, cfg.pooled_idsens);
  clip_k(all_rounds);
  clip_k(all_shifts);
  report->round_curves[ref.name] = all_rounds;
  report->shift_bars[ref.name] = all_shifts;

  std::map<std::string, std::vector<size_t>> buckets;
  for (size_t i = 0; i < entries.size(); ++i)
    buckets[domain_bucket(*entries[i])].push_back(i);
  for (const auto& [bucket, idx] : buckets) {
    std::vector<std::vector<StabilityCurve>> br;
    std::vector<std::vector<ShiftStability>> bs;
    for (size_t i : idx) {
      br.push_back(rounds[i]);
      bs.push_back(shifts[i]);
    }
    std::vector<StabilityCurve> agg_r =
        aggregate_stability(br, cfg.pooled_idsens);
    std::vector<ShiftStability> agg_s = aggregate_shift(bs, cfg.pooled_idsens);
    clip_k(agg_r);
    clip_k(agg_s);
    if (!agg_r.empty() && !agg_r.front().ratios.empty()) {
      BucketMean final_ratio, slope;
      for (const auto& c : agg_r) {
        final_ratio.add(c.ratios.back());
        slope.add(c.slope);
      }
      table->set(ref.name, "idsens/" + bucket + "/mrc", final_ratio.mean());
      table->set(ref.name, "idsens/" + bucket + "/mrc_slope", slope.mean());
    } else {
      notes->push_back("idsens " + ref.name + "/" + bucket +
                       ": fewer than 2 rounds, no multi-round metric");
    }
    if (!agg_s.empty()) {
      BucketMean ratio;
      for (const auto& s : agg_s) ratio.add(s.ratio);
      table->set(ref.name, "idsens/" + bucket + "/os", ratio.mean());
    }
  }
}

void run_ppl(const RunConfig& cfg, const CodecRef& ref, CodecAdapter& codec,
             const Manifest& m, TokenCache* cache, MetricTable* table,
             std::vector<std::string>* notes) {
  TrainSet train = m.train_set();
  EvalSet val = m.valid_set();
  if (val.entries.empty()) {
    val = m.test_set();
    if (!val.entries.empty())
      notes->push_back("ppl for " + ref.name +
                       ": no valid split, using test split");
  }
  std::vector<const ManifestEntry*> train_e, val_e;
  for (const auto* e : train.entries)
    if (!excluded(ref, *e)) train_e.push_back(e);
  for (const auto* e : val.entries)
    if (!excluded(ref, *e)) val_e.push_back(e);
  if (train_e.empty() || val_e.empty()) {
    notes->push_back("ppl skipped for " + ref.name +
                     ": needs train and valid entries");
    return;
  }

  auto encode_all = [&](const std::vector<const ManifestEntry*>& list) {
    std::vector<TokenGrid> grids(list.size());
    parallel_for(list.size(), cfg.workers, [&](size_t i) {
      const ManifestEntry& e = *list[i];
      try {
        Waveform w;
        if (!e.audio.empty()) w = load_entry_audio(m, e);
        TokenGrid g = encode_entry(codec, cache, e.utt_id, w);
        uint32_t keep = std::min(cfg.first_k, g.n_codebooks);
        grids[i] = keep < g.n_codebooks ? truncate_codebooks(g, keep)
                                        : std::move(g);
      } catch (...) {
        rethrow_with_context("ppl " + ref.name + " utterance " + e.utt_id);
      }
    });
    return grids;
  };
  std::vector<TokenGrid> train_g = encode_all(train_e);
  std::vector<TokenGrid> val_g = encode_all(val_e);

  std::map<std::string, std::pair<std::vector<TokenGrid>,
                                  std::vector<TokenGrid>>> buckets;
  for (size_t i = 0; i < train_e.size(); ++i)
    buckets[domain_bucket(*train_e[i])].first.push_back(
        std::move(train_g[i]));
  for (size_t i = 0; i < val_e.size(); ++i)
    buckets[domain_bucket(*val_e[i])].second.push_back(std::move(val_g[i]));

  for (const auto& [bucket, grids] : buckets) {
    if (grids.first.empty() || grids.second.empty()) {
      notes->push_back("ppl " + ref.name + "/" + bucket +
                       ": missing train or valid entries");
      continue;
    }
    PerplexityRecord rec;
    try {
      rec = eval_grid_ppl(grids.first, grids.second, cfg.ngram_order,
                          cfg.ngram_discount, cfg.workers);
    } catch (...) {
      rethrow_with_context("ppl " + ref.name + "/" + bucket);
    }
    table->set(ref.name, "ppl/" + bucket + "/overall", rec.normalized_ppl);
    for (const auto& cb : rec.per_codebook)
      table->set(ref.name,
                 "ppl/" + bucket + "/cb" + std::to_string(cb.codebook_index + 1),
                 cb.ppl);
  }
}

void run_probe_job(const RunConfig& cfg, const CodecRef& ref,
                   CodecAdapter& codec, const ProbeJob& job, TokenCache* cache,
                   MetricTable* table, std::vector<std::string>* notes) {
  Manifest pm = load_manifest(resolve_path(cfg.dir, job.manifest));
  pm.validate();
  TrainSet train = pm.train_set();
  EvalSet eval = pm.test_set();
  if (eval.entries.empty()) eval = pm.valid_set();
  if (train.entries.empty() || eval.entries.empty())
    throw ValidationError("probe " + job.name +
                          ": needs train and test (or valid) entries");
  std::string bucket = domain_bucket(pm.entries.front());
  std::string stem = "probe/" + bucket + "/" + job.name + "_";

  // Feature extraction happens once over the union; splits index into it.
  std::vector<const ManifestEntry*> all;
  all.insert(all.end(), train.entries.begin(), train.entries.end());
  all.insert(all.end(), eval.entries.begin(), eval.entries.end());

  RvqModel rvq_model;
  if (job.source == "rvq-sum") {
    if (ref.kind != "rvq")
      throw ValidationError("probe " + job.name +
                            ": rvq-sum source needs an rvq codec");
    rvq_model = load_rvq(resolve_path(cfg.dir, ref.path));
  }

  std::vector<TokenGrid> grids(all.size());
  std::vector<std::vector<double>> feats(all.size());
  bool need_grids = job.source != "frames";
  parallel_for(all.size(), cfg.workers, [&](size_t i) {
    const ManifestEntry& e = *all[i];
    try {
      if (need_grids) {
        Waveform w;
        if (!e.audio.empty()) w = load_entry_audio(pm, e);
        TokenGrid g = encode_entry(codec, cache, e.utt_id, w);
        uint32_t keep = std::min(cfg.first_k, g.n_codebooks);
        grids[i] = keep < g.n_codebooks ? truncate_codebooks(g, keep)
                                        : std::move(g);
      }
      if (job.kind == ProbeKind::kCtcAsr) return;
      if (job.source == "one-hot") {
        feats[i] = pooled_one_hot(grids[i]);
      } else if (job.source == "rvq-sum") {
        feats[i] = pool_embeddings(rvq_frame_embeddings(rvq_model, grids[i]));
      } else {
        std::string p = resolve_path(
            fs::path(resolve_path(cfg.dir, job.frames_dir)).string(),
            e.utt_id + ".acfe");
        feats[i] = pool_embeddings(read_frame_embeddings(p));
      }
    } catch (...) {
      rethrow_with_context("probe " + job.name + " utterance " + e.utt_id);
    }
  });

  size_t n_train = train.entries.size();
  if (job.kind == ProbeKind::kCtcAsr) {
    auto texts_of = [&](size_t begin, size_t count) {
      std::vector<std::string> texts(count);
      for (size_t i = 0; i < count; ++i) {
        const ManifestEntry& e = *all[begin + i];
        if (!e.transcript)
          throw ValidationError("probe " + job.name + ": " + e.utt_id +
                                " has no transcript");
        texts[i] = *e.transcript;
      }
      return texts;
    };
    std::vector<TokenGrid> train_g(grids.begin(),
                                   grids.begin() + static_cast<long>(n_train));
    std::vector<TokenGrid> eval_g(grids.begin() + static_cast<long>(n_train),
                                  grids.end());
    CtcTrainStats stats;
    CtcProbe probe =
        train_ctc_probe(train_g, texts_of(0, n_train), job.ctc, &stats);
    if (stats.infeasible_skipped)
      notes->push_back("probe " + job.name + ": " +
                       std::to_string(stats.infeasible_skipped) +
                       " infeasible training utterance(s) skipped");
    CtcEval ev =
        eval_ctc_probe(probe, eval_g, texts_of(n_train, eval_g.size()));
    table->set(ref.name, stem + "wer", ev.wer);
    table->set(ref.name, stem + "cer", ev.cer);
    return;
  }

  auto dataset_of = [&](size_t begin, size_t count) {
    ProbeDataset ds;
    for (size_t i = 0; i < count; ++i) {
      const ManifestEntry& e = *all[begin + i];
      ds.features.push_back(feats[begin + i]);
      switch (job.kind) {
        case ProbeKind::kMulticlass:
          if (!e.label)
            throw ValidationError("probe " + job.name + ": " + e.utt_id +
                                  " has no label");
          ds.class_labels.push_back(*e.label);
          break;
        case ProbeKind::kMultilabel:
          if (!e.labels)
            throw ValidationError("probe " + job.name + ": " + e.utt_id +
                                  " has no labels");
          ds.multi_labels.push_back(*e.labels);
          break;
        case ProbeKind::kRegression:
          if (!e.targets)
            throw ValidationError("probe " + job.name + ": " + e.utt_id +
                                  " has no targets");
          ds.targets.push_back(*e.targets);
          break;
        case ProbeKind::kCtcAsr: break;
      }
    }
    return ds;
  };
  LinearProbe probe = train_linear_probe(dataset_of(0, n_train), job.training);
  MetricRecord rec =
      eval_classifier(probe, dataset_of(n_train, all.size() - n_train));
  for (const auto& [mname, value] : rec.values)
    table->set(ref.name, stem + mname, value,
               job.source == "frames" ? Provenance::kExternalIngested
                                      : Provenance::kInternal);
  for (const auto& note : rec.notes)
    notes->push_back("probe " + job.name + ": " + note);
}

RunResult run(const RunConfig& cfg) {
  cfg.validate();
  bool needs_manifest = false;
  for (const auto& e : cfg.experiments) needs_manifest |= e != "probe";

  Manifest m;
  if (needs_manifest) {
    m = load_manifest(resolve_path(cfg.dir, cfg.manifest));
    m.validate();
  }
  std::string out_dir = resolve_path(cfg.dir, cfg.out_dir);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
  TokenCache cache((fs::path(out_dir) / "cache").string());

  RunResult result;
  std::vector<std::string>& notes = result.report.notes;
  for (const CodecRef& raw_ref : cfg.codecs) {
    std::unique_ptr<CodecAdapter> codec = open_codec(raw_ref, cfg.dir);
    CodecRef ref = raw_ref;
    if (ref.name.empty()) ref.name = codec->descriptor().name;
    // Identity grids resolve through adapter state, so they skip the disk
    // cache; a cache hit in a fresh process could not be decoded.
    TokenCache* cache_ptr = ref.kind == "identity" ? nullptr : &cache;
    for (const std::string& exp : cfg.experiments) {
      if (exp == "recon") {
        run_recon(cfg, ref, *codec, m, cache_ptr, &result.report.metrics,
                  &notes);
      } else if (exp == "idsens") {
        run_idsens(cfg, ref, *codec, m, &result.report.metrics, &result.report,
                   &notes);
      } else if (exp == "ppl") {
        run_ppl(cfg, ref, *codec, m, cache_ptr, &result.report.metrics,
                &notes);
      } else if (exp == "probe") {
        for (const ProbeJob& job : cfg.probes)
          run_probe_job(cfg, ref, *codec, job, cache_ptr,
                        &result.report.metrics, &notes);
      }
    }
  }

  if (result.report.metrics.rows.size() >= 2) {
    try {
      result.report.correlations =
          correlate_against_ppl(result.report.metrics);
    } catch (const ValidationError& ex) {
      notes.push_back(std::string("correlations skipped: ") + ex.what());
    }
  } else {
    notes.push_back("correlations skipped: fewer than 2 codecs");
  }

  fs::path echo = fs::path(out_dir) / "run_config.json";
  {
    std::ofstream out(echo, std::ios::binary);
    if (!out) throw IoError("cannot write " + echo.string());
    out << run_config_to_json(cfg);
  }
  result.files = emit_report(result.report, out_dir, cfg.formats);
  result.files.push_back(echo.string());
  std::sort(result.files.begin(), result.files.end());
  result.cache_hits = cache.hits();
  result.cache_misses = cache.misses();
  return result;
}

}  // namespace acb
