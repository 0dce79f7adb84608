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

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "acb/analysis.hpp"
#include "acb/error.hpp"
#include "acb/harness.hpp"
#include "acb/manifest.hpp"
#include "acb/parallel.hpp"
#include "acb/rvq.hpp"
#include "acb/synthetic.hpp"
#include "acb/token_grid.hpp"
#include "acb/wav_io.hpp"

namespace fs = std::filesystem;
using namespace acb;

namespace {

// --codec spec: kind[:argument], e.g. rvq:model.acbm, external:dir,
// identity:1024, random:7.
CodecRef parse_codec_spec(const std::string& spec) {
  CodecRef ref;
  size_t colon = spec.find(':');
  ref.kind = spec.substr(0, colon == std::string::npos ? spec.size() : colon);
  std::string arg =
      colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (ref.kind == "rvq" || ref.kind == "external") {
    if (arg.empty())
      throw ValidationError("--codec " + ref.kind + " needs a path, e.g. " +
                            ref.kind + ":PATH");
    ref.path = arg;
  } else if (ref.kind == "identity") {
    if (!arg.empty()) ref.frame_len = static_cast<uint32_t>(std::stoul(arg));
  } else if (ref.kind == "random") {
    if (!arg.empty()) ref.seed = std::stoull(arg);
  } else {
    throw ValidationError("unknown codec kind '" + ref.kind +
                          "' (rvq, external, identity, random)");
  }
  return ref;
}

struct CommonFlags {
  std::string config;
  std::string manifest;
  std::vector<std::string> codecs;
  std::string out = "out";
  uint64_t seed = 0;
  uint32_t workers = 0;
  uint32_t rounds = 10;
  double shift_ms = 2.0;
  uint32_t first_k = 8;
  std::vector<std::string> formats;
};

void add_common(CLI::App* cmd, CommonFlags* f, bool with_protocol) {
  cmd->add_option("--config", f->config, "JSON run configuration");
  cmd->add_option("--manifest", f->manifest, "dataset manifest (JSON Lines)");
  cmd->add_option("--codec", f->codecs,
                  "codec spec kind[:arg], repeatable (rvq:PATH, "
                  "external:DIR, identity[:FRAME], random[:SEED])");
  cmd->add_option("--out", f->out, "output directory");
  cmd->add_option("--seed", f->seed, "run seed, recorded in outputs");
  cmd->add_option("--workers", f->workers, "worker threads (0 = all cores)");
  if (with_protocol) {
    cmd->add_option("--rounds", f->rounds, "re-encoding rounds");
    cmd->add_option("--shift-ms", f->shift_ms, "time shift in milliseconds");
    cmd->add_option("--first-k", f->first_k, "codebooks entering token evals");
  }
  cmd->add_option("--format", f->formats,
                  "report format, repeatable (csv, json, markdown, svg)");
}

// Builds the effective config: --config file first, then explicit flags
// override it.
RunConfig config_from_flags(const CLI::App* cmd, const CommonFlags& f,
                            const std::string& experiment) {
  RunConfig cfg;
  if (!f.config.empty()) {
    cfg = load_run_config(f.config);
  } else {
    cfg.dir = "";
    cfg.experiments.clear();
  }
  if (!experiment.empty()) cfg.experiments = {experiment};
  auto seen = [&](const std::string& name) {
    return cmd->count(name) > 0;
  };
  if (seen("--manifest")) cfg.manifest = f.manifest;
  if (seen("--codec")) {
    cfg.codecs.clear();
    for (const auto& s : f.codecs) cfg.codecs.push_back(parse_codec_spec(s));
  }
  if (seen("--out")) cfg.out_dir = f.out;
  if (seen("--seed")) cfg.seed = f.seed;
  if (seen("--workers")) cfg.workers = f.workers;
  if (cmd->get_option_no_throw("--rounds") && seen("--rounds"))
    cfg.rounds = f.rounds;
  if (cmd->get_option_no_throw("--shift-ms") && seen("--shift-ms"))
    cfg.shift_ms = f.shift_ms;
  if (cmd->get_option_no_throw("--first-k") && seen("--first-k"))
    cfg.first_k = f.first_k;
  if (seen("--format")) {
    cfg.formats.clear();
    for (const auto& s : f.formats)
      cfg.formats.push_back(report_format_from_string(s));
  }
  return cfg;
}

int run_and_print(const RunConfig& cfg) {
  RunResult result = run(cfg);
  for (const auto& p : result.files) std::cout << p << "\n";
  std::cout << "cache: " << result.cache_hits << " hit(s), "
            << result.cache_misses << " miss(es)\n";
  return 0;
}

int cmd_train_codec(const std::string& manifest_path, const std::string& out,
                    uint32_t stages, uint32_t codebook_size,
                    uint32_t frame_len, uint32_t sample_rate, uint64_t seed,
                    uint32_t workers) {
  Manifest m = load_manifest(manifest_path);
  m.validate();
  TrainSet train = m.train_set();
  if (train.entries.empty())
    throw ValidationError("train-codec: manifest has no train split");
  std::vector<Waveform> corpus(train.entries.size());
  parallel_for(train.entries.size(), workers, [&](size_t i) {
    corpus[i] = load_entry_audio(m, *train.entries[i]);
  });
  std::vector<uint32_t> sizes(stages, codebook_size);
  RvqModel model = train_rvq(corpus, stages, sizes, seed, frame_len,
                             frame_len / 2, sample_rate, workers);
  if (fs::path(out).has_parent_path())
    fs::create_directories(fs::path(out).parent_path());
  save_rvq(model, out);
  std::cout << out << "\n";
  return 0;
}

int cmd_encode(const CommonFlags& f) {
  if (f.codecs.size() != 1)
    throw ValidationError("encode: exactly one --codec");
  if (f.manifest.empty()) throw ValidationError("encode: --manifest required");
  CodecRef ref = parse_codec_spec(f.codecs[0]);
  std::unique_ptr<CodecAdapter> codec = open_codec(ref, "");
  Manifest m = load_manifest(f.manifest);
  m.validate();
  fs::create_directories(f.out);
  std::vector<const ManifestEntry*> entries = m.all();
  parallel_for(entries.size(), f.workers, [&](size_t i) {
    const ManifestEntry& e = *entries[i];
    Waveform w;
    if (!e.audio.empty()) w = load_entry_audio(m, e);
    TokenGrid g = codec->encode_utterance(e.utt_id, w);
    save_token_grid(g, (fs::path(f.out) / (e.utt_id + ".tokens")).string());
  });
  std::cout << entries.size() << " grid(s) -> " << f.out << "\n";
  return 0;
}

int cmd_decode(const CommonFlags& f, const std::vector<std::string>& files) {
  if (f.codecs.size() != 1)
    throw ValidationError("decode: exactly one --codec");
  CodecRef ref = parse_codec_spec(f.codecs[0]);
  std::unique_ptr<CodecAdapter> codec = open_codec(ref, "");
  if (!codec->can_decode())
    throw ValidationError("decode: this codec cannot decode");
  fs::create_directories(f.out);
  for (const auto& path : files) {
    TokenGrid g = load_token_grid(path);
    Waveform w = codec->decode(g);
    fs::path out = fs::path(f.out) / (fs::path(path).stem().string() + ".wav");
    write_wav(w, out.string());
    std::cout << out.string() << "\n";
  }
  return 0;
}

int cmd_correlate(const std::string& in, const std::string& out,
                  const std::vector<std::string>& formats) {
  MetricTable table = load_metric_table_csv(in);
  ReportInputs inputs;
  inputs.metrics = table;
  inputs.correlations = correlate_against_ppl(table);
  std::vector<ReportFormat> fmts = {ReportFormat::kCsv};
  if (!formats.empty()) {
    fmts.clear();
    for (const auto& s : formats) fmts.push_back(report_format_from_string(s));
  }
  for (const auto& p : emit_report(inputs, out, fmts))
    std::cout << p << "\n";
  for (const auto& row : inputs.correlations.rows) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", row.r);
    std::cout << row.metric << " r=" << buf << " n=" << row.n << "\n";
  }
  for (const auto& note : inputs.correlations.notes)
    std::cout << "note: " << note << "\n";
  return 0;
}

int cmd_report(const CommonFlags& f, const std::string& in) {
  if (!f.config.empty()) {
    RunConfig cfg = load_run_config(f.config);
    // Flags that were left at defaults keep the config's values.
    if (!f.out.empty() && f.out != "out") cfg.out_dir = f.out;
    if (!f.formats.empty()) {
      cfg.formats.clear();
      for (const auto& s : f.formats)
        cfg.formats.push_back(report_format_from_string(s));
    }
    return run_and_print(cfg);
  }
  if (in.empty())
    throw ValidationError("report: need --config or --in metrics.csv");
  MetricTable table = load_metric_table_csv(in);
  ReportInputs inputs;
  inputs.metrics = table;
  try {
    inputs.correlations = correlate_against_ppl(table);
  } catch (const ValidationError& ex) {
    inputs.notes.push_back(std::string("correlations skipped: ") + ex.what());
  }
  std::vector<ReportFormat> fmts = {ReportFormat::kCsv, ReportFormat::kJson,
                                    ReportFormat::kMarkdown};
  if (!f.formats.empty()) {
    fmts.clear();
    for (const auto& s : f.formats)
      fmts.push_back(report_format_from_string(s));
  }
  for (const auto& p : emit_report(inputs, f.out, fmts))
    std::cout << p << "\n";
  return 0;
}

int cmd_synth_data(const std::string& kind, uint32_t size, uint64_t seed,
                   const std::string& out) {
  SyntheticResult r = make_synthetic_dataset(synthetic_kind_from_string(kind),
                                             size, seed, out);
  std::cout << r.manifest_path << "\n";
  std::cout << r.files.size() << " file(s) -> " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluation harness for discrete audio tokenizers"};
  app.require_subcommand(1);

  // train-codec
  auto* train = app.add_subcommand(
      "train-codec", "Train the reference staged-quantizer codec");
  std::string train_manifest, train_out = "codec.acbm";
  uint32_t train_stages = 8, train_k = 1024, train_frame = 1024,
           train_rate = 24000, train_workers = 0;
  uint64_t train_seed = 0;
  train->add_option("--manifest", train_manifest)->required();
  train->add_option("--out", train_out, "model file to write");
  train->add_option("--stages", train_stages, "quantizer stages");
  train->add_option("--codebook-size", train_k, "entries per codebook");
  train->add_option("--frame-len", train_frame, "frame length (hop is half)");
  train->add_option("--sample-rate", train_rate, "training sample rate");
  train->add_option("--seed", train_seed);
  train->add_option("--workers", train_workers);

  CommonFlags enc_f;
  auto* enc = app.add_subcommand("encode", "Write token grids for a corpus");
  add_common(enc, &enc_f, false);

  CommonFlags dec_f;
  std::vector<std::string> dec_files;
  auto* dec = app.add_subcommand("decode", "Reconstruct audio from grids");
  add_common(dec, &dec_f, false);
  dec->add_option("files", dec_files, "token grid files")->required();

  CommonFlags recon_f, idsens_f, ppl_f, probe_f;
  auto* recon = app.add_subcommand(
      "eval-recon", "Reconstruction fidelity over a corpus");
  add_common(recon, &recon_f, false);
  auto* idsens = app.add_subcommand(
      "eval-idsens", "Token stability under re-encoding and time shifts");
  add_common(idsens, &idsens_f, true);
  auto* ppl = app.add_subcommand(
      "eval-ppl", "Normalized token perplexity per codebook");
  add_common(ppl, &ppl_f, true);
  auto* probe = app.add_subcommand(
      "eval-probe", "Downstream probes over frozen token features");
  add_common(probe, &probe_f, true);

  std::string corr_in, corr_out = "out";
  std::vector<std::string> corr_formats;
  auto* corr = app.add_subcommand(
      "correlate", "Cross-metric correlation against perplexity");
  corr->add_option("--in", corr_in, "metrics.csv from a previous run")
      ->required();
  corr->add_option("--out", corr_out, "output directory");
  corr->add_option("--format", corr_formats, "report format, repeatable");

  CommonFlags report_f;
  std::string report_in;
  auto* report = app.add_subcommand(
      "report", "Run configured experiments or re-emit a saved table");
  add_common(report, &report_f, true);
  report->add_option("--in", report_in, "metrics.csv to re-emit");

  std::string synth_kind;
  uint32_t synth_size = 150;
  uint64_t synth_seed = 0;
  std::string synth_out = "synth";
  auto* synth = app.add_subcommand(
      "synth-data", "Generate a seeded synthetic dataset");
  synth->add_option("--kind", synth_kind,
                    "tones | markov-speechlike | ctc-mapped")
      ->required();
  synth->add_option("--size", synth_size, "number of utterances");
  synth->add_option("--seed", synth_seed);
  synth->add_option("--out", synth_out, "dataset directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (train->parsed())
      return cmd_train_codec(train_manifest, train_out, train_stages, train_k,
                             train_frame, train_rate, train_seed,
                             train_workers);
    if (enc->parsed()) return cmd_encode(enc_f);
    if (dec->parsed()) return cmd_decode(dec_f, dec_files);
    if (recon->parsed())
      return run_and_print(config_from_flags(recon, recon_f, "recon"));
    if (idsens->parsed())
      return run_and_print(config_from_flags(idsens, idsens_f, "idsens"));
    if (ppl->parsed())
      return run_and_print(config_from_flags(ppl, ppl_f, "ppl"));
    if (probe->parsed()) {
      if (probe_f.config.empty())
        throw ValidationError(
            "eval-probe: needs --config with a probes section");
      return run_and_print(config_from_flags(probe, probe_f, "probe"));
    }
    if (corr->parsed()) return cmd_correlate(corr_in, corr_out, corr_formats);
    if (report->parsed()) return cmd_report(report_f, report_in);
    if (synth->parsed())
      return cmd_synth_data(synth_kind, synth_size, synth_seed, synth_out);
    throw ValidationError("no subcommand");
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
