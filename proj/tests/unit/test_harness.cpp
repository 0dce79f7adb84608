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
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "acb/error.hpp"
#include "acb/harness.hpp"
#include "acb/rvq.hpp"
#include "acb/synthetic.hpp"
#include "acb/wav_io.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace acb;
namespace fs = std::filesystem;

namespace {

RunConfig minimal_config() {
  RunConfig c;
  CodecRef ref;
  ref.name = "id";
  ref.kind = "identity";
  c.codecs.push_back(ref);
  c.experiments = {"recon"};
  c.manifest = "manifest.jsonl";
  return c;
}

std::string write_file(const std::string& path, const std::string& body) {
  std::ofstream(path, std::ios::binary) << body;
  return path;
}

}  // namespace

TEST_CASE("run config validation walks every constraint") {
  minimal_config().validate();

  auto expect_throw = [](RunConfig c, const char* needle) {
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains(needle),
                         ValidationError);
  };
  {
    RunConfig c = minimal_config();
    c.codecs.clear();
    expect_throw(c, "no codecs");
  }
  {
    RunConfig c = minimal_config();
    c.codecs[0].kind = "mp3";
    expect_throw(c, "unknown codec kind");
  }
  {
    RunConfig c = minimal_config();
    c.codecs[0].kind = "rvq";
    c.codecs[0].path = "";
    expect_throw(c, "needs a path");
  }
  {
    RunConfig c = minimal_config();
    c.codecs.push_back(c.codecs[0]);
    expect_throw(c, "duplicate codec name");
  }
  {
    RunConfig c = minimal_config();
    c.experiments = {"timbre"};
    expect_throw(c, "unknown experiment");
  }
  {
    RunConfig c = minimal_config();
    c.manifest = "";
    expect_throw(c, "need a manifest");
  }
  {
    // A probe-only run needs no main manifest.
    RunConfig c = minimal_config();
    c.manifest = "";
    c.experiments = {"probe"};
    c.validate();
  }
  {
    RunConfig c = minimal_config();
    c.rounds = 0;
    expect_throw(c, "rounds");
  }
  {
    RunConfig c = minimal_config();
    c.shift_ms = -1.0;
    expect_throw(c, "shift_ms");
  }
  {
    RunConfig c = minimal_config();
    c.first_k = 0;
    expect_throw(c, "first_k");
  }
  {
    RunConfig c = minimal_config();
    c.ngram_order = 0;
    expect_throw(c, "ngram_order");
  }
  {
    RunConfig c = minimal_config();
    c.ngram_discount = 1.0;
    expect_throw(c, "ngram_discount");
  }
  {
    RunConfig c = minimal_config();
    c.formats.clear();
    expect_throw(c, "no report formats");
  }
  {
    RunConfig c = minimal_config();
    ProbeJob p;
    p.manifest = "m.jsonl";
    p.n_outputs = 2;
    c.probes.push_back(p);
    expect_throw(c, "probe without a name");
    c.probes[0].name = "p";
    c.probes[0].manifest = "";
    expect_throw(c, "needs a manifest");
    c.probes[0].manifest = "m.jsonl";
    c.probes[0].source = "spectrogram";
    expect_throw(c, "unknown source");
    c.probes[0].source = "frames";
    expect_throw(c, "needs frames_dir");
    c.probes[0].source = "one-hot";
    c.probes[0].n_outputs = 0;
    expect_throw(c, "needs n_outputs");
    c.probes.push_back(c.probes[0]);
    c.probes[0].n_outputs = 2;
    c.probes[1].n_outputs = 2;
    expect_throw(c, "duplicate probe name");
  }
}

TEST_CASE("config files load with defaults and echo back") {
  acbtest::TempDir tmp;
  std::string path = write_file(tmp.str("run.json"), R"({
    "codecs": [
      {"name": "noise", "kind": "random", "seed": 9},
      {"kind": "identity", "frame_len": 128,
       "exclude_domains": ["music"]}
    ],
    "manifest": "data/manifest.jsonl",
    "probes": [
      {"name": "cls", "manifest": "data/m.jsonl", "n_outputs": 3,
       "epochs": 60, "learning_rate": 0.2},
      {"name": "asr", "manifest": "data/m.jsonl", "kind": "ctc_asr"}
    ]
  })");

  RunConfig c = load_run_config(path);
  CHECK(c.dir == tmp.path().string());
  REQUIRE(c.codecs.size() == 2);
  CHECK(c.codecs[0].kind == "random");
  CHECK(c.codecs[0].seed == 9);
  CHECK(c.codecs[1].frame_len == 128);
  CHECK(c.codecs[1].exclude_domains == std::vector<std::string>{"music"});
  // Unset fields fall back to the documented defaults.
  CHECK(c.experiments ==
        std::vector<std::string>{"recon", "idsens", "ppl", "probe"});
  CHECK(c.out_dir == "out");
  CHECK(c.rounds == 10);
  CHECK(c.shift_ms == 2.0);
  CHECK(c.first_k == 8);
  CHECK(c.ngram_order == 3);
  CHECK(c.ngram_discount == 0.75);
  CHECK_FALSE(c.pooled_idsens);
  CHECK(c.formats.size() == 4);
  REQUIRE(c.probes.size() == 2);
  CHECK(c.probes[0].training.epochs == 60);
  CHECK(c.probes[0].training.learning_rate == 0.2);
  CHECK(c.probes[0].training.batch_size == 32);
  CHECK(c.probes[0].training.compute_budget == UINT64_MAX);
  CHECK(c.probes[1].kind == ProbeKind::kCtcAsr);
  CHECK(c.probes[1].ctc.epochs == 30);
  c.validate();

  // The echo reloads to the same configuration.
  std::string echo = write_file(tmp.str("echo.json"), run_config_to_json(c));
  RunConfig back = load_run_config(echo);
  CHECK(run_config_to_json(back) == run_config_to_json(c));

  CHECK_THROWS_AS(load_run_config(tmp.str("absent.json")), IoError);
  CHECK_THROWS_WITH_AS(
      load_run_config(write_file(tmp.str("bad.json"), "{nope")),
      doctest::Contains("bad.json"), ValidationError);
  CHECK_THROWS_AS(load_run_config(write_file(
                      tmp.str("nokind.json"), R"({"codecs":[{"name":"x"}]})")),
                  ValidationError);
}

TEST_CASE("open_codec builds every kind and resolves paths") {
  acbtest::TempDir tmp;

  CodecRef ident;
  ident.kind = "identity";
  ident.frame_len = 320;
  auto ic = open_codec(ident, tmp.path().string());
  CHECK(ic->descriptor().name == "identity");
  CHECK(ic->descriptor().codebook_sizes == std::vector<uint32_t>{1024});

  CodecRef rnd;
  rnd.kind = "random";
  rnd.seed = 5;
  CHECK(open_codec(rnd, "")->descriptor().n_codebooks == 8);

  std::vector<Waveform> corpus;
  for (int i = 0; i < 4; ++i)
    corpus.push_back(acbtest::white_noise(0.3, 16000, 100 + i, 0.3));
  RvqModel model = train_rvq(corpus, 2, {4, 4}, 1, 64, 32, 16000, 1);
  save_rvq(model, tmp.str("model.rvq"));
  CodecRef rvq;
  rvq.kind = "rvq";
  rvq.path = "model.rvq";  // relative to base_dir
  auto rc = open_codec(rvq, tmp.path().string());
  CHECK(rc->descriptor().name == "ref-rvq");
  rvq.name = "mine";
  CHECK(open_codec(rvq, tmp.path().string())->descriptor().name == "mine");
  rvq.path = "";
  CHECK_THROWS_AS(open_codec(rvq, tmp.path().string()), ValidationError);

  CodecRef bad;
  bad.kind = "opus";
  CHECK_THROWS_WITH_AS(open_codec(bad, ""), doctest::Contains("opus"),
                       ValidationError);
}

TEST_CASE("token cache hits on identical content, also across instances") {
  acbtest::TempDir tmp;
  auto codec = random_codec(21);
  Waveform w = acbtest::white_noise(0.4, 16000, 3, 0.2);

  TokenCache cache(tmp.str("cache"));
  TokenGrid first = cache.get_or_encode(*codec, "utt1", w);
  CHECK(cache.misses() == 1);
  CHECK(cache.hits() == 0);
  TokenGrid again = cache.get_or_encode(*codec, "utt1", w);
  CHECK(cache.hits() == 1);
  CHECK(again.tokens == first.tokens);

  // Same directory, fresh instance: the grid comes back from disk.
  TokenCache fresh(tmp.str("cache"));
  TokenGrid disk = fresh.get_or_encode(*codec, "utt1", w);
  CHECK(fresh.hits() == 1);
  CHECK(fresh.misses() == 0);
  CHECK(disk.tokens == first.tokens);

  // New content or a new id is a distinct key.
  Waveform w2 = w;
  w2.samples[0] += 0.25f;
  fresh.get_or_encode(*codec, "utt1", w2);
  fresh.get_or_encode(*codec, "utt2", w);
  CHECK(fresh.misses() == 2);
}

TEST_CASE("end-to-end run over the identity codec") {
  acbtest::TempDir tmp;
  make_synthetic_dataset(SyntheticKind::kTones, 9, 3, tmp.str("data"));
  // Two of the three test utterances carry outside intrusiveness scores.
  write_file(tmp.str("data/pesq.csv"),
             "utt_id,pesq\ntone_00006,3.5\ntone_00007,2.5\n");

  RunConfig cfg;
  cfg.dir = tmp.str("data");
  CodecRef ref;
  ref.name = "ident";
  ref.kind = "identity";
  ref.frame_len = 64;
  cfg.codecs.push_back(ref);
  cfg.experiments = {"recon", "idsens", "ppl"};
  cfg.manifest = "manifest.jsonl";
  cfg.out_dir = "out_a";
  cfg.workers = 1;
  cfg.rounds = 4;
  cfg.pesq_csv = "pesq.csv";
  cfg.formats = {ReportFormat::kCsv, ReportFormat::kJson};

  RunResult res = run(cfg);

  // Identity decode reproduces the encoded samples bit for bit.
  const MetricTable& t = res.report.metrics;
  CHECK(t.get("ident", "recon/sound/stoi") == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(t.get("ident", "recon/sound/si_snr") == 100.0);
  CHECK(t.get("ident", "recon/sound/mcd") == doctest::Approx(0.0));
  CHECK(t.get("ident", "recon/sound/pesq") == doctest::Approx(3.0));
  CHECK(t.rows.at("ident").at("recon/sound/pesq").provenance ==
        Provenance::kExternalIngested);
  // Half-second clips are too short for the speaker similarity window.
  CHECK_FALSE(t.has("ident", "recon/sound/spk_sim"));

  CHECK(t.get("ident", "idsens/sound/mrc") == 1.0);
  CHECK(t.get("ident", "idsens/sound/mrc_slope") == 0.0);
  // A 2 ms shift rewrites every 64-sample frame, so agreement collapses.
  CHECK(t.get("ident", "idsens/sound/os") < 0.5);
  CHECK(t.has("ident", "ppl/sound/overall"));
  CHECK(t.has("ident", "ppl/sound/cb1"));

  bool unscored = false, no_valid = false, single = false;
  for (const auto& n : res.report.notes) {
    unscored |= n.find("1 utterance(s) unscored") != std::string::npos;
    no_valid |= n.find("using test split") != std::string::npos;
    single |= n.find("fewer than 2 codecs") != std::string::npos;
  }
  CHECK(unscored);
  CHECK(no_valid);
  CHECK(single);

  // Identity grids stay out of the disk cache by design.
  CHECK(res.cache_hits == 0);
  CHECK(res.cache_misses == 0);

  REQUIRE(!res.files.empty());
  CHECK(std::is_sorted(res.files.begin(), res.files.end()));
  for (const auto& f : res.files) CHECK(fs::exists(f));
  CHECK(fs::exists(tmp.str("data/out_a/metrics.csv")));
  CHECK(fs::exists(tmp.str("data/out_a/run_config.json")));

  // The same configuration reproduces the same report bytes.
  RunConfig cfg2 = cfg;
  cfg2.out_dir = "out_b";
  run(cfg2);
  CHECK(acbtest::slurp(tmp.str("data/out_a/metrics.csv")) ==
        acbtest::slurp(tmp.str("data/out_b/metrics.csv")));
  CHECK(acbtest::slurp(tmp.str("data/out_a/report.json")) ==
        acbtest::slurp(tmp.str("data/out_b/report.json")));
}

TEST_CASE("failures carry the codec and utterance in the message") {
  acbtest::TempDir tmp;
  make_synthetic_dataset(SyntheticKind::kTones, 3, 5, tmp.str("data"));
  // Shrink one clip below the intelligibility minimum.
  Waveform tiny;
  tiny.sample_rate = 16000;
  tiny.samples.assign(800, 0.1f);
  write_wav(tiny, tmp.str("data/wav/tone_00002.wav"));

  RunConfig cfg;
  cfg.dir = tmp.str("data");
  CodecRef ref;
  ref.name = "ident";
  ref.kind = "identity";
  ref.frame_len = 64;
  cfg.codecs.push_back(ref);
  cfg.experiments = {"recon"};
  cfg.manifest = "manifest.jsonl";
  cfg.workers = 1;
  CHECK_THROWS_WITH_AS(run(cfg),
                       doctest::Contains("recon ident utterance tone_00002"),
                       ValidationError);
}

TEST_CASE("a two-codec run yields cross-metric correlations") {
  acbtest::TempDir tmp;
  make_synthetic_dataset(SyntheticKind::kTones, 9, 4, tmp.str("data"));

  RunConfig cfg;
  cfg.dir = tmp.str("data");
  CodecRef a;
  a.name = "ident";
  a.kind = "identity";
  a.frame_len = 64;
  CodecRef b;
  b.name = "noise";
  b.kind = "random";
  b.seed = 17;
  cfg.codecs = {a, b};
  cfg.experiments = {"recon", "ppl"};
  cfg.manifest = "manifest.jsonl";
  cfg.out_dir = "out";
  cfg.workers = 2;
  cfg.formats = {ReportFormat::kCsv};

  RunResult res = run(cfg);
  CHECK(res.report.metrics.has("noise", "ppl/sound/overall"));
  CHECK(!res.report.correlations.rows.empty());
  for (const auto& row : res.report.correlations.rows) {
    CHECK(row.n == 2);
    CHECK(std::fabs(row.r) <= 1.0);
  }
  std::string corr = acbtest::slurp(tmp.str("data/out/correlations.csv"));
  CHECK(corr.find("task,dataset_type,metric,r,n") == 0);
  CHECK(corr.find("\nrecon,sound,") != std::string::npos);

  // The cache lives under out_dir; rerunning there reads every grid back.
  RunResult res2 = run(cfg);
  CHECK(res2.cache_hits > 0);
  CHECK(res2.cache_misses == 0);
}
