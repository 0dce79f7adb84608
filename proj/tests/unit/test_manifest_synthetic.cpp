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
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "acb/codec.hpp"
#include "acb/error.hpp"
#include "acb/manifest.hpp"
#include "acb/synthetic.hpp"
#include "acb/token_grid.hpp"
#include "acb/wav_io.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace acb;
namespace fs = std::filesystem;

namespace {

ManifestEntry entry(const std::string& id) {
  ManifestEntry e;
  e.utt_id = id;
  return e;
}

}  // namespace

TEST_CASE("manifest validation rejects malformed rows") {
  Manifest m;
  m.entries.push_back(entry("a"));
  m.validate(false);

  SUBCASE("empty id") {
    m.entries.push_back(entry(""));
    CHECK_THROWS_AS(m.validate(false), ValidationError);
  }
  SUBCASE("duplicate id") {
    m.entries.push_back(entry("a"));
    CHECK_THROWS_WITH_AS(m.validate(false),
                         doctest::Contains("duplicate utt_id"),
                         ValidationError);
  }
  SUBCASE("unknown domain") {
    m.entries[0].domain = "voice";
    CHECK_THROWS_WITH_AS(m.validate(false), doctest::Contains("voice"),
                         ValidationError);
  }
  SUBCASE("negative clip start") {
    m.entries[0].start_s = -0.5;
    CHECK_THROWS_AS(m.validate(false), ValidationError);
  }
  SUBCASE("zero clip duration") {
    m.entries[0].duration_s = 0.0;
    CHECK_THROWS_AS(m.validate(false), ValidationError);
  }
  SUBCASE("mixed label kinds") {
    m.entries[0].label = 1;
    m.entries[0].targets = std::vector<double>{0.5};
    CHECK_THROWS_WITH_AS(m.validate(false),
                         doctest::Contains("mixes label kinds"),
                         ValidationError);
  }
  SUBCASE("missing audio only checked when asked") {
    m.entries[0].audio = "nope.wav";
    m.validate(false);
    CHECK_THROWS_WITH_AS(m.validate(true), doctest::Contains("missing audio"),
                         ValidationError);
  }
}

TEST_CASE("manifest split and domain accessors") {
  Manifest m;
  for (int i = 0; i < 6; ++i) {
    ManifestEntry e = entry("u" + std::to_string(i));
    e.split = i < 3 ? Split::kTrain : (i < 5 ? Split::kValid : Split::kTest);
    if (i % 2 == 0) e.domain = "music";
    m.entries.push_back(std::move(e));
  }
  CHECK(m.train_set().entries.size() == 3);
  CHECK(m.valid_set().entries.size() == 2);
  CHECK(m.valid_set().split == Split::kValid);
  CHECK(m.test_set().entries.size() == 1);
  CHECK(m.all().size() == 6);
  CHECK(m.at("u4").utt_id == "u4");
  CHECK_THROWS_AS(m.at("nope"), ValidationError);
  // Unset domains bucket as "all".
  CHECK(m.domains() == std::vector<std::string>{"all", "music"});
  CHECK(domain_bucket(m.entries[1]) == "all");
  CHECK(domain_bucket(m.entries[0]) == "music");

  CHECK(split_from_string("valid") == Split::kValid);
  CHECK(to_string(Split::kTest) == "test");
  CHECK_THROWS_AS(split_from_string("dev"), ValidationError);
}

TEST_CASE("manifest jsonl round-trips every field") {
  acbtest::TempDir tmp;
  Manifest m;
  ManifestEntry a = entry("utt_a");
  a.audio = "wav/a.wav";
  a.split = Split::kValid;
  a.domain = "speech";
  a.transcript = "hello there";
  a.start_s = 0.25;
  a.duration_s = 1.5;
  ManifestEntry b = entry("utt_b");
  b.label = 3;
  ManifestEntry c = entry("utt_c");
  c.labels = std::vector<uint8_t>{1, 0, 1};
  ManifestEntry d = entry("utt_d");
  d.targets = std::vector<double>{0.5, -2.0};
  m.entries = {a, b, c, d};

  std::string path = tmp.str("m.jsonl");
  save_manifest(m, path);
  Manifest back = load_manifest(path);
  CHECK(back.dir == tmp.path().string());
  REQUIRE(back.entries.size() == 4);
  CHECK(back.entries[0].audio == "wav/a.wav");
  CHECK(back.entries[0].split == Split::kValid);
  CHECK(back.entries[0].domain == "speech");
  CHECK(back.entries[0].transcript == "hello there");
  CHECK(back.entries[0].start_s == 0.25);
  CHECK(back.entries[0].duration_s == 1.5);
  CHECK(back.entries[1].label == 3);
  CHECK_FALSE(back.entries[1].transcript.has_value());
  CHECK(back.entries[2].labels == std::vector<uint8_t>{1, 0, 1});
  CHECK(back.entries[3].targets == std::vector<double>{0.5, -2.0});
}

TEST_CASE("manifest loader reports the offending line") {
  acbtest::TempDir tmp;
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream(tmp.str(name), std::ios::binary) << body;
    return tmp.str(name);
  };
  CHECK_THROWS_AS(load_manifest(tmp.str("absent.jsonl")), IoError);

  std::string bad = write("bad.jsonl", "{\"utt_id\":\"a\"}\nnot json\n");
  CHECK_THROWS_WITH_AS(load_manifest(bad), doctest::Contains(":2"),
                       ValidationError);
  CHECK_THROWS_AS(load_manifest(write("noid.jsonl", "{\"audio\":\"x\"}\n")),
                  ValidationError);
  CHECK_THROWS_AS(
      load_manifest(write("split.jsonl",
                          "{\"utt_id\":\"a\",\"split\":\"dev\"}\n")),
      ValidationError);

  // CRLF and blank lines are tolerated.
  Manifest m = load_manifest(
      write("crlf.jsonl", "{\"utt_id\":\"a\"}\r\n\r\n{\"utt_id\":\"b\"}\r\n"));
  CHECK(m.entries.size() == 2);
}

TEST_CASE("entry audio honors the clip window") {
  acbtest::TempDir tmp;
  Waveform w;
  w.sample_rate = 8000;
  w.samples.resize(8000);
  for (size_t i = 0; i < w.samples.size(); ++i)
    w.samples[i] = static_cast<float>(i) / 8000.0f;
  write_wav(w, tmp.str("full.wav"));

  Manifest m;
  m.dir = tmp.path().string();
  ManifestEntry whole = entry("whole");
  whole.audio = "full.wav";
  ManifestEntry clip = entry("clip");
  clip.audio = "full.wav";
  clip.start_s = 0.5;
  clip.duration_s = 0.25;
  ManifestEntry tail = entry("tail");
  tail.audio = "full.wav";
  tail.start_s = 0.75;
  tail.duration_s = 9.0;  // clamps to the end
  ManifestEntry past = entry("past");
  past.audio = "full.wav";
  past.start_s = 2.0;
  ManifestEntry silent = entry("silent");
  m.entries = {whole, clip, tail, past, silent};

  CHECK(load_entry_audio(m, m.entries[0]).samples.size() == 8000);
  Waveform c = load_entry_audio(m, m.entries[1]);
  CHECK(c.samples.size() == 2000);
  CHECK(c.samples[0] == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(load_entry_audio(m, m.entries[2]).samples.size() == 2000);
  CHECK_THROWS_WITH_AS(load_entry_audio(m, m.entries[3]),
                       doctest::Contains("past end"), ValidationError);
  CHECK_THROWS_WITH_AS(load_entry_audio(m, m.entries[4]),
                       doctest::Contains("no audio"), ValidationError);

  CHECK(resolve_path("/abs/dir", "/other/file.wav") == "/other/file.wav");
  CHECK(resolve_path("", "rel.wav") == "rel.wav");
  CHECK(resolve_path("/abs/dir", "rel.wav") == "/abs/dir/rel.wav");
}

TEST_CASE("tones dataset is balanced, split, and reproducible") {
  acbtest::TempDir tmp;
  SyntheticResult r1 =
      make_synthetic_dataset(SyntheticKind::kTones, 9, 7, tmp.str("a"));
  CHECK(std::is_sorted(r1.files.begin(), r1.files.end()));
  // 9 wavs + manifest + dataset.json.
  CHECK(r1.files.size() == 11);

  Manifest m = load_manifest(r1.manifest_path);
  m.validate(true);
  REQUIRE(m.entries.size() == 9);
  std::map<uint32_t, int> per_class;
  int train = 0;
  for (const auto& e : m.entries) {
    REQUIRE(e.label.has_value());
    per_class[*e.label]++;
    CHECK(e.domain == "sound");
    train += e.split == Split::kTrain;
    Waveform w = load_entry_audio(m, e);
    CHECK(w.sample_rate == 16000);
    CHECK(w.samples.size() == 8000);
    double peak = 0.0;
    for (float s : w.samples) peak = std::max(peak, std::fabs((double)s));
    CHECK(peak > 0.1);
  }
  CHECK(per_class == std::map<uint32_t, int>{{0, 3}, {1, 3}, {2, 3}});
  CHECK(train == 6);
  CHECK(m.test_set().entries.size() == 3);

  // Same (kind, size, seed) elsewhere gives byte-identical files.
  SyntheticResult r2 =
      make_synthetic_dataset(SyntheticKind::kTones, 9, 7, tmp.str("b"));
  REQUIRE(r2.files.size() == r1.files.size());
  for (size_t i = 0; i < r1.files.size(); ++i) {
    CHECK(fs::path(r1.files[i]).filename() == fs::path(r2.files[i]).filename());
    CHECK(acbtest::slurp(r1.files[i]) == acbtest::slurp(r2.files[i]));
  }

  SyntheticResult r3 =
      make_synthetic_dataset(SyntheticKind::kTones, 9, 8, tmp.str("c"));
  bool any_differs = false;
  for (size_t i = 0; i < r1.files.size(); ++i)
    if (fs::path(r1.files[i]).extension() == ".wav")
      any_differs |= acbtest::slurp(r1.files[i]) != acbtest::slurp(r3.files[i]);
  CHECK(any_differs);

  CHECK_THROWS_AS(make_synthetic_dataset(SyntheticKind::kTones, 0, 1, tmp.str("z")),
                  ValidationError);
}

TEST_CASE("markov dataset plants a chain with the advertised entropy") {
  double h = markov_entropy_rate_nats();
  CHECK(h == doctest::Approx(-(0.7 * std::log(0.7) + 0.2 * std::log(0.2) +
                               0.1 * std::log(0.1)))
                 .epsilon(1e-12));

  acbtest::TempDir tmp;
  SyntheticResult r =
      make_synthetic_dataset(SyntheticKind::kMarkovSpeechlike, 10, 11,
                             tmp.str("mk"));
  Manifest m = load_manifest(r.manifest_path);
  m.validate(true);
  REQUIRE(m.entries.size() == 10);
  CHECK(m.train_set().entries.size() == 8);
  CHECK(m.valid_set().entries.size() == 2);

  // The token files come back through the file-backed codec adapter.
  auto codec = external_codec(tmp.str("mk/codec"));
  CHECK(codec->descriptor().n_codebooks == 1);
  CHECK(codec->descriptor().codebook_sizes ==
        std::vector<uint32_t>{16});
  CHECK_FALSE(codec->supports_waveform_encode());

  std::map<uint32_t, uint64_t> step_counts;
  uint64_t total = 0;
  for (const auto& e : m.entries) {
    Waveform w = load_entry_audio(m, e);
    TokenGrid g = codec->encode_utterance(e.utt_id, w);
    REQUIRE(g.n_frames == 512);
    for (uint32_t t = 0; t < g.n_frames; ++t) CHECK(g.tokens[t] < 16);
    for (uint32_t t = 1; t < g.n_frames; ++t) {
      uint32_t step = (g.tokens[t] + 16 - g.tokens[t - 1]) % 16;
      REQUIRE(step >= 1);
      REQUIRE(step <= 3);
      step_counts[step]++;
      ++total;
    }
  }
  // 5110 transitions put the empirical step frequencies near the plant.
  CHECK(static_cast<double>(step_counts[1]) / total ==
        doctest::Approx(0.7).epsilon(0.05));
  CHECK(static_cast<double>(step_counts[2]) / total ==
        doctest::Approx(0.2).epsilon(0.15));
  CHECK(static_cast<double>(step_counts[3]) / total ==
        doctest::Approx(0.1).epsilon(0.25));

  std::string side = acbtest::slurp(tmp.str("mk/entropy.json"));
  CHECK(side.find("entropy_rate_nats") != std::string::npos);
  CHECK(side.find("\"states\": 16") != std::string::npos);
}

TEST_CASE("ctc-mapped dataset keeps the token to character rule exact") {
  acbtest::TempDir tmp;
  SyntheticResult r =
      make_synthetic_dataset(SyntheticKind::kCtcMapped, 6, 13, tmp.str("ctc"));
  Manifest m = load_manifest(r.manifest_path);
  m.validate(true);
  REQUIRE(m.entries.size() == 6);
  CHECK(m.train_set().entries.size() == 5);
  CHECK(m.test_set().entries.size() == 1);

  auto codec = external_codec(tmp.str("ctc/codec"));
  CHECK(codec->descriptor().codebook_sizes == std::vector<uint32_t>{999});

  for (const auto& e : m.entries) {
    REQUIRE(e.transcript.has_value());
    const std::string& text = *e.transcript;
    CHECK(e.audio.empty());
    for (size_t i = 1; i < text.size(); ++i) CHECK(text[i] != text[i - 1]);

    // Token-only corpus: load the grid file directly.
    TokenGrid g = load_token_grid(tmp.str("ctc/codec/" + e.utt_id + ".tokens"));
    REQUIRE(g.n_frames == text.size() * 2);
    for (size_t c = 0; c < text.size(); ++c) {
      uint32_t want = text[c] == ' ' ? 26u : static_cast<uint32_t>(text[c] - 'a');
      for (uint32_t f = 0; f < 2; ++f) {
        uint32_t tok = g.tokens[c * 2 + f];
        CHECK(tok < 999);
        CHECK(tok % 27 == want);
      }
    }
  }
  CHECK(fs::exists(tmp.str("ctc/mapping.json")));
}
