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

#include "acb/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "acb/codec.hpp"
#include "acb/error.hpp"
#include "acb/manifest.hpp"
#include "acb/rng.hpp"
#include "acb/rvq.hpp"
#include "acb/token_grid.hpp"
#include "acb/wav_io.hpp"
#include "json.hpp"

namespace acb {

namespace fs = std::filesystem;

SyntheticKind synthetic_kind_from_string(const std::string& s) {
  if (s == "tones") return SyntheticKind::kTones;
  if (s == "markov-speechlike") return SyntheticKind::kMarkovSpeechlike;
  if (s == "ctc-mapped") return SyntheticKind::kCtcMapped;
  throw ValidationError("unknown synthetic dataset kind: " + s);
}

std::string to_string(SyntheticKind k) {
  switch (k) {
    case SyntheticKind::kTones: return "tones";
    case SyntheticKind::kMarkovSpeechlike: return "markov-speechlike";
    case SyntheticKind::kCtcMapped: return "ctc-mapped";
  }
  throw ValidationError("unknown synthetic dataset kind");
}

namespace {

constexpr uint32_t kSampleRate = 16000;

// 16-state chain: from state s, advance by 1, 2 or 3 (mod 16).
constexpr uint32_t kMarkovStates = 16;
constexpr double kMarkovProbs[3] = {0.7, 0.2, 0.1};
constexpr uint32_t kMarkovFramesPerUtt = 512;
constexpr uint32_t kMarkovFrameLen = 512;
constexpr uint32_t kMarkovHop = 256;

constexpr char kCtcChars[] = "abcdefghijklmnopqrstuvwxyz ";  // 27
constexpr uint32_t kCtcCharCount = 27;
constexpr uint32_t kCtcNuisance = 37;  // token = char + 27 * nuisance
constexpr uint32_t kCtcFramesPerChar = 2;

std::string zpad(uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%05u", v);
  return buf;
}

void track(std::vector<std::string>* files, const std::string& p) {
  files->push_back(p);
}

void write_json_file(const nlohmann::ordered_json& j, const fs::path& path,
                     std::vector<std::string>* files) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("short write to " + path.string());
  track(files, path.string());
}

void write_descriptor(const CodecDescriptor& d, const fs::path& dir,
                      std::vector<std::string>* files) {
  fs::path p = dir / "descriptor.json";
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  out << descriptor_to_json(d) << "\n";
  if (!out) throw IoError("short write to " + p.string());
  track(files, p.string());
}

SyntheticResult make_tones(uint32_t size, uint64_t seed,
                           const fs::path& out_dir) {
  fs::create_directories(out_dir / "wav");
  SyntheticResult result;
  Manifest m;
  m.dir = out_dir.string();
  for (uint32_t i = 0; i < size; ++i) {
    Rng rng(mix_seed(seed, i));
    uint32_t cls = i % 3;
    Waveform w;
    w.sample_rate = kSampleRate;
    w.samples.resize(kSampleRate / 2);
    double amp = rng.uniform_range(0.3, 0.7);
    if (cls == 0) {
      double f = rng.uniform_range(200.0, 500.0);
      double phase = rng.uniform_range(0.0, 2.0 * std::numbers::pi);
      for (size_t n = 0; n < w.samples.size(); ++n)
        w.samples[n] = amp * std::sin(2.0 * std::numbers::pi * f * n /
                                          kSampleRate +
                                      phase);
    } else if (cls == 1) {
      double f0 = rng.uniform_range(600.0, 900.0);
      double f1 = f0 + rng.uniform_range(800.0, 1600.0);
      double phase = rng.uniform_range(0.0, 2.0 * std::numbers::pi);
      double dur = w.duration_s();
      for (size_t n = 0; n < w.samples.size(); ++n) {
        double t = static_cast<double>(n) / kSampleRate;
        // Instantaneous frequency sweeps f0 -> f1 linearly.
        double arg = 2.0 * std::numbers::pi *
                     (f0 * t + 0.5 * (f1 - f0) * t * t / dur);
        w.samples[n] = amp * std::sin(arg + phase);
      }
    } else {
      double namp = rng.uniform_range(0.2, 0.5);
      for (size_t n = 0; n < w.samples.size(); ++n)
        w.samples[n] = namp * (2.0 * rng.uniform() - 1.0);
    }
    std::string rel = "wav/tone_" + zpad(i) + ".wav";
    write_wav(w, (out_dir / rel).string());
    track(&result.files, (out_dir / rel).string());

    ManifestEntry e;
    e.utt_id = "tone_" + zpad(i);
    e.audio = rel;
    e.split = (static_cast<uint64_t>(i) * 3 < static_cast<uint64_t>(size) * 2)
                  ? Split::kTrain
                  : Split::kTest;
    e.domain = "sound";
    e.label = cls;
    m.entries.push_back(std::move(e));
  }
  fs::path mpath = out_dir / "manifest.jsonl";
  save_manifest(m, mpath.string());
  track(&result.files, mpath.string());
  result.manifest_path = mpath.string();

  nlohmann::ordered_json side;
  side["kind"] = "tones";
  side["size"] = size;
  side["seed"] = seed;
  side["sample_rate"] = kSampleRate;
  side["classes"] = {"sine", "chirp", "noise"};
  write_json_file(side, out_dir / "dataset.json", &result.files);
  return result;
}

RvqModel markov_synth_model() {
  RvqModel m;
  m.frame_len = kMarkovFrameLen;
  m.hop = kMarkovHop;
  m.sample_rate = kSampleRate;
  Codebook cb;
  cb.k = kMarkovStates;
  cb.dim = kMarkovFrameLen;
  cb.centroids.resize(static_cast<size_t>(cb.k) * cb.dim);
  std::vector<double> win = hann_window(kMarkovFrameLen);
  for (uint32_t k = 0; k < kMarkovStates; ++k) {
    double f = 200.0 + 150.0 * k;
    for (uint32_t n = 0; n < kMarkovFrameLen; ++n)
      cb.centroids[static_cast<size_t>(k) * cb.dim + n] =
          0.4 * win[n] *
          std::sin(2.0 * std::numbers::pi * f * n / kSampleRate);
  }
  m.stages.push_back(std::move(cb));
  return m;
}

SyntheticResult make_markov(uint32_t size, uint64_t seed,
                            const fs::path& out_dir) {
  fs::create_directories(out_dir / "wav");
  fs::create_directories(out_dir / "codec");
  SyntheticResult result;
  RvqModel synth = markov_synth_model();

  CodecDescriptor desc;
  desc.name = "planted-markov";
  desc.feature_type = FeatureType::kSemantic;
  desc.sample_rate = kSampleRate;
  desc.token_rate = Rational{kSampleRate, kMarkovHop}.reduced();
  desc.n_codebooks = 1;
  desc.codebook_sizes = {kMarkovStates};
  write_descriptor(desc, out_dir / "codec", &result.files);

  Manifest m;
  m.dir = out_dir.string();
  for (uint32_t i = 0; i < size; ++i) {
    Rng rng(mix_seed(seed, i));
    TokenGrid g;
    g.n_frames = kMarkovFramesPerUtt;
    g.n_codebooks = 1;
    g.codebook_sizes = {kMarkovStates};
    g.token_rate = desc.token_rate;
    g.source_codec = desc.name;
    g.tokens.resize(kMarkovFramesPerUtt);
    uint32_t state = rng.uniform_u32(kMarkovStates);
    for (uint32_t t = 0; t < kMarkovFramesPerUtt; ++t) {
      g.tokens[t] = state;
      double u = rng.uniform();
      uint32_t step = u < kMarkovProbs[0]
                          ? 1u
                          : (u < kMarkovProbs[0] + kMarkovProbs[1] ? 2u : 3u);
      state = (state + step) % kMarkovStates;
    }
    std::string id = "mk_" + zpad(i);
    fs::path tok = out_dir / "codec" / (id + ".tokens");
    save_token_grid(g, tok.string());
    track(&result.files, tok.string());

    Waveform w = rvq_decode(synth, g);
    std::string rel = "wav/" + id + ".wav";
    write_wav(w, (out_dir / rel).string());
    track(&result.files, (out_dir / rel).string());

    ManifestEntry e;
    e.utt_id = id;
    e.audio = rel;
    e.split = (static_cast<uint64_t>(i) * 5 < static_cast<uint64_t>(size) * 4)
                  ? Split::kTrain
                  : Split::kValid;
    e.domain = "speech";
    m.entries.push_back(std::move(e));
  }
  fs::path mpath = out_dir / "manifest.jsonl";
  save_manifest(m, mpath.string());
  track(&result.files, mpath.string());
  result.manifest_path = mpath.string();

  nlohmann::ordered_json side;
  side["kind"] = "markov-speechlike";
  side["size"] = size;
  side["seed"] = seed;
  side["states"] = kMarkovStates;
  side["step_probs"] = {kMarkovProbs[0], kMarkovProbs[1], kMarkovProbs[2]};
  side["entropy_rate_nats"] = markov_entropy_rate_nats();
  side["tokens_per_utterance"] = kMarkovFramesPerUtt;
  side["total_tokens"] = static_cast<uint64_t>(size) * kMarkovFramesPerUtt;
  write_json_file(side, out_dir / "entropy.json", &result.files);
  return result;
}

SyntheticResult make_ctc_mapped(uint32_t size, uint64_t seed,
                                const fs::path& out_dir) {
  fs::create_directories(out_dir / "codec");
  SyntheticResult result;
  uint32_t vocab = kCtcCharCount * kCtcNuisance;  // 999

  CodecDescriptor desc;
  desc.name = "ctc-mapped";
  desc.feature_type = FeatureType::kSemantic;
  desc.sample_rate = kSampleRate;
  desc.token_rate = Rational{50, 1};
  desc.n_codebooks = 1;
  desc.codebook_sizes = {vocab};
  write_descriptor(desc, out_dir / "codec", &result.files);

  Manifest m;
  m.dir = out_dir.string();
  for (uint32_t i = 0; i < size; ++i) {
    Rng rng(mix_seed(seed, i));
    uint32_t n_words = 3 + rng.uniform_u32(4);
    std::string text;
    for (uint32_t wd = 0; wd < n_words; ++wd) {
      if (wd) text += ' ';
      uint32_t len = 2 + rng.uniform_u32(5);
      char prev = 0;
      for (uint32_t c = 0; c < len; ++c) {
        // Skip the previous letter so collapsed CTC output stays exact.
        char ch;
        if (prev == 0) {
          ch = static_cast<char>('a' + rng.uniform_u32(26));
        } else {
          uint32_t pick = rng.uniform_u32(25);
          ch = static_cast<char>('a' + pick + (pick >= uint32_t(prev - 'a')));
        }
        text += ch;
        prev = ch;
      }
    }

    TokenGrid g;
    g.n_frames = static_cast<uint32_t>(text.size()) * kCtcFramesPerChar;
    g.n_codebooks = 1;
    g.codebook_sizes = {vocab};
    g.token_rate = desc.token_rate;
    g.source_codec = desc.name;
    g.tokens.resize(g.n_frames);
    for (size_t c = 0; c < text.size(); ++c) {
      uint32_t idx = text[c] == ' ' ? 26u : static_cast<uint32_t>(
                                                text[c] - 'a');
      for (uint32_t f = 0; f < kCtcFramesPerChar; ++f)
        g.tokens[c * kCtcFramesPerChar + f] =
            idx + kCtcCharCount * rng.uniform_u32(kCtcNuisance);
    }
    std::string id = "ctc_" + zpad(i);
    fs::path tok = out_dir / "codec" / (id + ".tokens");
    save_token_grid(g, tok.string());
    track(&result.files, tok.string());

    ManifestEntry e;
    e.utt_id = id;
    e.split = (static_cast<uint64_t>(i) * 5 < static_cast<uint64_t>(size) * 4)
                  ? Split::kTrain
                  : Split::kTest;
    e.domain = "speech";
    e.transcript = text;
    m.entries.push_back(std::move(e));
  }
  fs::path mpath = out_dir / "manifest.jsonl";
  save_manifest(m, mpath.string());
  track(&result.files, mpath.string());
  result.manifest_path = mpath.string();

  nlohmann::ordered_json side;
  side["kind"] = "ctc-mapped";
  side["size"] = size;
  side["seed"] = seed;
  side["chars"] = kCtcChars;
  side["token_rule"] = "token = char_index + 27 * nuisance, nuisance < 37";
  side["frames_per_char"] = kCtcFramesPerChar;
  write_json_file(side, out_dir / "mapping.json", &result.files);
  return result;
}

}  // namespace

double markov_entropy_rate_nats() {
  double h = 0.0;
  for (double p : kMarkovProbs) h -= p * std::log(p);
  return h;
}

SyntheticResult make_synthetic_dataset(SyntheticKind kind, uint32_t size,
                                       uint64_t seed,
                                       const std::string& out_dir) {
  if (size == 0)
    throw ValidationError("synthetic dataset size must be positive");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
  SyntheticResult result;
  switch (kind) {
    case SyntheticKind::kTones: result = make_tones(size, seed, out_dir); break;
    case SyntheticKind::kMarkovSpeechlike:
      result = make_markov(size, seed, out_dir);
      break;
    case SyntheticKind::kCtcMapped:
      result = make_ctc_mapped(size, seed, out_dir);
      break;
  }
  std::sort(result.files.begin(), result.files.end());
  return result;
}

}  // namespace acb
