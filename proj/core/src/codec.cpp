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

#include "acb/codec.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "acb/error.hpp"
#include "acb/rng.hpp"
#include "acb/wav_io.hpp"
#include "json.hpp"

namespace acb {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(FeatureType t) {
  switch (t) {
    case FeatureType::kAcoustic: return "acoustic";
    case FeatureType::kSemantic: return "semantic";
    case FeatureType::kFused: return "fused";
    case FeatureType::kDecoupled: return "decoupled";
  }
  throw ValidationError("unknown feature type");
}

FeatureType feature_type_from_string(const std::string& s) {
  if (s == "acoustic") return FeatureType::kAcoustic;
  if (s == "semantic") return FeatureType::kSemantic;
  if (s == "fused") return FeatureType::kFused;
  if (s == "decoupled") return FeatureType::kDecoupled;
  throw ValidationError("unknown feature type: " + s);
}

double CodecDescriptor::nominal_bitrate_bps() const {
  double bits = 0.0;
  for (uint32_t s : codebook_sizes) bits += std::log2(static_cast<double>(s));
  return token_rate.value() * bits;
}

void CodecDescriptor::validate() const {
  if (name.empty()) throw ValidationError("codec descriptor: empty name");
  if (sample_rate == 0)
    throw ValidationError("codec descriptor: sample_rate must be positive");
  if (token_rate.num == 0 || token_rate.den == 0)
    throw ValidationError("codec descriptor: token_rate must be positive");
  if (n_codebooks == 0 || codebook_sizes.size() != n_codebooks)
    throw ValidationError(
        "codec descriptor: codebook_sizes must match n_codebooks");
  for (uint32_t s : codebook_sizes)
    if (s == 0) throw ValidationError("codec descriptor: zero codebook size");
  for (uint32_t c : semantic_columns)
    if (c >= n_codebooks)
      throw ValidationError("codec descriptor: semantic column out of range");
  if (bitrate_bps) {
    double expect = nominal_bitrate_bps();
    if (std::fabs(*bitrate_bps - expect) > 0.01 * expect)
      throw ValidationError(
          "codec descriptor: bitrate_bps inconsistent with token rate and "
          "codebook sizes (expected " + std::to_string(expect) + ")");
  }
}

namespace {

Rational rational_from_json(const json& v, const std::string& what) {
  if (v.is_object()) {
    Rational r;
    r.num = v.at("num").get<uint32_t>();
    r.den = v.at("den").get<uint32_t>();
    return r.reduced();
  }
  if (v.is_number_integer())
    return Rational{v.get<uint32_t>(), 1};
  if (v.is_number_float()) {
    // Denominator 1000 covers millihertz precision, enough for stated rates.
    double x = v.get<double>();
    if (x <= 0) throw ValidationError(what + ": must be positive");
    return Rational{static_cast<uint32_t>(std::llround(x * 1000.0)), 1000}
        .reduced();
  }
  throw ValidationError(what + ": expected number or {num, den}");
}

}  // namespace

CodecDescriptor descriptor_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("codec descriptor: bad JSON: ") +
                          e.what());
  }
  CodecDescriptor d;
  try {
    d.name = j.at("name").get<std::string>();
    d.feature_type =
        feature_type_from_string(j.at("feature_type").get<std::string>());
    d.sample_rate = j.at("sample_rate").get<uint32_t>();
    d.token_rate = rational_from_json(j.at("token_rate"), "token_rate");
    d.codebook_sizes = j.at("codebook_sizes").get<std::vector<uint32_t>>();
    d.n_codebooks = j.contains("n_codebooks")
                        ? j.at("n_codebooks").get<uint32_t>()
                        : static_cast<uint32_t>(d.codebook_sizes.size());
    if (j.contains("bitrate_bps")) d.bitrate_bps = j.at("bitrate_bps").get<double>();
    if (j.contains("semantic_columns"))
      d.semantic_columns =
          j.at("semantic_columns").get<std::vector<uint32_t>>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("codec descriptor: ") + e.what());
  }
  d.validate();
  return d;
}

CodecDescriptor load_descriptor(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return descriptor_from_json(buf.str());
}

std::string descriptor_to_json(const CodecDescriptor& d) {
  json j;
  j["name"] = d.name;
  j["feature_type"] = to_string(d.feature_type);
  j["sample_rate"] = d.sample_rate;
  j["token_rate"] = {{"num", d.token_rate.num}, {"den", d.token_rate.den}};
  j["n_codebooks"] = d.n_codebooks;
  j["codebook_sizes"] = d.codebook_sizes;
  if (d.bitrate_bps) j["bitrate_bps"] = *d.bitrate_bps;
  if (!d.semantic_columns.empty()) j["semantic_columns"] = d.semantic_columns;
  return j.dump(2) + "\n";
}

namespace {

class ExternalCodec final : public CodecAdapter {
 public:
  ExternalCodec(std::string dir, CodecDescriptor d)
      : CodecAdapter(std::move(d)), dir_(std::move(dir)) {
    descriptor_.validate();
    if (!fs::is_directory(dir_))
      throw IoError("external codec: not a directory: " + dir_);
    for (const auto& e : fs::directory_iterator(dir_)) {
      if (e.path().extension() == ".wav" &&
          e.path().stem().extension() == ".rec") {
        has_rec_ = true;
        break;
      }
    }
  }

  TokenGrid encode(const Waveform&) override {
    throw ValidationError(
        "external codec '" + descriptor_.name +
        "' reads token files and needs an utterance id to encode");
  }

  TokenGrid encode_utterance(const std::string& utt_id,
                             const Waveform&) override {
    std::string path = dir_ + "/" + utt_id + ".tokens";
    if (!fs::exists(path))
      throw IoError("external codec '" + descriptor_.name +
                    "': no tokens for utterance " + utt_id);
    TokenGrid g = load_token_grid(path);
    if (g.n_codebooks != descriptor_.n_codebooks ||
        g.codebook_sizes != descriptor_.codebook_sizes)
      throw ValidationError("external codec '" + descriptor_.name +
                            "': token file " + path +
                            " does not match the descriptor codebooks");
    g.source_codec = descriptor_.name;
    {
      std::lock_guard<std::mutex> lock(mu_);
      grid_to_id_[grid_hash(g)] = utt_id;
    }
    return g;
  }

  Waveform decode(const TokenGrid& g) override {
    std::string id;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = grid_to_id_.find(grid_hash(g));
      if (it == grid_to_id_.end())
        throw ValidationError("external codec '" + descriptor_.name +
                              "': grid does not come from this codec's files");
      id = it->second;
    }
    std::string path = dir_ + "/" + id + ".rec.wav";
    if (!fs::exists(path))
      throw IoError("external codec '" + descriptor_.name +
                    "': no reconstruction for utterance " + id);
    return read_wav(path);
  }

  bool can_decode() const override { return has_rec_; }
  bool supports_waveform_encode() const override { return false; }

 private:
  std::string dir_;
  bool has_rec_ = false;
  mutable std::mutex mu_;
  std::unordered_map<uint64_t, std::string> grid_to_id_;
};

class IdentityCodec final : public CodecAdapter {
 public:
  explicit IdentityCodec(uint32_t frame_len)
      : CodecAdapter(make_descriptor(frame_len)), frame_len_(frame_len) {
    if (frame_len == 0)
      throw ValidationError("identity codec: frame_len must be positive");
  }

  TokenGrid encode(const Waveform& w) override {
    w.validate();
    uint32_t n_frames = static_cast<uint32_t>(w.samples.size() / frame_len_);
    if (n_frames == 0)
      throw ValidationError("identity codec: input shorter than one frame");
    TokenGrid g;
    g.n_frames = n_frames;
    g.n_codebooks = 1;
    g.codebook_sizes = {kBook};
    g.token_rate = Rational{w.sample_rate, frame_len_}.reduced();
    g.source_codec = descriptor_.name;
    g.tokens.resize(n_frames);
    {
      std::lock_guard<std::mutex> lock(mu_);
      for (uint32_t t = 0; t < n_frames; ++t)
        g.tokens[t] = registry_index(w, t) % kBook;
      decoded_[grid_hash(g)] = w;
    }
    return g;
  }

  Waveform decode(const TokenGrid& g) override {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = decoded_.find(grid_hash(g));
    if (it == decoded_.end())
      throw ValidationError(
          "identity codec: grid was not produced by this adapter");
    return it->second;
  }

 private:
  static constexpr uint32_t kBook = 1024;

  static CodecDescriptor make_descriptor(uint32_t frame_len) {
    CodecDescriptor d;
    d.name = "identity";
    d.feature_type = FeatureType::kAcoustic;
    d.sample_rate = 16000;
    d.token_rate = Rational{16000, frame_len == 0 ? 1 : frame_len}.reduced();
    d.n_codebooks = 1;
    d.codebook_sizes = {kBook};
    return d;
  }

  // First-seen index of the frame's exact sample bytes. Identical content
  // always maps to the same index, so re-encoding a decoded grid replays it.
  uint32_t registry_index(const Waveform& w, uint32_t t) {
    std::string key(reinterpret_cast<const char*>(w.samples.data()) +
                        static_cast<size_t>(t) * frame_len_ * sizeof(double),
                    static_cast<size_t>(frame_len_) * sizeof(double));
    auto [it, inserted] =
        registry_.emplace(std::move(key),
                          static_cast<uint32_t>(registry_.size()));
    (void)inserted;
    return it->second;
  }

  uint32_t frame_len_;
  std::mutex mu_;
  std::unordered_map<std::string, uint32_t> registry_;
  std::unordered_map<uint64_t, Waveform> decoded_;
};

class RandomCodec final : public CodecAdapter {
 public:
  explicit RandomCodec(uint64_t seed)
      : CodecAdapter(make_descriptor()), seed_(seed) {}

  TokenGrid encode(const Waveform& w) override {
    w.validate();
    uint32_t n_frames = static_cast<uint32_t>(w.samples.size() / kFrame);
    if (n_frames == 0)
      throw ValidationError("random codec: input shorter than one frame");
    // Keyed by input content, not call order: re-encoding a decoded signal
    // draws fresh tokens, yet a fixed input always maps to the same grid no
    // matter how work is scheduled across threads.
    uint64_t content = 0xcbf29ce484222325ull;
    auto mix = [&content](const void* data, size_t len) {
      const auto* p = static_cast<const unsigned char*>(data);
      for (size_t i = 0; i < len; ++i) {
        content ^= p[i];
        content *= 0x100000001b3ull;
      }
    };
    mix(&w.sample_rate, sizeof(w.sample_rate));
    mix(w.samples.data(), w.samples.size() * sizeof(double));
    Rng rng(mix_seed(seed_, content));
    TokenGrid g;
    g.n_frames = n_frames;
    g.n_codebooks = kBooks;
    g.codebook_sizes.assign(kBooks, kBook);
    g.token_rate = Rational{w.sample_rate, kFrame}.reduced();
    g.source_codec = descriptor_.name;
    g.tokens.resize(static_cast<size_t>(n_frames) * kBooks);
    for (auto& v : g.tokens) v = rng.uniform_u32(kBook);
    return g;
  }

  Waveform decode(const TokenGrid& g) override {
    g.validate();
    Waveform w;
    w.sample_rate = static_cast<uint32_t>(
        std::llround(g.token_rate.value() * kFrame));
    if (w.sample_rate == 0)
      throw ValidationError("random codec: grid token rate too low to decode");
    Rng rng(mix_seed(seed_ ^ 0x9e3779b97f4a7c15ull, grid_hash(g)));
    w.samples.resize(static_cast<size_t>(g.n_frames) * kFrame);
    for (auto& s : w.samples) s = rng.uniform_range(-0.1, 0.1);
    return w;
  }

 private:
  static constexpr uint32_t kFrame = 320;
  static constexpr uint32_t kBooks = 8;
  static constexpr uint32_t kBook = 1024;

  static CodecDescriptor make_descriptor() {
    CodecDescriptor d;
    d.name = "random";
    d.feature_type = FeatureType::kAcoustic;
    d.sample_rate = 16000;
    d.token_rate = Rational{16000, kFrame}.reduced();
    d.n_codebooks = kBooks;
    d.codebook_sizes.assign(kBooks, kBook);
    return d;
  }

  uint64_t seed_;
};

}  // namespace

std::unique_ptr<CodecAdapter> external_codec(const std::string& dir,
                                             const CodecDescriptor& descriptor) {
  return std::make_unique<ExternalCodec>(dir, descriptor);
}

std::unique_ptr<CodecAdapter> external_codec(const std::string& dir) {
  return std::make_unique<ExternalCodec>(dir,
                                         load_descriptor(dir + "/descriptor.json"));
}

std::unique_ptr<CodecAdapter> identity_codec(uint32_t frame_len) {
  return std::make_unique<IdentityCodec>(frame_len);
}

std::unique_ptr<CodecAdapter> random_codec(uint64_t seed) {
  return std::make_unique<RandomCodec>(seed);
}

}  // namespace acb
