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

#include "acb/recon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "acb/error.hpp"
#include "binio.hpp"

namespace acb {

namespace {

constexpr double kSnrCapDb = 100.0;
constexpr uint32_t kMelRate = 16000;
constexpr size_t kMelFrame = 512;
constexpr size_t kMelHop = 128;
constexpr size_t kMelBands = 40;
constexpr size_t kCepstra = 13;

FrameMatrix mel_cepstra_16k(const Waveform& w) {
  Waveform x = w.sample_rate == kMelRate ? w : resample(w, kMelRate);
  FrameMatrix spec = stft(x, kMelFrame, kMelHop, Window::kHann);
  FrameMatrix mel = log_mel(spec, kMelBands, 0.0, kMelRate / 2.0, kMelRate);
  return cepstra(mel, kCepstra, 1);
}

}  // namespace

double si_snr(const Waveform& ref, const Waveform& deg) {
  ref.validate();
  deg.validate();
  size_t len = std::min(ref.samples.size(), deg.samples.size());
  if (len == 0) throw ValidationError("si_snr: empty input");
  double mr = 0.0, md = 0.0;
  for (size_t i = 0; i < len; ++i) {
    mr += ref.samples[i];
    md += deg.samples[i];
  }
  mr /= static_cast<double>(len);
  md /= static_cast<double>(len);
  double dot = 0.0, rr = 0.0;
  for (size_t i = 0; i < len; ++i) {
    double r = ref.samples[i] - mr;
    double d = deg.samples[i] - md;
    dot += d * r;
    rr += r * r;
  }
  if (rr == 0.0) throw ValidationError("si_snr: all-zero reference");
  double scale = dot / rr;
  double sig = 0.0, err = 0.0;
  for (size_t i = 0; i < len; ++i) {
    double r = ref.samples[i] - mr;
    double d = deg.samples[i] - md;
    double s = scale * r;
    sig += s * s;
    double e = d - s;
    err += e * e;
  }
  if (err <= 0.0) return kSnrCapDb;
  if (sig <= 0.0) return -kSnrCapDb;
  double v = 10.0 * std::log10(sig / err);
  return std::clamp(v, -kSnrCapDb, kSnrCapDb);
}

double mcd_from_cepstra(const FrameMatrix& ref, const FrameMatrix& deg) {
  if (ref.n_bins != deg.n_bins)
    throw ValidationError("mcd: cepstral dimensions differ");
  size_t n = std::min(ref.n_frames, deg.n_frames);
  if (n == 0) throw ValidationError("mcd: too short for one frame");
  double total = 0.0;
  for (size_t t = 0; t < n; ++t) {
    double s = 0.0;
    for (size_t b = 0; b < ref.n_bins; ++b) {
      double d = ref.at(t, b) - deg.at(t, b);
      s += d * d;
    }
    total += std::sqrt(s);
  }
  double k = 10.0 * std::sqrt(2.0) / std::log(10.0);
  return k * total / static_cast<double>(n);
}

double mcd(const Waveform& ref, const Waveform& deg) {
  return mcd_from_cepstra(mel_cepstra_16k(ref), mel_cepstra_16k(deg));
}

double cosine_similarity(const std::vector<double>& a,
                         const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty())
    throw ValidationError("cosine: dimension mismatch or empty vectors");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0)
    throw ValidationError("cosine: zero-norm vector");
  return dot / std::sqrt(na * nb);
}

std::vector<double> speaker_embedding(const Waveform& w) {
  w.validate();
  if (w.duration_s() < 1.0)
    throw ValidationError("speaker_embedding: input shorter than 1 s");
  Waveform x = w.sample_rate == kMelRate ? w : resample(w, kMelRate);
  FrameMatrix spec = stft(x, kMelFrame, kMelHop, Window::kHann);
  FrameMatrix mel = log_mel(spec, kMelBands, 0.0, kMelRate / 2.0, kMelRate);
  std::vector<double> emb(2 * kMelBands, 0.0);
  for (size_t t = 0; t < mel.n_frames; ++t)
    for (size_t b = 0; b < kMelBands; ++b) emb[b] += mel.at(t, b);
  double inv = 1.0 / static_cast<double>(mel.n_frames);
  for (size_t b = 0; b < kMelBands; ++b) emb[b] *= inv;
  for (size_t t = 0; t < mel.n_frames; ++t)
    for (size_t b = 0; b < kMelBands; ++b) {
      double d = mel.at(t, b) - emb[b];
      emb[kMelBands + b] += d * d;
    }
  for (size_t b = 0; b < kMelBands; ++b)
    emb[kMelBands + b] = std::sqrt(emb[kMelBands + b] * inv);
  return emb;
}

double spk_sim(const Waveform& ref, const Waveform& deg) {
  return cosine_similarity(speaker_embedding(ref), speaker_embedding(deg));
}

std::map<std::string, std::string> read_transcripts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::map<std::string, std::string> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw IoError(path + ":" + std::to_string(line_no) +
                    ": expected '<utt_id>\\t<text>'");
    out[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return out;
}

std::vector<double> read_embedding(const std::string& path) {
  binio::Reader r(path);
  uint32_t n = r.u32();
  std::vector<double> v(n);
  for (auto& x : v) x = static_cast<double>(r.f32());
  if (!r.at_eof()) throw IoError(path + ": trailing bytes after embedding");
  return v;
}

void write_embedding(const std::vector<double>& v, const std::string& path) {
  binio::Writer w(path);
  w.u32(static_cast<uint32_t>(v.size()));
  for (double x : v) w.f32(static_cast<float>(x));
  w.close();
}

std::map<std::string, double> read_pesq_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::map<std::string, double> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw IoError(path + ":" + std::to_string(line_no) +
                    ": expected 'utt_id,pesq'");
    std::string id = line.substr(0, comma);
    std::string val = line.substr(comma + 1);
    if (line_no == 1 && (id == "utt_id" || id == "id")) continue;
    try {
      out[id] = std::stod(val);
    } catch (const std::exception&) {
      throw IoError(path + ":" + std::to_string(line_no) +
                    ": bad PESQ value '" + val + "'");
    }
  }
  return out;
}

}  // namespace acb
