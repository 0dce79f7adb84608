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

#include "acb/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "acb/error.hpp"
#include "acb/wav_io.hpp"
#include "json.hpp"

namespace acb {

namespace fs = std::filesystem;
using nlohmann::json;

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "valid") return Split::kValid;
  if (s == "test") return Split::kTest;
  throw ValidationError("unknown split: " + s);
}

std::string to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
  }
  throw ValidationError("unknown split");
}

std::string domain_bucket(const ManifestEntry& e) {
  return e.domain.empty() ? "all" : e.domain;
}

namespace {

const std::set<std::string> kDomains = {"speech", "music", "sound"};

}  // namespace

void Manifest::validate(bool check_files) const {
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (e.utt_id.empty()) throw ValidationError("manifest: empty utt_id");
    if (!seen.insert(e.utt_id).second)
      throw ValidationError("manifest: duplicate utt_id " + e.utt_id);
    if (!e.domain.empty() && !kDomains.count(e.domain))
      throw ValidationError("manifest: unknown domain '" + e.domain +
                            "' for " + e.utt_id);
    if (e.start_s < 0.0 || !std::isfinite(e.start_s))
      throw ValidationError("manifest: bad start_s for " + e.utt_id);
    if (e.duration_s && (!std::isfinite(*e.duration_s) || *e.duration_s <= 0))
      throw ValidationError("manifest: bad duration_s for " + e.utt_id);
    int label_kinds = (e.label ? 1 : 0) + (e.labels ? 1 : 0) +
                      (e.targets ? 1 : 0);
    if (label_kinds > 1)
      throw ValidationError("manifest: " + e.utt_id +
                            " mixes label kinds in one entry");
    if (check_files && !e.audio.empty()) {
      std::string p = resolve_path(dir, e.audio);
      if (!fs::exists(p))
        throw ValidationError("manifest: missing audio " + p + " for " +
                              e.utt_id);
    }
  }
}

const ManifestEntry& Manifest::at(const std::string& utt_id) const {
  for (const auto& e : entries)
    if (e.utt_id == utt_id) return e;
  throw ValidationError("manifest: no entry " + utt_id);
}

TrainSet Manifest::train_set() const {
  TrainSet out;
  for (const auto& e : entries)
    if (e.split == Split::kTrain) out.entries.push_back(&e);
  return out;
}

EvalSet Manifest::valid_set() const {
  EvalSet out;
  out.split = Split::kValid;
  for (const auto& e : entries)
    if (e.split == Split::kValid) out.entries.push_back(&e);
  return out;
}

EvalSet Manifest::test_set() const {
  EvalSet out;
  out.split = Split::kTest;
  for (const auto& e : entries)
    if (e.split == Split::kTest) out.entries.push_back(&e);
  return out;
}

std::vector<const ManifestEntry*> Manifest::all() const {
  std::vector<const ManifestEntry*> out;
  for (const auto& e : entries) out.push_back(&e);
  return out;
}

std::vector<std::string> Manifest::domains() const {
  std::set<std::string> buckets;
  for (const auto& e : entries) buckets.insert(domain_bucket(e));
  return {buckets.begin(), buckets.end()};
}

std::string resolve_path(const std::string& dir, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute() || dir.empty()) return path;
  return (fs::path(dir) / p).string();
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + path);
  Manifest m;
  m.dir = fs::path(path).parent_path().string();
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Tolerate CRLF manifests.
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& ex) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": " +
                            ex.what());
    }
    try {
      ManifestEntry e;
      e.utt_id = j.at("utt_id").get<std::string>();
      if (j.contains("audio")) e.audio = j["audio"].get<std::string>();
      if (j.contains("split"))
        e.split = split_from_string(j["split"].get<std::string>());
      if (j.contains("domain")) e.domain = j["domain"].get<std::string>();
      if (j.contains("transcript"))
        e.transcript = j["transcript"].get<std::string>();
      if (j.contains("label")) e.label = j["label"].get<uint32_t>();
      if (j.contains("labels"))
        e.labels = j["labels"].get<std::vector<uint8_t>>();
      if (j.contains("targets"))
        e.targets = j["targets"].get<std::vector<double>>();
      if (j.contains("start_s")) e.start_s = j["start_s"].get<double>();
      if (j.contains("duration_s"))
        e.duration_s = j["duration_s"].get<double>();
      m.entries.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": " +
                            ex.what());
    }
  }
  return m;
}

void save_manifest(const Manifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest " + path);
  for (const auto& e : m.entries) {
    nlohmann::ordered_json j;
    j["utt_id"] = e.utt_id;
    if (!e.audio.empty()) j["audio"] = e.audio;
    j["split"] = to_string(e.split);
    if (!e.domain.empty()) j["domain"] = e.domain;
    if (e.transcript) j["transcript"] = *e.transcript;
    if (e.label) j["label"] = *e.label;
    if (e.labels) j["labels"] = *e.labels;
    if (e.targets) j["targets"] = *e.targets;
    if (e.start_s != 0.0) j["start_s"] = e.start_s;
    if (e.duration_s) j["duration_s"] = *e.duration_s;
    out << j.dump() << "\n";
  }
  if (!out) throw IoError("short write to manifest " + path);
}

Waveform load_entry_audio(const Manifest& m, const ManifestEntry& e) {
  if (e.audio.empty())
    throw ValidationError("manifest: entry " + e.utt_id + " has no audio");
  Waveform w = read_wav(resolve_path(m.dir, e.audio));
  if (e.start_s == 0.0 && !e.duration_s) return w;
  size_t begin = static_cast<size_t>(
      std::llround(e.start_s * static_cast<double>(w.sample_rate)));
  if (begin >= w.samples.size())
    throw ValidationError("manifest: clip window past end of audio for " +
                          e.utt_id);
  size_t end = w.samples.size();
  if (e.duration_s) {
    size_t n = static_cast<size_t>(std::llround(
        *e.duration_s * static_cast<double>(w.sample_rate)));
    end = std::min(end, begin + n);
  }
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.assign(w.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                     w.samples.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

}  // namespace acb
