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

#ifndef ACBENCH_ACB_MANIFEST_HPP_
#define ACBENCH_ACB_MANIFEST_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "acb/waveform.hpp"

namespace acb {

enum class Split : uint8_t { kTrain, kValid, kTest };
Split split_from_string(const std::string& s);
std::string to_string(Split s);

// One dataset row. Paths are relative to the manifest file's directory
// unless absolute. start_s/duration_s carve a clip out of a longer file,
// so corpora stack many short examples into one recording.
struct ManifestEntry {
  std::string utt_id;
  std::string audio;  // empty for token-only datasets
  Split split = Split::kTrain;
  std::string domain;  // speech | music | sound | empty
  std::optional<std::string> transcript;
  std::optional<uint32_t> label;                // multiclass index
  std::optional<std::vector<uint8_t>> labels;   // multilabel bitset
  std::optional<std::vector<double>> targets;   // regression vector
  double start_s = 0.0;
  std::optional<double> duration_s;
};

// Train rows carry their own type so evaluation-only splits cannot slip
// into training code paths.
struct TrainSet {
  std::vector<const ManifestEntry*> entries;
};
struct EvalSet {
  Split split = Split::kValid;
  std::vector<const ManifestEntry*> entries;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  std::string dir;  // directory the manifest was loaded from

  // Unique ids, known splits and domains, sane clip windows. When
  // check_files is set every non-empty audio path must exist.
  void validate(bool check_files = true) const;
  const ManifestEntry& at(const std::string& utt_id) const;
  TrainSet train_set() const;
  EvalSet valid_set() const;
  EvalSet test_set() const;
  std::vector<const ManifestEntry*> all() const;
  // Sorted distinct domains, with "all" standing in for unset ones.
  std::vector<std::string> domains() const;
};

// Bucket name used in metric ids for an entry without a domain.
std::string domain_bucket(const ManifestEntry& e);

// JSON Lines, one object per row. Keys: utt_id, audio, split, domain,
// transcript, label, labels, targets, start_s, duration_s.
Manifest load_manifest(const std::string& path);
void save_manifest(const Manifest& m, const std::string& path);

std::string resolve_path(const std::string& dir, const std::string& path);

// Reads the entry's audio and applies its clip window.
Waveform load_entry_audio(const Manifest& m, const ManifestEntry& e);

}  // namespace acb

#endif  // ACBENCH_ACB_MANIFEST_HPP_
