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

#ifndef ACBENCH_ACB_RECON_HPP_
#define ACBENCH_ACB_RECON_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acb/dsp.hpp"
#include "acb/waveform.hpp"

namespace acb {

struct ReconMetrics {
  double stoi = 0.0;         // in [-1, 1]
  double si_snr_db = 0.0;    // capped to [-100, 100]
  double mcd = 0.0;          // dB, >= 0
  std::optional<double> wer_gt, wer_rec, cer_gt, cer_rec;
  std::optional<double> spk_sim;  // in [-1, 1]
  std::optional<double> external_pesq;
};

// Short-time objective intelligibility. Both signals are resampled to
// 10 kHz and truncated to the shorter; frames 40 dB below the loudest
// reference frame are removed from both. Needs >= 30 surviving frames
// (about 384 ms).
double stoi(const Waveform& ref, const Waveform& deg);

// Scale-invariant SNR in dB after projecting deg onto ref, capped to
// [-100, 100]. Throws on an all-zero reference.
double si_snr(const Waveform& ref, const Waveform& deg);

// Mel-cepstral distortion over 13 cepstra (c1..c13) of a 40-band log-mel,
// frames aligned index-wise; both signals are resampled to 16 kHz.
double mcd(const Waveform& ref, const Waveform& deg);

// MCD from precomputed cepstral frames: (10/ln 10) * sqrt(2) * mean ||diff||.
double mcd_from_cepstra(const FrameMatrix& ref, const FrameMatrix& deg);

double cosine_similarity(const std::vector<double>& a,
                         const std::vector<double>& b);

// Per-band mean and standard deviation of a 40-band log-mel over time; used
// as the baseline speaker embedding. Inputs must be >= 1 s.
std::vector<double> speaker_embedding(const Waveform& w);
double spk_sim(const Waveform& ref, const Waveform& deg);

// UTF-8 lines of "<utt_id>\t<text>".
std::map<std::string, std::string> read_transcripts(const std::string& path);

// float32 vector with a u32 length prefix, little-endian.
std::vector<double> read_embedding(const std::string& path);
void write_embedding(const std::vector<double>& v, const std::string& path);

// CSV lines "utt_id,pesq" with an optional header line.
std::map<std::string, double> read_pesq_csv(const std::string& path);

}  // namespace acb

#endif  // ACBENCH_ACB_RECON_HPP_
