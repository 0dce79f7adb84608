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

#include "acb/edit_distance.hpp"

#include <algorithm>
#include <cctype>

#include "acb/error.hpp"

namespace acb {

namespace {

template <typename Seq>
size_t levenshtein(const Seq& a, const Seq& b) {
  size_t n = a.size(), m = b.size();
  if (n == 0) return m;
  if (m == 0) return n;
  std::vector<size_t> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = j;
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (size_t j = 1; j <= m; ++j) {
      size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace

size_t edit_distance(const std::vector<std::string>& ref,
                     const std::vector<std::string>& hyp) {
  return levenshtein(ref, hyp);
}

size_t edit_distance(const std::string& ref, const std::string& hyp) {
  return levenshtein(ref, hyp);
}

double wer(const std::vector<std::string>& ref,
           const std::vector<std::string>& hyp) {
  if (ref.empty()) throw ValidationError("wer: empty reference");
  return static_cast<double>(levenshtein(ref, hyp)) /
         static_cast<double>(ref.size());
}

double wer(const std::string& ref_text, const std::string& hyp_text) {
  return wer(split_words(normalize_text(ref_text)),
             split_words(normalize_text(hyp_text)));
}

double cer(const std::string& ref, const std::string& hyp) {
  std::string r = normalize_text(ref);
  std::string h = normalize_text(hyp);
  if (r.empty()) throw ValidationError("cer: empty reference");
  return static_cast<double>(levenshtein(r, h)) /
         static_cast<double>(r.size());
}

std::string normalize_text(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (unsigned char ch : s) {
    if (std::isspace(ch)) {
      if (!out.empty()) pending_space = true;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(ch)));
  }
  return out;
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> words;
  std::string cur;
  for (char ch : s) {
    if (ch == ' ') {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

}  // namespace acb
