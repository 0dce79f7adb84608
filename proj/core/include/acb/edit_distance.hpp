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

#ifndef ACBENCH_ACB_EDIT_DISTANCE_HPP_
#define ACBENCH_ACB_EDIT_DISTANCE_HPP_

#include <cstddef>
#include <string>
#include <vector>

namespace acb {

// Minimal number of substitutions, deletions and insertions (unit costs)
// turning ref into hyp.
size_t edit_distance(const std::vector<std::string>& ref,
                     const std::vector<std::string>& hyp);
size_t edit_distance(const std::string& ref, const std::string& hyp);

// (S + D + I) / len(ref). Throws ValidationError on an empty reference.
double wer(const std::vector<std::string>& ref,
           const std::vector<std::string>& hyp);
double wer(const std::string& ref_text, const std::string& hyp_text);

// Character-level rate after case folding and collapsing whitespace runs to
// single spaces.
double cer(const std::string& ref, const std::string& hyp);

// Lowercases ASCII, trims, collapses whitespace runs to one space.
std::string normalize_text(const std::string& s);

std::vector<std::string> split_words(const std::string& s);

}  // namespace acb

#endif  // ACBENCH_ACB_EDIT_DISTANCE_HPP_
