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

#ifndef ACBENCH_ACB_RATIONAL_HPP_
#define ACBENCH_ACB_RATIONAL_HPP_

#include <cstdint>
#include <numeric>

namespace acb {

// Exact frame/token rate carrier (frames per second = num/den).
struct Rational {
  uint32_t num = 0;
  uint32_t den = 1;

  double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / den; }

  Rational reduced() const {
    if (num == 0 || den == 0) return {num, den == 0 ? 1u : den};
    uint32_t g = std::gcd(num, den);
    return {num / g, den / g};
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    // Compare as reduced fractions so 75/1 == 150/2.
    return static_cast<uint64_t>(a.num) * b.den == static_cast<uint64_t>(b.num) * a.den;
  }
};

}  // namespace acb

#endif  // ACBENCH_ACB_RATIONAL_HPP_
