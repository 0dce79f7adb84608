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
#include "acb/error.hpp"
#include "acb/id_sensitivity.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace acb;

TEST_CASE("ols_slope hand cases") {
  CHECK(ols_slope({1, 2, 3, 4}, {3, 5, 7, 9}) == doctest::Approx(2.0));
  CHECK(ols_slope({1, 2, 3}, {5, 5, 5}) == doctest::Approx(0.0));
  CHECK(ols_slope({1}, {2}) == 0.0);
  CHECK(ols_slope({}, {}) == 0.0);
}

TEST_CASE("identity codec multi-round curves are flat at 1") {
  auto codec = identity_codec(64);
  Waveform w = acbtest::white_noise(0.5, 16000, 3);
  auto curves = multi_round(*codec, w, 5);
  REQUIRE(curves.size() == 1);
  CHECK(curves[0].codebook_index == 0);
  REQUIRE(curves[0].ratios.size() == 4);  // rounds 2..5
  for (double r : curves[0].ratios) CHECK(r == 1.0);
  CHECK(curves[0].slope == 0.0);
  CHECK(curves[0].n_compared == w.samples.size() / 64);
}

TEST_CASE("random codec multi-round ratios hover near chance") {
  auto codec = random_codec(5);
  Waveform w = acbtest::white_noise(4.0, 16000, 7);
  auto curves = multi_round(*codec, w, 3);
  REQUIRE(curves.size() == 8);
  // 200 frames per comparison; chance level is 1/1024. A loose band is
  // enough here; the acceptance suite does the statistics properly.
  for (const auto& c : curves) {
    REQUIRE(c.ratios.size() == 2);
    for (double r : c.ratios) CHECK(r < 0.05);
  }
}

TEST_CASE("zero shift compares a signal against itself") {
  auto codec = random_codec(9);
  Waveform w = acbtest::white_noise(2.0, 16000, 11);
  auto bars = time_shift_eval(*codec, w, 0.0);
  REQUIRE(bars.size() == 8);
  for (const auto& b : bars) {
    CHECK(b.ratio == 1.0);
    CHECK(b.shift_ms == 0.0);
  }
}

TEST_CASE("the default shift is 2 ms") {
  auto codec = identity_codec(64);
  Waveform w = acbtest::white_noise(0.5, 16000, 13);
  auto bars = time_shift_eval(*codec, w);
  REQUIRE(bars.size() == 1);
  CHECK(bars[0].shift_ms == 2.0);
}

TEST_CASE("identity codec flips every id under a one-frame shift") {
  // 64 samples at 16 kHz is 4 ms. Shifted frames carry new sample bytes, so
  // the registry assigns fresh indices everywhere.
  auto codec = identity_codec(64);
  Waveform w = acbtest::white_noise(0.5, 16000, 17);
  auto bars = time_shift_eval(*codec, w, 4.0);
  REQUIRE(bars.size() == 1);
  CHECK(bars[0].ratio == 0.0);
  CHECK(bars[0].shift_ms == 4.0);
}

TEST_CASE("multi_round needs at least two rounds") {
  auto codec = identity_codec(64);
  Waveform w = acbtest::white_noise(0.25, 16000, 19);
  CHECK_THROWS_AS(multi_round(*codec, w, 1), ValidationError);
}

TEST_CASE("aggregation averages per utterance or pools by frame count") {
  StabilityCurve a;
  a.codebook_index = 0;
  a.ratios = {1.0, 1.0};
  a.n_compared = 10;
  StabilityCurve b;
  b.codebook_index = 0;
  b.ratios = {0.5, 0.3};
  b.n_compared = 30;

  auto mean = aggregate_stability({{a}, {b}}, false);
  REQUIRE(mean.size() == 1);
  CHECK(mean[0].ratios[0] == doctest::Approx(0.75));
  CHECK(mean[0].ratios[1] == doctest::Approx(0.65));
  CHECK(mean[0].n_compared == 40);

  auto pooled = aggregate_stability({{a}, {b}}, true);
  CHECK(pooled[0].ratios[0] == doctest::Approx((1.0 * 10 + 0.5 * 30) / 40.0));
  CHECK(pooled[0].ratios[1] == doctest::Approx((1.0 * 10 + 0.3 * 30) / 40.0));

  // Slope is recomputed on the aggregated curve.
  CHECK(mean[0].slope ==
        doctest::Approx(ols_slope({2.0, 3.0}, {0.75, 0.65})));
}

TEST_CASE("shift aggregation mirrors the stability rules") {
  ShiftStability a{0, 1.0, 2.0, 10};
  ShiftStability b{0, 0.5, 2.0, 30};
  auto mean = aggregate_shift({{a}, {b}}, false);
  REQUIRE(mean.size() == 1);
  CHECK(mean[0].ratio == doctest::Approx(0.75));
  auto pooled = aggregate_shift({{a}, {b}}, true);
  CHECK(pooled[0].ratio == doctest::Approx(0.625));
  CHECK(pooled[0].shift_ms == 2.0);
}
