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

#include <cmath>
#include <limits>

#include "acb/analysis.hpp"
#include "acb/error.hpp"
#include "doctest.h"

using namespace acb;

TEST_CASE("pearson hand case and invariances") {
  CHECK(pearson({1, 2, 3, 4}, {2, 1, 4, 3}) ==
        doctest::Approx(0.6).epsilon(1e-12));
  CHECK(pearson({1, 2, 3}, {1, 2, 3}) == doctest::Approx(1.0));
  CHECK(pearson({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));

  // Affine maps with positive slope leave r unchanged; negative flips it.
  std::vector<double> x = {0.3, 1.7, 2.2, 5.1, 4.4};
  std::vector<double> y = {1.1, 0.4, 2.8, 3.0, 2.6};
  double r = pearson(x, y);
  std::vector<double> y2;
  for (double v : y) y2.push_back(3.5 * v - 7.0);
  CHECK(pearson(x, y2) == doctest::Approx(r).epsilon(1e-12));
  std::vector<double> y3;
  for (double v : y) y3.push_back(-2.0 * v + 1.0);
  CHECK(pearson(x, y3) == doctest::Approx(-r).epsilon(1e-12));

  CHECK(std::fabs(pearson(x, y)) <= 1.0);
  CHECK_THROWS_AS(pearson({1, 2}, {1}), ValidationError);
  CHECK_THROWS_AS(pearson({1}, {1}), ValidationError);
  CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), ValidationError);
}

TEST_CASE("metric ids parse from the right") {
  MetricId a = parse_metric_id("recon/speech/stoi");
  CHECK(a.task == "recon");
  CHECK(a.dataset_type == "speech");
  CHECK(a.name == "stoi");

  MetricId b = parse_metric_id("speech/stoi");
  CHECK(b.task.empty());
  CHECK(b.dataset_type == "speech");
  CHECK(b.name == "stoi");

  MetricId c = parse_metric_id("stoi");
  CHECK(c.task.empty());
  CHECK(c.dataset_type.empty());
  CHECK(c.name == "stoi");

  MetricId d = parse_metric_id("probe/sound/tones_acc/extra");
  CHECK(d.task == "probe");
  CHECK(d.dataset_type == "sound");
  CHECK(d.name == "tones_acc/extra");
}

TEST_CASE("metric table guards duplicates and non-finite values") {
  MetricTable t;
  t.set("alpha", "recon/speech/stoi", 0.9);
  CHECK(t.has("alpha", "recon/speech/stoi"));
  CHECK(t.get("alpha", "recon/speech/stoi") == 0.9);
  CHECK_FALSE(t.has("alpha", "recon/speech/mcd"));
  CHECK_THROWS_AS(t.set("alpha", "recon/speech/stoi", 0.8), ValidationError);
  CHECK_THROWS_AS(
      t.set("beta", "x", std::numeric_limits<double>::quiet_NaN()),
      ValidationError);
  CHECK_THROWS_AS(t.get("beta", "x"), ValidationError);
  CHECK_THROWS_AS(t.set("", "x", 1.0), ValidationError);

  t.set("beta", "ppl/speech/overall", 900.0);
  CHECK(t.codecs() == std::vector<std::string>{"alpha", "beta"});
  auto m = t.metrics();
  CHECK(m == std::vector<std::string>{"ppl/speech/overall",
                                      "recon/speech/stoi"});
}

TEST_CASE("correlation matches metrics to their own dataset type") {
  MetricTable t;
  const char* codecs[] = {"c1", "c2", "c3", "c4"};
  double ppl_speech[] = {100, 200, 300, 400};
  double ppl_music[] = {50, 60, 70, 80};
  double stoi[] = {0.9, 0.8, 0.7, 0.6};       // perfectly anti-ordered
  double music_acc[] = {0.1, 0.3, 0.2, 0.4};  // correlates with music ppl
  for (int i = 0; i < 4; ++i) {
    t.set(codecs[i], "ppl/speech/overall", ppl_speech[i]);
    t.set(codecs[i], "ppl/music/overall", ppl_music[i]);
    t.set(codecs[i], "recon/speech/stoi", stoi[i]);
    t.set(codecs[i], "probe/music/genre_acc", music_acc[i]);
  }
  CorrelationReport rep = correlate_against_ppl(t);
  REQUIRE(rep.rows.size() == 2);

  // Sorted by |r| descending: stoi is exactly -1.
  CHECK(rep.rows[0].metric == "recon/speech/stoi");
  CHECK(rep.rows[0].r == doctest::Approx(-1.0));
  CHECK(rep.rows[0].n == 4);
  CHECK(rep.rows[0].task == "recon");
  CHECK(rep.rows[0].dataset_type == "speech");

  CHECK(rep.rows[1].metric == "probe/music/genre_acc");
  CHECK(rep.rows[1].r ==
        doctest::Approx(pearson({50, 60, 70, 80}, {0.1, 0.3, 0.2, 0.4})));
}

TEST_CASE("correlation falls back to a single anchor type") {
  MetricTable t;
  for (int i = 0; i < 3; ++i) {
    std::string c = "c" + std::to_string(i);
    t.set(c, "ppl/speech/overall", 100.0 + i);
    t.set(c, "idsens/sound/mrc", 0.5 + 0.1 * i);
  }
  CorrelationReport rep = correlate_against_ppl(t);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].metric == "idsens/sound/mrc");
  CHECK(rep.rows[0].r == doctest::Approx(1.0));
}

TEST_CASE("correlation skips anchorless types when several anchors exist") {
  MetricTable t;
  for (int i = 0; i < 3; ++i) {
    std::string c = "c" + std::to_string(i);
    t.set(c, "ppl/speech/overall", 100.0 + i);
    t.set(c, "ppl/music/overall", 50.0 + i);
    t.set(c, "probe/sound/acc", 0.5 + 0.1 * i);
    t.set(c, "recon/speech/stoi", 0.9 - 0.1 * i);
  }
  CorrelationReport rep = correlate_against_ppl(t);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].metric == "recon/speech/stoi");
  REQUIRE(rep.notes.size() == 1);
  CHECK(rep.notes[0].find("probe/sound/acc") != std::string::npos);
  CHECK(rep.notes[0].find("no perplexity anchor") != std::string::npos);
}

TEST_CASE("pairwise deletion reports the contributing codec count") {
  MetricTable t;
  for (int i = 0; i < 5; ++i) {
    std::string c = "c" + std::to_string(i);
    t.set(c, "ppl/speech/overall", 100.0 + 10.0 * i);
    if (i != 2) t.set(c, "recon/speech/mcd", 3.0 + 0.2 * i);
  }
  CorrelationReport rep = correlate_against_ppl(t);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].n == 4);
  bool noted = false;
  for (const auto& n : rep.notes)
    noted = noted || n.find("1 codec(s) missing") != std::string::npos;
  CHECK(noted);
}

TEST_CASE("insufficient overlap is skipped with a note or rejected") {
  MetricTable t;
  t.set("c1", "ppl/speech/overall", 100.0);
  t.set("c2", "ppl/speech/overall", 200.0);
  t.set("c1", "recon/speech/stoi", 0.9);  // only one shared codec
  t.set("c1", "recon/speech/mcd", 3.0);
  t.set("c2", "recon/speech/mcd", 4.0);
  CorrelationReport rep = correlate_against_ppl(t);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].metric == "recon/speech/mcd");
  bool noted = false;
  for (const auto& n : rep.notes)
    noted = noted || (n.find("recon/speech/stoi") != std::string::npos &&
                      n.find("insufficient pairs") != std::string::npos);
  CHECK(noted);

  // When nothing overlaps at all the report is an error, not silence.
  MetricTable bare;
  bare.set("c1", "ppl/speech/overall", 100.0);
  bare.set("c1", "recon/speech/stoi", 0.9);
  bare.set("c2", "recon/speech/stoi", 0.8);
  CHECK_THROWS_AS(correlate_against_ppl(bare), ValidationError);
}

TEST_CASE("constant series carry a note instead of a row") {
  MetricTable t;
  for (int i = 0; i < 3; ++i) {
    std::string c = "c" + std::to_string(i);
    t.set(c, "ppl/speech/overall", 100.0 + i);
    t.set(c, "recon/speech/stoi", 0.5);
    t.set(c, "recon/speech/mcd", 3.0 + i);
  }
  CorrelationReport rep = correlate_against_ppl(t);
  REQUIRE(rep.rows.size() == 1);
  bool noted = false;
  for (const auto& n : rep.notes)
    noted = noted || (n.find("recon/speech/stoi") != std::string::npos &&
                      n.find("constant series") != std::string::npos);
  CHECK(noted);
}

TEST_CASE("report format conversions") {
  for (auto f : {ReportFormat::kCsv, ReportFormat::kJson,
                 ReportFormat::kMarkdown, ReportFormat::kSvg})
    CHECK(report_format_from_string(to_string(f)) == f);
  CHECK_THROWS_AS(report_format_from_string("pdf"), ValidationError);
}
