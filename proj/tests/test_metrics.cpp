//------------------------------------------------------------------------------
//
//   Copyright 2026 The mtro Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mtro/metrics.hpp"
#include "mtro/rng.hpp"
#include "oracles.hpp"

using namespace mtro;

namespace {

struct PublishedRow {
  std::string game;
  std::string method;
  double raw_mean;
  double hns_mean;
};

std::vector<PublishedRow> load_published(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<PublishedRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("game,", 0) == 0) continue;
    std::istringstream row(line);
    PublishedRow r;
    std::string cell;
    std::getline(row, r.game, ',');
    std::getline(row, r.method, ',');
    std::getline(row, cell, ',');
    r.raw_mean = std::stod(cell);
    std::getline(row, cell, ',');
    r.hns_mean = std::stod(cell);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

TEST_CASE("hns fixed points and errors") {
  BaselineScores baselines{{"g", {100.0, 500.0}}};
  CHECK(hns(500.0, baselines, "g") == 1.0);
  CHECK(hns(100.0, baselines, "g") == 0.0);
  CHECK(hns(300.0, baselines, "g") == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(hns(1.0, baselines, "missing"), Error);
  BaselineScores degenerate{{"g", {5.0, 5.0}}};
  CHECK_THROWS_AS(hns(1.0, degenerate, "g"), Error);
}

TEST_CASE("hns is invariant under common positive affine rescaling") {
  BaselineScores baselines{{"g", {37.0, 412.0}}};
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    double score = rng.next_double() * 1000.0 - 200.0;
    double a = rng.next_double() * 10.0 + 0.1;
    double b = rng.next_double() * 100.0 - 50.0;
    BaselineScores scaled{{"g", {a * 37.0 + b, a * 412.0 + b}}};
    CHECK(std::abs(hns(score, baselines, "g") -
                   hns(a * score + b, scaled, "g")) < 1e-12);
  }
}

TEST_CASE("iqm trimming rule") {
  CHECK(iqm({1, 2, 3, 4}) == 2.5);
  CHECK(iqm({5, 5, 5, 5, 5}) == 5.0);
  CHECK(iqm({0, 1, 2, 3, 4, 5, 6, 100}) == 3.5);  // drop {0,1} and {6,100}
  CHECK(iqm({7}) == 7.0);                         // n < 4: plain mean
  CHECK(iqm({1, 2, 3}) == 2.0);
  CHECK_THROWS_AS(iqm({}), Error);
}

TEST_CASE("iqm is permutation invariant and bounded by the extremes") {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 1 + rng.next_below(50);
    std::vector<double> values(n);
    for (double& v : values) v = rng.next_double() * 100.0 - 50.0;
    double base = iqm(values);
    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());
    CHECK(base >= lo);
    CHECK(base <= hi);
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[rng.next_below(i)]);
    }
    CHECK(iqm(values) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("game comparison thresholds") {
  std::map<std::string, double> base{{"a", 1.0}};
  CHECK(compare_games(base, {{"a", 1.15}}, 0.10).improved == 1);
  CHECK(compare_games(base, {{"a", 0.95}}, 0.10).improved == 0);
  CHECK(compare_games(base, {{"a", 0.95}}, 0.10).declined == 0);
  CHECK(compare_games(base, {{"a", 0.85}}, 0.10).declined == 1);

  // near-zero baselines switch to the absolute difference
  std::map<std::string, double> zero{{"a", 0.0}};
  auto counts = compare_games(zero, {{"a", 0.05}}, 0.10);
  CHECK(counts.improved == 0);
  CHECK(counts.declined == 0);
  CHECK(compare_games(zero, {{"a", 0.15}}, 0.10).improved == 1);

  // negative baselines: relative to |base|
  std::map<std::string, double> negative{{"a", -1.0}};
  CHECK(compare_games(negative, {{"a", -0.8}}, 0.10).improved == 1);

  auto same = compare_games({{"a", 1.0}, {"b", 2.0}}, {{"a", 1.0}, {"b", 2.0}}, 0.10);
  CHECK(same.improved == 0);
  CHECK(same.declined == 0);

  CHECK_THROWS_AS(compare_games(base, {{"b", 1.0}}, 0.10), Error);
  CHECK_THROWS_AS(compare_games(base, {{"a", 1.0}}, 0.0), Error);
}

TEST_CASE("report assembly: constant and identical-method cases") {
  BaselineScores baselines{{"g", {0.0, 10.0}}};
  std::vector<GameReport> reports{
      {"g", "base", {10, 10, 10, 10}},
      {"g", "cand", {10, 10, 10, 10}},
  };
  auto report = assemble_report(reports, baselines, "base");
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].mean_hns == 1.0);
  CHECK(report.rows[0].std_hns == 0.0);
  CHECK(report.rows[0].iqm_hns == 1.0);
  CHECK(report.rows[0].mean_raw == 10.0);
  REQUIRE(report.summaries.size() == 2);
  CHECK(report.summaries[1].method == "cand");
  CHECK(report.summaries[1].games_improved == 0);
  CHECK(report.summaries[1].games_declined == 0);
}

TEST_CASE("report assembly matches a spreadsheet oracle on a synthetic fixture") {
  BaselineScores baselines{
      {"g1", {0.0, 10.0}}, {"g2", {5.0, 25.0}}, {"g3", {-4.0, 4.0}}};
  std::map<std::string, std::map<std::string, std::vector<double>>> fixture{
      {"base",
       {{"g1", {1, 2, 3, 4, 5, 6, 7, 8}},
        {"g2", {10, 12, 14, 16, 18, 20, 22, 24}},
        {"g3", {-2, -1, 0, 1, 2, 3, 2, 1}}}},
      {"cand",
       {{"g1", {2, 3, 4, 5, 6, 7, 8, 9}},
        {"g2", {9, 11, 13, 15, 17, 19, 21, 23}},
        {"g3", {-2, -1, 0, 1, 2, 3, 2, 1}}}},
  };
  std::vector<GameReport> reports;
  for (const auto& [method, games] : fixture) {
    for (const auto& [game, scores] : games) {
      reports.push_back(GameReport{game, method, scores});
    }
  }
  auto report = assemble_report(reports, baselines, "base", 0.10);

  std::map<std::string, std::vector<double>> pooled;
  for (const ReportRow& row : report.rows) {
    const auto& scores = fixture[row.method][row.game_id];
    std::vector<double> hns_scores;
    for (double s : scores) hns_scores.push_back(hns(s, baselines, row.game_id));
    auto raw_stats = oracles::sheet_stats(scores);
    auto hns_stats = oracles::sheet_stats(hns_scores);
    CHECK(row.mean_raw == doctest::Approx(raw_stats.mean).epsilon(1e-12));
    CHECK(row.std_raw == doctest::Approx(raw_stats.stddev).epsilon(1e-12));
    CHECK(row.mean_hns == doctest::Approx(hns_stats.mean).epsilon(1e-12));
    CHECK(row.std_hns == doctest::Approx(hns_stats.stddev).epsilon(1e-12));
    CHECK(row.iqm_hns == doctest::Approx(hns_stats.iqm).epsilon(1e-12));
    auto& pool = pooled[row.method];
    pool.insert(pool.end(), hns_scores.begin(), hns_scores.end());
  }
  for (const MethodSummary& s : report.summaries) {
    CHECK(s.pooled_iqm == doctest::Approx(oracles::sheet_stats(pooled[s.method]).iqm)
                              .epsilon(1e-12));
    CHECK(s.games_improved + s.games_declined <= 3);
  }
}

TEST_CASE("report assembly rejects inconsistent trial counts and rosters") {
  BaselineScores baselines{{"g1", {0.0, 10.0}}, {"g2", {0.0, 10.0}}};
  CHECK_THROWS_AS(assemble_report({{"g1", "m", {1, 2}}, {"g1", "m2", {1}}}, baselines, "m"),
                  Error);
  CHECK_THROWS_AS(assemble_report({{"g1", "m", {1}}, {"g1", "m", {1}}}, baselines, "m"),
                  Error);
  CHECK_THROWS_AS(
      assemble_report({{"g1", "m", {1}}, {"g2", "m2", {1}}}, baselines, "m"), Error);
  CHECK_THROWS_AS(assemble_report({{"g1", "m", {1}}}, baselines, "other"), Error);
  CHECK_THROWS_AS(assemble_report({}, baselines, "m"), Error);
}

TEST_CASE("published scores reproduce from raw means and shipped baselines") {
  BaselineScores baselines =
      load_baselines_csv(std::string(MTRO_DATA_DIR) + "/atari_baselines.csv");
  auto rows = load_published(std::string(MTRO_DATA_DIR) + "/atari_published_scores.csv");
  REQUIRE(baselines.size() == 39);
  REQUIRE(rows.size() == 39 * 5);

  std::set<std::string> games_checked;
  for (const PublishedRow& row : rows) {
    double computed = hns(row.raw_mean, baselines, row.game);
    CAPTURE(row.game);
    CAPTURE(row.method);
    CHECK(std::abs(computed - row.hns_mean) <= 0.005);
    games_checked.insert(row.game);
  }
  CHECK(games_checked.size() >= 5);
}

TEST_CASE("toy baselines are complete and non-degenerate") {
  BaselineScores baselines = toy_baselines();
  for (const char* game : {"corridor", "gamble", "sparse_goal"}) {
    REQUIRE(baselines.count(game) == 1);
    CHECK(baselines[game].score_human > baselines[game].score_random);
  }
}
