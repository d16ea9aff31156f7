#pragma once
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

#include <map>
#include <string>
#include <vector>

#include "mtro/errors.hpp"

namespace mtro {

struct BaselineEntry {
  double score_random = 0.0;
  double score_human = 0.0;
};

/// Per-game anchors for human-normalized scoring.
using BaselineScores = std::map<std::string, BaselineEntry>;

/// (score - random) / (human - random). Throws MissingBaseline when the game
/// has no anchors, DegenerateBaseline when human == random.
double hns(double score, const BaselineScores& baselines, const std::string& game);

/// Interquartile mean: sort, drop floor(n/4) from each end, average the rest.
/// For n < 4 nothing is trimmed. Throws EmptyAggregate on an empty list.
double iqm(std::vector<double> values);

struct CompareCounts {
  int improved = 0;
  int declined = 0;
};

/// Count games whose candidate metric lies more than `threshold` (relative)
/// above or below the baseline metric. Near-zero baselines (|base| < 1e-6)
/// compare the absolute difference against the threshold instead.
CompareCounts compare_games(const std::map<std::string, double>& baseline,
                            const std::map<std::string, double>& candidate,
                            double threshold);

/// Raw trial scores of one (game, method) cell.
struct GameReport {
  std::string game_id;
  std::string method;
  std::vector<double> scores;
};

struct ReportRow {
  std::string game_id;
  std::string method;
  double mean_hns = 0.0;
  double std_hns = 0.0;
  double iqm_hns = 0.0;
  double mean_raw = 0.0;
  double std_raw = 0.0;
};

struct MethodSummary {
  std::string method;
  double pooled_iqm = 0.0;  // IQM over all game x trial HNS values
  int games_improved = 0;   // per-game IQM vs the designated baseline method
  int games_declined = 0;
};

struct AggregateReport {
  std::vector<ReportRow> rows;
  std::vector<MethodSummary> summaries;
  std::string baseline_method;
  double comparison_threshold = 0.10;
};

/// Build the full table: per-game mean +- std of HNS and raw scores, pooled
/// IQM per method, and improved/declined counts against `baseline_method`.
/// All methods must cover the same games with the same trial count.
AggregateReport assemble_report(const std::vector<GameReport>& reports,
                                const BaselineScores& baselines,
                                const std::string& baseline_method,
                                double threshold = 0.10);

/// Anchors for the toy suite: score_random is the Monte-Carlo mean return of
/// the uniform-random policy (1e5 episodes, fixed seed), score_human the value
/// iteration optimum. Precomputed constants, pinned by a regression test.
BaselineScores toy_baselines();

/// `game,score_random,score_human` rows, one per game.
BaselineScores load_baselines_csv(const std::string& path);

void write_report_csv(const AggregateReport& report, const std::string& path);
void write_summary_csv(const AggregateReport& report, const std::string& path);

}  // namespace mtro
