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

#include "mtro/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace mtro {

double hns(double score, const BaselineScores& baselines, const std::string& game) {
  auto it = baselines.find(game);
  if (it == baselines.end()) {
    throw Error(ErrorCode::kMissingBaseline, "no baseline scores for game '" + game + "'");
  }
  double denom = it->second.score_human - it->second.score_random;
  if (denom == 0.0) {
    throw Error(ErrorCode::kDegenerateBaseline,
                "human and random scores coincide for game '" + game + "'");
  }
  return (score - it->second.score_random) / denom;
}

double iqm(std::vector<double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::kEmptyAggregate, "IQM of an empty list");
  }
  std::sort(values.begin(), values.end());
  std::size_t trim = values.size() / 4;
  double sum = 0.0;
  for (std::size_t i = trim; i < values.size() - trim; ++i) sum += values[i];
  return sum / static_cast<double>(values.size() - 2 * trim);
}

CompareCounts compare_games(const std::map<std::string, double>& baseline,
                            const std::map<std::string, double>& candidate,
                            double threshold) {
  if (!(threshold > 0.0)) {
    throw Error(ErrorCode::kValidation, "comparison threshold must be > 0");
  }
  if (baseline.size() != candidate.size()) {
    throw Error(ErrorCode::kGameSetMismatch, "method game sets differ in size");
  }
  CompareCounts counts;
  for (const auto& [game, base] : baseline) {
    auto it = candidate.find(game);
    if (it == candidate.end()) {
      throw Error(ErrorCode::kGameSetMismatch, "candidate lacks game '" + game + "'");
    }
    double diff = it->second - base;
    double margin = std::abs(base) < 1e-6 ? diff : diff / std::abs(base);
    if (margin > threshold) {
      ++counts.improved;
    } else if (margin < -threshold) {
      ++counts.declined;
    }
  }
  return counts;
}

namespace {

struct MeanStd {
  double mean;
  double stddev;
};

MeanStd mean_std(const std::vector<double>& values) {
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  return {mean, std::sqrt(var)};
}

}  // namespace

AggregateReport assemble_report(const std::vector<GameReport>& reports,
                                const BaselineScores& baselines,
                                const std::string& baseline_method, double threshold) {
  if (reports.empty()) {
    throw Error(ErrorCode::kReportError, "no trial results to report");
  }
  // Game roster and trial count must agree across methods.
  std::map<std::string, std::set<std::string>> games_of_method;
  std::size_t trials = reports.front().scores.size();
  std::vector<std::string> method_order;
  std::vector<std::string> game_order;
  for (const GameReport& r : reports) {
    if (r.scores.empty() || r.scores.size() != trials) {
      throw Error(ErrorCode::kReportError,
                  "inconsistent trial counts: " + r.game_id + "/" + r.method);
    }
    if (!games_of_method[r.method].insert(r.game_id).second) {
      throw Error(ErrorCode::kReportError,
                  "duplicate cell " + r.game_id + "/" + r.method);
    }
    if (std::find(method_order.begin(), method_order.end(), r.method) ==
        method_order.end()) {
      method_order.push_back(r.method);
    }
    if (std::find(game_order.begin(), game_order.end(), r.game_id) ==
        game_order.end()) {
      game_order.push_back(r.game_id);
    }
  }
  for (const auto& [method, games] : games_of_method) {
    if (games != games_of_method.begin()->second) {
      throw Error(ErrorCode::kGameSetMismatch,
                  "method '" + method + "' covers a different game set");
    }
  }
  if (!games_of_method.count(baseline_method)) {
    throw Error(ErrorCode::kReportError,
                "baseline method '" + baseline_method + "' has no results");
  }

  AggregateReport out;
  out.baseline_method = baseline_method;
  out.comparison_threshold = threshold;

  std::map<std::string, std::vector<double>> pooled_hns;           // method -> all HNS
  std::map<std::string, std::map<std::string, double>> game_iqms;  // method -> game -> IQM

  for (const std::string& method : method_order) {
    for (const std::string& game : game_order) {
      auto rit = std::find_if(reports.begin(), reports.end(), [&](const GameReport& r) {
        return r.method == method && r.game_id == game;
      });
      const GameReport& r = *rit;
      std::vector<double> hns_scores(r.scores.size());
      for (std::size_t i = 0; i < r.scores.size(); ++i) {
        hns_scores[i] = hns(r.scores[i], baselines, r.game_id);
      }
      auto [mh, sh] = mean_std(hns_scores);
      auto [mr, sr] = mean_std(r.scores);
      out.rows.push_back(
          ReportRow{r.game_id, r.method, mh, sh, iqm(hns_scores), mr, sr});
      auto& pool = pooled_hns[method];
      pool.insert(pool.end(), hns_scores.begin(), hns_scores.end());
      game_iqms[method][game] = iqm(hns_scores);
    }
  }

  for (const std::string& method : method_order) {
    MethodSummary summary;
    summary.method = method;
    summary.pooled_iqm = iqm(pooled_hns[method]);
    if (method != baseline_method) {
      CompareCounts counts =
          compare_games(game_iqms[baseline_method], game_iqms[method], threshold);
      summary.games_improved = counts.improved;
      summary.games_declined = counts.declined;
    }
    out.summaries.push_back(summary);
  }
  return out;
}

BaselineScores toy_baselines() {
  // score_random: mean return of the uniform-random policy over 1e5 episodes,
  // seed 0x7011BA5E; score_human: exact value-iteration optimum.
  // Pinned values; test_policy_env recomputes both.
  return BaselineScores{
      {"corridor", {17.64676, 23.902724167313885}},
      {"gamble", {12.49371, 15.0}},
      {"sparse_goal", {5.1627999999999998, 20.0}},
  };
}

BaselineScores load_baselines_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kMissingInput, "cannot open baseline file " + path);
  }
  BaselineScores out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("game,", 0) == 0) continue;  // column header
    std::istringstream row(line);
    std::string game, random_s, human_s;
    if (!std::getline(row, game, ',') || !std::getline(row, random_s, ',') ||
        !std::getline(row, human_s, ',')) {
      throw Error(ErrorCode::kParseError,
                  path + " line " + std::to_string(line_no) + ": expected 3 columns");
    }
    try {
      out[game] = BaselineEntry{std::stod(random_s), std::stod(human_s)};
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParseError,
                  path + " line " + std::to_string(line_no) + ": malformed number");
    }
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

void write_report_csv(const AggregateReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write report file " + path);
  }
  out << "# mtro-report v1 pooled=game_x_trial baseline=" << report.baseline_method
      << '\n';
  out << "game,method,mean_hns,std_hns,iqm_hns,mean_raw,std_raw\n";
  for (const ReportRow& row : report.rows) {
    out << row.game_id << ',' << row.method << ',' << fmt(row.mean_hns) << ','
        << fmt(row.std_hns) << ',' << fmt(row.iqm_hns) << ',' << fmt(row.mean_raw)
        << ',' << fmt(row.std_raw) << '\n';
  }
}

void write_summary_csv(const AggregateReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write summary file " + path);
  }
  out << "# mtro-report v1 threshold=" << fmt(report.comparison_threshold)
      << " baseline=" << report.baseline_method << '\n';
  out << "method,pooled_iqm,games_improved,games_declined\n";
  for (const MethodSummary& s : report.summaries) {
    out << s.method << ',' << fmt(s.pooled_iqm) << ',' << s.games_improved << ','
        << s.games_declined << '\n';
  }
}

}  // namespace mtro
