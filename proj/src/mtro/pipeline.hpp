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

#include <cstdint>
#include <string>
#include <vector>

#include "mtro/config.hpp"
#include "mtro/metrics.hpp"

namespace mtro {

/// One evaluated (game, method, trial) cell of the results file.
struct ResultRow {
  std::string game_id;
  std::string method;
  int trial = 0;
  std::uint64_t seed = 0;
  double raw_return = 0.0;
  int steps = 0;
  std::uint64_t degenerate_steps = 0;
};

struct EvalTotals {
  std::uint64_t total_steps = 0;
  std::uint64_t degenerate_steps = 0;

  double degenerate_fraction() const {
    return total_steps ? static_cast<double>(degenerate_steps) /
                             static_cast<double>(total_steps)
                       : 0.0;
  }
};

/// Generate the per-game offline episode files plus a manifest recording the
/// seed and a content hash of the config.
void cmd_gen_data(const RunConfig& config, const std::string& dir);

/// Build and write the per-game derd and reference-distribution CSVs from the
/// episode files in `dir`.
void cmd_derd(const RunConfig& config, const std::string& dir);

/// Run trials x methods x games; writes results.csv. Cells run in parallel up
/// to `jobs`, each with its own derived seed; rows are written in canonical
/// order so the bytes never depend on scheduling. Returns the degenerate-step
/// totals so callers can enforce max_degenerate_fraction.
EvalTotals cmd_eval(const RunConfig& config, const std::string& dir, int jobs);

/// Assemble report.csv and summary.csv from results.csv. Refuses incomplete
/// result sets unless allow_partial.
void cmd_report(const RunConfig& config, const std::string& dir, bool allow_partial);

/// Emit the per-game plot CSVs: classifier and derd expert curves, predicted
/// (raw and corrupted) versus reference distributions, and start-of-episode
/// posteriors per method.
void cmd_plot_data(const RunConfig& config, const std::string& dir);

/// Shared helpers (exposed for tests).
std::vector<ResultRow> read_results_csv(const std::string& path);
void write_results_csv(const std::vector<ResultRow>& rows, std::uint64_t config_hash,
                       const std::string& path);
std::string episodes_path(const std::string& dir, const std::string& game_id);
std::string derd_path(const std::string& dir, const std::string& game_id);

}  // namespace mtro
