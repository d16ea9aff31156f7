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

#include "mtro/pipeline.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mtro/dataset_gen.hpp"
#include "mtro/empirical.hpp"
#include "mtro/rng.hpp"

namespace fs = std::filesystem;

namespace mtro {

namespace {

constexpr const char* kResultsHeader = "# mtro-results v1";

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError, "cannot create directory " + dir + ": " + ec.message());
  }
}

void write_manifest(const RunConfig& config, const std::string& dir,
                    const std::string& command, const nlohmann::json& extra) {
  nlohmann::json manifest{
      {"command", command},
      {"base_seed", config.base_seed},
      {"config_hash", config_hash(config)},
      {"seed_derivation",
       "splitmix64(splitmix64(splitmix64(base_seed xor fnv1a64(game)) xor "
       "fnv1a64(method)) xor trial)"},
  };
  if (extra.is_object()) manifest.update(extra);
  std::ofstream out(fs::path(dir) / (command + "_manifest.json"), std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write manifest in " + dir);
  }
  out << manifest.dump(2) << '\n';
}

void check_manifest(const RunConfig& config, const std::string& dir,
                    const std::string& command) {
  fs::path path = fs::path(dir) / (command + "_manifest.json");
  if (!fs::exists(path)) return;  // nothing to cross-check
  std::ifstream in(path);
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  if (manifest.contains("config_hash") &&
      manifest["config_hash"].get<std::uint64_t>() != config_hash(config)) {
    throw Error(ErrorCode::kValidation,
                dir + " was produced with a different config (hash mismatch); "
                      "regenerate or point at matching artifacts");
  }
}

/// Ingested per-game bundle shared by eval and plot-data.
struct GameBundle {
  ToyGameSpec spec;
  std::vector<Episode> episodes;
  DerdTable derd;
  EmpiricalPolicy policy;
  EmpiricalReturnPredictor predictor;
};

QuantizationSpec game_quantization(const RunConfig& config, const ToyGameSpec& spec) {
  QuantizationSpec q = config.quantization;
  q.clip_rewards = q.clip_rewards && spec.clip_rewards;
  return q;
}

GameBundle load_game_bundle(const RunConfig& config, const std::string& dir,
                            const ToyGameSpec& spec) {
  std::string epath = episodes_path(dir, spec.game_id);
  std::string dpath = derd_path(dir, spec.game_id);
  if (!fs::exists(epath)) {
    throw Error(ErrorCode::kMissingInput, "missing episode file " + epath);
  }
  if (!fs::exists(dpath)) {
    throw Error(ErrorCode::kMissingInput, "missing derd file " + dpath);
  }
  QuantizationSpec quant = game_quantization(config, spec);
  std::vector<Episode> episodes = load_episodes(epath);
  if (episodes.empty()) {
    throw Error(ErrorCode::kEmptyDataset, epath + " holds no episodes");
  }
  prepare_dataset(episodes, quant, config.expert_fraction);
  DerdTable derd = DerdTable::from_csv(dpath, config.derd_lambda);
  EmpiricalPolicy policy =
      EmpiricalPolicy::fit(episodes, quant, spec.num_actions(), config.policy_smoothing);
  EmpiricalReturnPredictor predictor = EmpiricalReturnPredictor::fit(episodes, quant);
  return GameBundle{spec, std::move(episodes), std::move(derd), std::move(policy),
                    std::move(predictor)};
}

MethodSpec method_spec_for(const RunConfig& config, MethodKind kind) {
  MethodSpec spec = config.sampler;
  spec.kind = kind;
  return spec;
}

}  // namespace

std::string episodes_path(const std::string& dir, const std::string& game_id) {
  return (fs::path(dir) / (game_id + ".jsonl")).string();
}

std::string derd_path(const std::string& dir, const std::string& game_id) {
  return (fs::path(dir) / (game_id + "_derd.csv")).string();
}

void cmd_gen_data(const RunConfig& config, const std::string& dir) {
  ensure_dir(dir);
  nlohmann::json files = nlohmann::json::object();
  for (const ToyGameSpec& spec : config.games) {
    std::uint64_t seed = derive_seed(config.base_seed, spec.game_id, "gen-data", 0);
    std::vector<Episode> dataset = generate_offline_dataset(spec, config.learner, seed);
    std::string path = episodes_path(dir, spec.game_id);
    save_episodes(dataset, path);
    files[spec.game_id] = {{"path", fs::path(path).filename().string()},
                           {"episodes", dataset.size()},
                           {"seed", seed}};
  }
  write_manifest(config, dir, "gen-data", {{"files", files}});
}

void cmd_derd(const RunConfig& config, const std::string& dir) {
  check_manifest(config, dir, "gen-data");
  for (const ToyGameSpec& spec : config.games) {
    std::string epath = episodes_path(dir, spec.game_id);
    if (!fs::exists(epath)) {
      throw Error(ErrorCode::kMissingInput, "missing episode file " + epath);
    }
    QuantizationSpec quant = game_quantization(config, spec);
    std::vector<Episode> episodes = load_episodes(epath);
    if (episodes.empty()) {
      throw Error(ErrorCode::kEmptyDataset, epath + " holds no episodes");
    }
    prepare_dataset(episodes, quant, config.expert_fraction);
    ReturnCounts counts = build_return_counts(episodes, quant, config.count_basis);
    DerdTable table(std::move(counts), BinRange::of(quant), config.derd_lambda);
    table.write_csv(derd_path(dir, spec.game_id));
    write_dist_csv(table.reference_distribution(),
                   (fs::path(dir) / (spec.game_id + "_reference.csv")).string());
  }
  write_manifest(config, dir, "derd", {});
}

EvalTotals cmd_eval(const RunConfig& config, const std::string& dir, int jobs) {
  if (jobs < 1) {
    throw Error(ErrorCode::kValidation, "jobs must be >= 1");
  }
  check_manifest(config, dir, "gen-data");
  check_manifest(config, dir, "derd");

  std::vector<GameBundle> bundles;
  bundles.reserve(config.games.size());
  for (const ToyGameSpec& spec : config.games) {
    bundles.push_back(load_game_bundle(config, dir, spec));
  }
  FilePredictor file_predictor;
  bool use_file_predictor = !config.predictor_file.empty();
  if (use_file_predictor) {
    file_predictor =
        FilePredictor::load(config.predictor_file, BinRange::of(config.quantization));
  }

  // One cell per (game, method, trial), evaluated in any order, written in
  // canonical order.
  struct Cell {
    std::size_t bundle;
    MethodKind kind;
    int trial;
  };
  std::vector<Cell> cells;
  for (std::size_t b = 0; b < bundles.size(); ++b) {
    for (MethodKind kind : config.methods) {
      for (int trial = 0; trial < config.trials; ++trial) {
        cells.push_back(Cell{b, kind, trial});
      }
    }
  }
  std::vector<ResultRow> rows(cells.size());

  std::atomic<std::size_t> cursor{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      while (true) {
        std::size_t i = cursor.fetch_add(1);
        if (i >= cells.size()) break;
        const Cell& cell = cells[i];
        const GameBundle& bundle = bundles[cell.bundle];
        std::uint64_t seed =
            derive_seed(config.base_seed, bundle.spec.game_id, method_name(cell.kind),
                        static_cast<std::uint64_t>(cell.trial));
        PredictorFn predict = use_file_predictor
                                  ? PredictorFn([&](int obs) {
                                      return file_predictor.predict(bundle.spec.game_id, obs);
                                    })
                                  : PredictorFn([&](int obs) {
                                      return bundle.predictor.predict(obs);
                                    });
        EpisodeOutcome outcome =
            run_episode(bundle.spec, bundle.policy, predict, config.corruption,
                        bundle.derd, method_spec_for(config, cell.kind), seed);
        rows[i] = ResultRow{bundle.spec.game_id, method_name(cell.kind),   cell.trial,
                            seed,                outcome.episode_return,   outcome.steps,
                            outcome.degenerate_steps};
      }
    } catch (...) {
      std::scoped_lock lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      cursor.store(cells.size());  // stop the other workers
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  EvalTotals totals;
  for (const ResultRow& row : rows) {
    totals.total_steps += static_cast<std::uint64_t>(row.steps);
    totals.degenerate_steps += row.degenerate_steps;
  }
  write_results_csv(rows, config_hash(config), (fs::path(dir) / "results.csv").string());
  write_manifest(config, dir, "eval",
                 {{"rows", rows.size()},
                  {"total_steps", totals.total_steps},
                  {"degenerate_steps", totals.degenerate_steps}});
  return totals;
}

void write_results_csv(const std::vector<ResultRow>& rows, std::uint64_t hash,
                       const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write results file " + path);
  }
  out << kResultsHeader << " config_hash=" << hash << '\n';
  out << "game,method,trial,seed,raw_return,steps,degenerate_steps\n";
  char buf[64];
  for (const ResultRow& row : rows) {
    std::snprintf(buf, sizeof buf, "%.17g", row.raw_return);
    out << row.game_id << ',' << row.method << ',' << row.trial << ',' << row.seed
        << ',' << buf << ',' << row.steps << ',' << row.degenerate_steps << '\n';
  }
}

std::vector<ResultRow> read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kMissingInput, "cannot open results file " + path);
  }
  std::string line;
  if (!std::getline(in, line) || line.rfind(kResultsHeader, 0) != 0) {
    throw Error(ErrorCode::kParseError,
                path + ": missing '" + std::string(kResultsHeader) + "' header");
  }
  std::getline(in, line);  // column header
  std::vector<ResultRow> rows;
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    ResultRow r;
    std::string cell;
    try {
      std::getline(row, r.game_id, ',');
      std::getline(row, r.method, ',');
      std::getline(row, cell, ',');
      r.trial = std::stoi(cell);
      std::getline(row, cell, ',');
      r.seed = std::stoull(cell);
      std::getline(row, cell, ',');
      r.raw_return = std::stod(cell);
      std::getline(row, cell, ',');
      r.steps = std::stoi(cell);
      std::getline(row, cell, ',');
      r.degenerate_steps = std::stoull(cell);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParseError,
                  path + " line " + std::to_string(line_no) + ": malformed row");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

void cmd_report(const RunConfig& config, const std::string& dir, bool allow_partial) {
  std::string results_file = (fs::path(dir) / "results.csv").string();
  if (!fs::exists(results_file)) {
    throw Error(ErrorCode::kMissingInput, "missing results file " + results_file);
  }
  std::vector<ResultRow> rows = read_results_csv(results_file);

  std::map<std::pair<std::string, std::string>, std::vector<double>> cells;
  for (const ResultRow& row : rows) {
    cells[{row.game_id, row.method}].push_back(row.raw_return);
  }

  // A partial result set keeps only methods that cover every game, truncated
  // to the shortest cell, so the report stays rectangular.
  bool partial = false;
  std::vector<MethodKind> covered;
  std::size_t min_trials = static_cast<std::size_t>(config.trials);
  for (MethodKind kind : config.methods) {
    bool complete = true;
    for (const ToyGameSpec& spec : config.games) {
      auto it = cells.find({spec.game_id, method_name(kind)});
      if (it == cells.end() || it->second.empty()) {
        complete = false;
      } else if (it->second.size() != static_cast<std::size_t>(config.trials)) {
        partial = true;
        min_trials = std::min(min_trials, it->second.size());
      }
    }
    if (complete) {
      covered.push_back(kind);
    } else {
      partial = true;
    }
  }
  if (partial && !allow_partial) {
    throw Error(ErrorCode::kMissingInput,
                "results are incomplete for this config; rerun eval or pass "
                "--allow-partial");
  }
  std::vector<GameReport> reports;
  for (MethodKind kind : covered) {
    for (const ToyGameSpec& spec : config.games) {
      auto scores = cells.at({spec.game_id, method_name(kind)});
      scores.resize(min_trials);
      reports.push_back(GameReport{spec.game_id, method_name(kind), std::move(scores)});
    }
  }
  AggregateReport report =
      assemble_report(reports, toy_baselines(), config.baseline_method);
  write_report_csv(report, (fs::path(dir) / "report.csv").string());
  write_summary_csv(report, (fs::path(dir) / "summary.csv").string());
}

void cmd_plot_data(const RunConfig& config, const std::string& dir) {
  for (const ToyGameSpec& spec : config.games) {
    GameBundle bundle = load_game_bundle(config, dir, spec);
    BinRange range = bundle.derd.range();
    fs::path base = fs::path(dir);

    // Expert curves: exponential classifier vs data-driven ratios.
    write_dist_csv(normalize(exp_classifier_logweights(config.sampler.classifier, range)),
                   (base / (spec.game_id + "_classifier.csv")).string());
    write_dist_csv(normalize(bundle.derd.logweights()),
                   (base / (spec.game_id + "_derd_expert.csv")).string());

    // Predicted return distribution at the initial observation, raw and
    // corrupted, next to the dataset reference.
    CategoricalReturnDist predicted = bundle.predictor.predict(spec.initial_state());
    write_dist_csv(predicted, (base / (spec.game_id + "_predicted.csv")).string());
    write_dist_csv(corrupt(predicted, config.corruption),
                   (base / (spec.game_id + "_predicted_corrupted.csv")).string());
    write_dist_csv(bundle.derd.reference_distribution(),
                   (base / (spec.game_id + "_reference.csv")).string());

    // Start-of-episode posterior per method (alpha = 1 at t = 1). A collapsed
    // combination is plotted as the reference, matching the sampler fallback.
    for (MethodKind kind : config.methods) {
      if (kind == MethodKind::kDtDecrement) continue;
      LogWeights expert =
          method_uses_derd(kind)
              ? bundle.derd.logweights()
              : exp_classifier_logweights(config.sampler.classifier, range);
      CategoricalReturnDist posterior = bundle.derd.reference_distribution();
      try {
        posterior = combine_posterior(expert, corrupt(predicted, config.corruption),
                                      bundle.derd.reference_distribution(), 1.0, kind);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDegeneratePosterior) throw;
      }
      write_dist_csv(posterior, (base / (spec.game_id + "_posterior_" +
                                         method_name(kind) + ".csv"))
                                    .string());
    }
  }
}

}  // namespace mtro
