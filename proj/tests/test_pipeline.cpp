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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "mtro/config.hpp"
#include "mtro/empirical.hpp"
#include "mtro/pipeline.hpp"

using namespace mtro;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

fs::path write_config(const fs::path& dir, const std::string& body) {
  fs::path path = dir / "run.cfg";
  std::ofstream out(path);
  out << body;
  return path;
}

const char* kSmallConfig = R"(# small deterministic run
[run]
base_seed = 77
trials = 4
methods = mgdt_bayes, mtro

[dataset]
episodes = 200

[corruption]
shift = -3
temperature = 2.0
)";

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("config parsing: defaults, overrides, and field-level errors") {
  TempDir tmp("mtro_cfg_test");
  auto path = write_config(tmp.path, kSmallConfig);
  RunConfig config = load_config(path.string());
  CHECK(config.base_seed == 77);
  CHECK(config.trials == 4);
  CHECK(config.games.size() == 3);  // default roster
  CHECK(config.methods.size() == 2);
  CHECK(config.learner.n_episodes == 200);
  CHECK(config.corruption.shift == -3);
  CHECK(config.sampler.warmup_len == 20);
  CHECK(config.expert_fraction == 0.1);

  // missing base_seed names the field
  auto bad = write_config(tmp.path, "[run]\ntrials = 4\n");
  try {
    load_config(bad.string());
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfigError);
    CHECK(std::string(e.what()).find("run.base_seed") != std::string::npos);
  }

  // unknown keys are rejected, with their name
  auto unknown = write_config(tmp.path, "[run]\nbase_seed = 1\nbogus = 2\n");
  try {
    load_config(unknown.string());
    FAIL("expected ConfigError");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("run.bogus") != std::string::npos);
  }

  auto bad_value = write_config(tmp.path, "[run]\nbase_seed = 1\ntrials = soon\n");
  CHECK_THROWS_AS(load_config(bad_value.string()), Error);

  auto bad_game = write_config(tmp.path, "[run]\nbase_seed = 1\ngames = pinball\n");
  CHECK_THROWS_AS(load_config(bad_game.string()), Error);

  auto bad_seed = write_config(tmp.path, "[run]\nbase_seed = -1\n");
  CHECK_THROWS_AS(load_config(bad_seed.string()), Error);
}

TEST_CASE("config hash tracks every effective knob") {
  TempDir tmp("mtro_cfg_hash");
  RunConfig a = load_config(write_config(tmp.path, kSmallConfig).string());
  RunConfig b = a;
  CHECK(config_hash(a) == config_hash(b));
  b.base_seed = 78;
  CHECK(config_hash(a) != config_hash(b));
  b = a;
  b.corruption.temperature = 1.0;
  CHECK(config_hash(a) != config_hash(b));
  b = a;
  b.trials = 5;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("seed derivation is stable and pairwise distinct") {
  CHECK(derive_seed(1, "corridor", "mtro", 0) == derive_seed(1, "corridor", "mtro", 0));
  std::set<std::uint64_t> seeds;
  for (const char* game : {"corridor", "gamble", "sparse_goal"}) {
    for (const char* method : {"mgdt_bayes", "naive", "mtro"}) {
      for (std::uint64_t trial = 0; trial < 50; ++trial) {
        seeds.insert(derive_seed(123456789ULL, game, method, trial));
      }
    }
  }
  CHECK(seeds.size() == 3 * 3 * 50);
}

TEST_CASE("results CSV round-trips") {
  TempDir tmp("mtro_results_rt");
  std::vector<ResultRow> rows{
      {"corridor", "mtro", 0, 42, 10.5, 12, 0},
      {"corridor", "mtro", 1, 43, -2.25, 40, 7},
  };
  auto path = (tmp.path / "results.csv").string();
  write_results_csv(rows, 999, path);
  auto loaded = read_results_csv(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].game_id == "corridor");
  CHECK(loaded[0].raw_return == 10.5);
  CHECK(loaded[1].seed == 43);
  CHECK(loaded[1].raw_return == -2.25);
  CHECK(loaded[1].degenerate_steps == 7);

  // schema-version header is mandatory
  std::ofstream(path) << "game,method\n";
  CHECK_THROWS_AS(read_results_csv(path), Error);
}

TEST_CASE("gen-data writes one episode file per game plus a manifest") {
  TempDir tmp("mtro_gen");
  RunConfig config = load_config(write_config(tmp.path, kSmallConfig).string());
  cmd_gen_data(config, tmp.path.string());
  for (const char* game : {"corridor", "gamble", "sparse_goal"}) {
    CHECK(fs::exists(tmp.path / (std::string(game) + ".jsonl")));
  }
  CHECK(fs::exists(tmp.path / "gen-data_manifest.json"));

  // same config, same bytes
  TempDir again("mtro_gen2");
  cmd_gen_data(config, again.path.string());
  for (const char* game : {"corridor", "gamble", "sparse_goal"}) {
    CHECK(slurp(tmp.path / (std::string(game) + ".jsonl")) ==
          slurp(again.path / (std::string(game) + ".jsonl")));
  }
}

TEST_CASE("derd artifacts re-ingest to identical posteriors") {
  TempDir tmp("mtro_derd_rt");
  RunConfig config = load_config(write_config(tmp.path, kSmallConfig).string());
  cmd_gen_data(config, tmp.path.string());
  cmd_derd(config, tmp.path.string());

  for (const ToyGameSpec& game : config.games) {
    QuantizationSpec quant = config.quantization;
    quant.clip_rewards = quant.clip_rewards && game.clip_rewards;
    auto episodes = load_episodes(episodes_path(tmp.path.string(), game.game_id));
    prepare_dataset(episodes, quant, config.expert_fraction);
    DerdTable in_memory(build_return_counts(episodes, quant, config.count_basis),
                        BinRange::of(quant), config.derd_lambda);
    DerdTable loaded =
        DerdTable::from_csv(derd_path(tmp.path.string(), game.game_id),
                            config.derd_lambda);

    // Identical posteriors for an arbitrary prediction at several alphas.
    auto predictor = EmpiricalReturnPredictor::fit(episodes, quant);
    auto predicted = predictor.predict(0);
    for (double alpha : {1.0, 1.7, 4.0}) {
      auto a = combine_posterior(in_memory.logweights(), predicted,
                                 in_memory.reference_distribution(), alpha,
                                 MethodKind::kMtro);
      auto b = combine_posterior(loaded.logweights(), predicted,
                                 loaded.reference_distribution(), alpha,
                                 MethodKind::kMtro);
      for (int i = 0; i < a.size(); ++i) {
        CHECK(a.prob_at_index(static_cast<std::size_t>(i)) ==
              b.prob_at_index(static_cast<std::size_t>(i)));
      }
    }
  }
}

TEST_CASE("eval produces the full cell grid; report summarizes it") {
  TempDir tmp("mtro_eval");
  RunConfig config = load_config(write_config(tmp.path, kSmallConfig).string());
  cmd_gen_data(config, tmp.path.string());
  cmd_derd(config, tmp.path.string());
  EvalTotals totals = cmd_eval(config, tmp.path.string(), 2);
  CHECK(totals.total_steps > 0);

  auto rows = read_results_csv((tmp.path / "results.csv").string());
  CHECK(rows.size() == 3 * 2 * 4);  // games x methods x trials

  cmd_report(config, tmp.path.string(), false);
  CHECK(fs::exists(tmp.path / "report.csv"));
  CHECK(fs::exists(tmp.path / "summary.csv"));
  std::string summary = slurp(tmp.path / "summary.csv");
  CHECK(summary.find("mgdt_bayes") != std::string::npos);
  CHECK(summary.find("mtro") != std::string::npos);
}

TEST_CASE("eval requires matching artifacts and flags stale configs") {
  TempDir tmp("mtro_stale");
  RunConfig config = load_config(write_config(tmp.path, kSmallConfig).string());
  // nothing generated yet
  CHECK_THROWS_AS(cmd_eval(config, tmp.path.string(), 1), Error);

  cmd_gen_data(config, tmp.path.string());
  CHECK_THROWS_AS(cmd_eval(config, tmp.path.string(), 1), Error);  // no derd yet
  cmd_derd(config, tmp.path.string());

  RunConfig other = config;
  other.base_seed = 1234;
  try {
    cmd_eval(other, tmp.path.string(), 1);
    FAIL("expected stale-config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kValidation);
  }
}

TEST_CASE("report refuses partial results unless allowed") {
  TempDir tmp("mtro_partial");
  RunConfig config = load_config(write_config(tmp.path, kSmallConfig).string());
  cmd_gen_data(config, tmp.path.string());
  cmd_derd(config, tmp.path.string());
  cmd_eval(config, tmp.path.string(), 1);

  // drop one method's rows: refused by default, reported without it when allowed
  auto rows = read_results_csv((tmp.path / "results.csv").string());
  std::vector<ResultRow> no_mtro;
  for (const ResultRow& row : rows) {
    if (row.method != "mtro") no_mtro.push_back(row);
  }
  write_results_csv(no_mtro, config_hash(config), (tmp.path / "results.csv").string());
  CHECK_THROWS_AS(cmd_report(config, tmp.path.string(), false), Error);
  cmd_report(config, tmp.path.string(), true);
  std::string summary = slurp(tmp.path / "summary.csv");
  CHECK(summary.find("\nmgdt_bayes,") != std::string::npos);
  CHECK(summary.find("\nmtro,") == std::string::npos);

  // short cells: refused by default, truncated to the common length when allowed
  std::vector<ResultRow> fewer(rows.begin(), rows.end() - 1);
  write_results_csv(fewer, config_hash(config), (tmp.path / "results.csv").string());
  CHECK_THROWS_AS(cmd_report(config, tmp.path.string(), false), Error);
  cmd_report(config, tmp.path.string(), true);
  summary = slurp(tmp.path / "summary.csv");
  CHECK(summary.find("\nmtro,") != std::string::npos);
}

TEST_CASE("plot-data emits the distribution CSVs") {
  TempDir tmp("mtro_plot");
  RunConfig config = load_config(write_config(tmp.path, kSmallConfig).string());
  cmd_gen_data(config, tmp.path.string());
  cmd_derd(config, tmp.path.string());
  cmd_plot_data(config, tmp.path.string());
  for (const char* game : {"corridor", "gamble", "sparse_goal"}) {
    for (const char* suffix :
         {"_classifier.csv", "_derd_expert.csv", "_predicted.csv",
          "_predicted_corrupted.csv", "_reference.csv", "_posterior_mtro.csv",
          "_posterior_mgdt_bayes.csv"}) {
      CAPTURE(game);
      CAPTURE(suffix);
      CHECK(fs::exists(tmp.path / (std::string(game) + suffix)));
    }
  }
  std::ifstream in(tmp.path / "corridor_classifier.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "bin,prob");
}

TEST_CASE("eval honors a file-backed predictor") {
  TempDir tmp("mtro_filepred");
  std::string cfg = std::string(kSmallConfig) + "\n[policy]\npredictor_file = " +
                    (tmp.path / "predictor.jsonl").string() + "\n";
  RunConfig config = load_config(write_config(tmp.path, cfg).string());
  cmd_gen_data(config, tmp.path.string());
  cmd_derd(config, tmp.path.string());

  // A flat predictor for every (game, observation) pair that can come up.
  {
    std::ofstream out(tmp.path / "predictor.jsonl");
    int bins = config.quantization.bin_count();
    std::string logits = "[";
    for (int i = 0; i < bins; ++i) logits += (i ? ",0.0" : "0.0");
    logits += "]";
    for (const ToyGameSpec& game : config.games) {
      for (int obs = 0; obs < game.num_states(); ++obs) {
        out << R"({"game_id":")" << game.game_id << R"(","observation":)" << obs
            << R"(,"logits":)" << logits << "}\n";
      }
    }
  }
  EvalTotals totals = cmd_eval(config, tmp.path.string(), 1);
  CHECK(totals.total_steps > 0);
  auto rows = read_results_csv((tmp.path / "results.csv").string());
  CHECK(rows.size() == 3 * 2 * 4);

  // A predictor file with missing records fails cleanly, also under threads.
  {
    std::ofstream out(tmp.path / "predictor.jsonl", std::ios::trunc);
    out << R"({"game_id":"corridor","observation":0,"logits":[)";
    for (int i = 0; i < config.quantization.bin_count(); ++i) out << (i ? ",0.0" : "0.0");
    out << "]}\n";
  }
  CHECK_THROWS_AS(cmd_eval(config, tmp.path.string(), 2), Error);
}
