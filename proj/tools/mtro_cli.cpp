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

// Command-line front end. Talks to the engine exclusively through the C API
// in mtro/mtro.h, the same surface other language bindings would use.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include <mtro/mtro.h>

namespace {

struct ConfigDeleter {
  void operator()(mtro_config* c) const { mtro_config_free(c); }
};
using ConfigPtr = std::unique_ptr<mtro_config, ConfigDeleter>;

int exit_code_of(mtro_status status) {
  switch (status) {
    case MTRO_OK: return 0;
    case MTRO_ERR_VALIDATION: return 2;
    case MTRO_ERR_MISSING: return 3;
    case MTRO_ERR_DEGENERATE: return 4;
    default: return 1;
  }
}

int finish(mtro_status status, const char* command) {
  if (status != MTRO_OK) {
    std::fprintf(stderr, "mtro %s: %s\n", command, mtro_last_error());
  }
  return exit_code_of(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven target-return selection for return-conditioned "
               "policies: offline expert-return tables, divergence-weighted "
               "return prediction, and a multi-game evaluation harness."};
  app.require_subcommand(1);
  app.fallthrough();  // allow `mtro SUBCOMMAND --config ...`

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 1;
  bool allow_partial = false;

  app.add_option("--config", config_path, "run configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "artifact directory (default: config output_dir)");
  app.add_option("--seed", seed, "override the config base seed")
      ->each([&](const std::string&) { seed_set = true; });
  app.add_option("--jobs", jobs, "parallel evaluation workers")
      ->check(CLI::PositiveNumber);
  app.add_flag("--allow-partial", allow_partial,
               "report even when some (game, method, trial) cells are missing");

  auto* gen = app.add_subcommand("gen-data", "generate the offline episode files");
  auto* derd = app.add_subcommand("derd", "build per-game expert-return tables");
  auto* eval = app.add_subcommand("eval", "run all (game, method, trial) episodes");
  auto* report = app.add_subcommand("report", "aggregate results into report CSVs");
  auto* plot = app.add_subcommand("plot-data", "emit distribution CSVs for plotting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad usage is a validation error
  }

  mtro_config* raw = nullptr;
  mtro_status status = mtro_config_load(config_path.c_str(), &raw);
  if (status != MTRO_OK) return finish(status, "config");
  ConfigPtr config(raw);

  if (seed_set) mtro_config_set_seed(config.get(), seed);
  if (out_dir.empty()) {
    char buffer[4096];
    if (mtro_config_output_dir(config.get(), buffer, sizeof buffer) != MTRO_OK) {
      return finish(MTRO_ERR_VALIDATION, "config");
    }
    out_dir = buffer;
  }

  if (gen->parsed()) {
    return finish(mtro_run_gen_data(config.get(), out_dir.c_str()), "gen-data");
  }
  if (derd->parsed()) {
    return finish(mtro_run_derd(config.get(), out_dir.c_str()), "derd");
  }
  if (eval->parsed()) {
    return finish(mtro_run_eval(config.get(), out_dir.c_str(), jobs), "eval");
  }
  if (report->parsed()) {
    return finish(mtro_run_report(config.get(), out_dir.c_str(), allow_partial ? 1 : 0),
                  "report");
  }
  if (plot->parsed()) {
    return finish(mtro_run_plot_data(config.get(), out_dir.c_str()), "plot-data");
  }
  return 2;
}
