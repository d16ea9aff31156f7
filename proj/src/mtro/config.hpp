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

#include "mtro/dataset_gen.hpp"
#include "mtro/empirical.hpp"
#include "mtro/games.hpp"
#include "mtro/returns_data.hpp"
#include "mtro/target_sampler.hpp"

namespace mtro {

/// One declarative record bundling every knob of a run. Parsed from a
/// sectioned key=value file; CLI flags may override only the seed, the output
/// directory, and the job count, so manifests stay authoritative.
struct RunConfig {
  // [run]
  std::uint64_t base_seed = 0;  // required in the file
  std::vector<ToyGameSpec> games;
  std::vector<MethodKind> methods;
  int trials = 50;
  double expert_fraction = 0.1;
  std::string output_dir = "out";
  std::string baseline_method = "mgdt_bayes";

  // [quantization]
  QuantizationSpec quantization;  // per-game clip flags still apply
  CountBasis count_basis = CountBasis::kEpisode;

  // [dataset]
  LearnerConfig learner;

  // [sampler]
  MethodSpec sampler;  // classifier, warmup_len, kl_epsilon (kind set per run)
  double derd_lambda = 0.0;
  double max_degenerate_fraction = 1.0;

  // [corruption]
  PredictorCorruption corruption;

  // [policy]
  double policy_smoothing = 1.0;
  std::string predictor_file;  // optional file-backed predictor

  void validate() const;
};

/// Parse and validate a config file. Errors carry the section/key that failed.
RunConfig load_config(const std::string& path);

/// Canonical one-line-per-key rendering of every effective value; the basis
/// of the manifest hash, so any change to any knob changes the hash.
std::string config_canonical_text(const RunConfig& config);
std::uint64_t config_hash(const RunConfig& config);

}  // namespace mtro
