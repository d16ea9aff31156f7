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
#include <vector>

#include "mtro/games.hpp"
#include "mtro/returns_data.hpp"

namespace mtro {

/// Tabular Q-learning settings for the behavior agent whose experience forms
/// the offline corpus. Fixed constants in the config schema so datasets are
/// pure functions of (spec, config, seed).
struct LearnerConfig {
  int n_episodes = 5000;
  double learning_rate = 0.05;
  double discount = 0.95;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double anneal_fraction = 0.8;  // epsilon reaches its floor after this share of episodes

  void validate() const;
};

/// Record every episode of an epsilon-greedy Q-learning run, stamped with
/// generation_index = episode ordinal. Rewards are stored raw; clipping and
/// expert labeling happen at ingestion.
std::vector<Episode> generate_offline_dataset(const ToyGameSpec& spec,
                                              const LearnerConfig& config,
                                              std::uint64_t seed);

}  // namespace mtro
