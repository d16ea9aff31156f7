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

#include "mtro/dataset_gen.hpp"

#include <algorithm>
#include <cmath>

namespace mtro {

void LearnerConfig::validate() const {
  if (n_episodes < 10) {
    throw Error(ErrorCode::kConfigError,
                "dataset generation needs n_episodes >= 10, got " +
                    std::to_string(n_episodes));
  }
  if (!(learning_rate > 0.0) || learning_rate > 1.0) {
    throw Error(ErrorCode::kConfigError, "learning_rate must lie in (0, 1]");
  }
  if (!(discount >= 0.0) || discount > 1.0) {
    throw Error(ErrorCode::kConfigError, "discount must lie in [0, 1]");
  }
  if (epsilon_start < 0.0 || epsilon_start > 1.0 || epsilon_end < 0.0 ||
      epsilon_end > 1.0) {
    throw Error(ErrorCode::kConfigError, "exploration rates must lie in [0, 1]");
  }
  if (!(anneal_fraction > 0.0) || anneal_fraction > 1.0) {
    throw Error(ErrorCode::kConfigError, "anneal_fraction must lie in (0, 1]");
  }
}

std::vector<Episode> generate_offline_dataset(const ToyGameSpec& spec,
                                              const LearnerConfig& config,
                                              std::uint64_t seed) {
  config.validate();
  int num_states = spec.num_states();
  int num_actions = spec.num_actions();
  std::vector<std::vector<double>> q(
      static_cast<std::size_t>(num_states),
      std::vector<double>(static_cast<std::size_t>(num_actions), 0.0));

  auto greedy = [&](int s) {
    const auto& row = q[static_cast<std::size_t>(s)];
    return static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  };

  Rng rng(seed);
  ToyEnv env(spec);
  std::vector<Episode> dataset;
  dataset.reserve(static_cast<std::size_t>(config.n_episodes));

  double anneal_span =
      config.anneal_fraction * static_cast<double>(config.n_episodes);
  for (int ep = 0; ep < config.n_episodes; ++ep) {
    double progress = std::min(1.0, static_cast<double>(ep) / anneal_span);
    double epsilon =
        config.epsilon_start + (config.epsilon_end - config.epsilon_start) * progress;

    Episode episode;
    episode.game_id = spec.game_id;
    episode.generation_index = static_cast<std::uint64_t>(ep);

    int s = env.reset();
    while (true) {
      int a = rng.next_double() < epsilon
                  ? static_cast<int>(rng.next_below(
                        static_cast<std::uint64_t>(num_actions)))
                  : greedy(s);
      auto out = env.step(a, rng);

      episode.observations.push_back(s);
      episode.actions.push_back(a);
      episode.rewards.push_back(out.reward);

      double bootstrap = 0.0;
      if (!out.done) {
        const auto& row = q[static_cast<std::size_t>(out.observation)];
        bootstrap = *std::max_element(row.begin(), row.end());
      }
      double& qa = q[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
      qa += config.learning_rate * (out.reward + config.discount * bootstrap - qa);

      if (out.done) break;
      s = out.observation;
    }
    dataset.push_back(std::move(episode));
  }
  return dataset;
}

}  // namespace mtro
