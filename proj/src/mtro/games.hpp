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
#include <utility>
#include <vector>

#include "mtro/errors.hpp"
#include "mtro/rng.hpp"

namespace mtro {

enum class GameKind { kCorridor, kGamble, kSparseGoal };

/// Small multi-game suite with three reward structures: dense incremental
/// (corridor), high-variance risk/reward (gamble), and sparse terminal
/// (sparse_goal). Dynamics are fixed; observation = state index.
struct ToyGameSpec {
  std::string game_id;
  GameKind kind = GameKind::kCorridor;
  int horizon = 40;
  bool clip_rewards = true;

  static ToyGameSpec corridor();
  static ToyGameSpec gamble();
  static ToyGameSpec sparse_goal();
  static ToyGameSpec by_name(const std::string& name);
  static const std::vector<std::string>& known_games();

  int num_actions() const;
  int num_states() const;
  int initial_state() const;
  bool is_terminal(int state) const;
};

struct Transition {
  double prob;
  int next_state;
  double reward;
  bool done;
};

/// Exact outcome model for (state, action). The environment samples from this
/// table and the value-iteration / bound analyses fold over it, so stepping
/// and planning can never disagree.
std::vector<Transition> transitions(const ToyGameSpec& spec, int state, int action);

class ToyEnv {
 public:
  explicit ToyEnv(const ToyGameSpec& spec);

  /// Start a new episode; returns the first observation.
  int reset();

  struct StepOut {
    int observation;
    double reward;
    bool done;
  };
  /// Throws InvalidAction on an out-of-range action index.
  StepOut step(int action, Rng& rng);

  int state() const { return state_; }
  int steps_taken() const { return steps_; }

 private:
  ToyGameSpec spec_;
  int state_ = 0;
  int steps_ = 0;
  bool done_ = true;
};

/// Maximum achievable expected return, by exact finite-horizon value
/// iteration over the transition model.
double optimal_expected_return(const ToyGameSpec& spec);

/// Monte-Carlo mean return of the uniform-random policy over `episodes`
/// seeded episodes. Pure function of (spec, episodes, seed).
double random_policy_mean_return(const ToyGameSpec& spec, int episodes,
                                 std::uint64_t seed);

/// Exact {min, max} achievable episode return over all policies and all
/// stochastic outcomes, by folding over the transition model.
std::pair<double, double> return_bounds(const ToyGameSpec& spec);

}  // namespace mtro
