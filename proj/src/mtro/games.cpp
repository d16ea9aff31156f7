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

#include "mtro/games.hpp"

#include <algorithm>
#include <limits>

namespace mtro {

namespace {
// Corridor: 12 cells, advance right with p=0.9, +1 per successful advance.
constexpr int kCorridorCells = 12;
constexpr int kCorridorGoal = 11;
constexpr double kAdvanceProb = 0.9;
// Gamble: safe +1, risky +3 w.p. 0.7 else -2.
constexpr double kRiskyWinProb = 0.7;
// Sparse goal: 4x4 grid, +20 on entering (3,3).
constexpr int kGridSide = 4;
constexpr int kGridGoal = kGridSide * kGridSide - 1;
constexpr double kGoalReward = 20.0;
}  // namespace

ToyGameSpec ToyGameSpec::corridor() {
  return ToyGameSpec{"corridor", GameKind::kCorridor, 40, true};
}

ToyGameSpec ToyGameSpec::gamble() {
  // Raw rewards +3/-2 are the point of the game; clipping would flatten them.
  return ToyGameSpec{"gamble", GameKind::kGamble, 10, false};
}

ToyGameSpec ToyGameSpec::sparse_goal() {
  return ToyGameSpec{"sparse_goal", GameKind::kSparseGoal, 24, false};
}

ToyGameSpec ToyGameSpec::by_name(const std::string& name) {
  if (name == "corridor") return corridor();
  if (name == "gamble") return gamble();
  if (name == "sparse_goal") return sparse_goal();
  throw Error(ErrorCode::kConfigError, "unknown game '" + name + "'");
}

const std::vector<std::string>& ToyGameSpec::known_games() {
  static const std::vector<std::string> names{"corridor", "gamble", "sparse_goal"};
  return names;
}

int ToyGameSpec::num_actions() const {
  switch (kind) {
    case GameKind::kCorridor: return 2;  // L, R
    case GameKind::kGamble: return 2;    // SAFE, RISKY
    case GameKind::kSparseGoal: return 4;  // U, D, L, R
  }
  return 0;
}

int ToyGameSpec::num_states() const {
  switch (kind) {
    case GameKind::kCorridor: return kCorridorCells;
    case GameKind::kGamble: return 1;
    case GameKind::kSparseGoal: return kGridSide * kGridSide;
  }
  return 0;
}

int ToyGameSpec::initial_state() const { return 0; }

bool ToyGameSpec::is_terminal(int state) const {
  switch (kind) {
    case GameKind::kCorridor: return state == kCorridorGoal;
    case GameKind::kGamble: return false;
    case GameKind::kSparseGoal: return state == kGridGoal;
  }
  return false;
}

std::vector<Transition> transitions(const ToyGameSpec& spec, int state, int action) {
  if (action < 0 || action >= spec.num_actions()) {
    throw Error(ErrorCode::kInvalidAction,
                spec.game_id + ": action " + std::to_string(action) + " out of range");
  }
  switch (spec.kind) {
    case GameKind::kCorridor: {
      if (action == 0) {  // L retreats, floor at 0
        return {{1.0, std::max(0, state - 1), 0.0, false}};
      }
      int next = state + 1;
      return {{kAdvanceProb, next, 1.0, next == kCorridorGoal},
              {1.0 - kAdvanceProb, state, 0.0, false}};
    }
    case GameKind::kGamble: {
      if (action == 0) {  // SAFE
        return {{1.0, 0, 1.0, false}};
      }
      return {{kRiskyWinProb, 0, 3.0, false}, {1.0 - kRiskyWinProb, 0, -2.0, false}};
    }
    case GameKind::kSparseGoal: {
      int row = state / kGridSide;
      int col = state % kGridSide;
      switch (action) {
        case 0: row = std::max(0, row - 1); break;              // U
        case 1: row = std::min(kGridSide - 1, row + 1); break;  // D
        case 2: col = std::max(0, col - 1); break;              // L
        case 3: col = std::min(kGridSide - 1, col + 1); break;  // R
      }
      int next = row * kGridSide + col;
      bool goal = next == kGridGoal;
      return {{1.0, next, goal ? kGoalReward : 0.0, goal}};
    }
  }
  return {};
}

ToyEnv::ToyEnv(const ToyGameSpec& spec) : spec_(spec) {
  if (spec_.horizon < 1) {
    throw Error(ErrorCode::kValidation, "horizon must be >= 1");
  }
}

int ToyEnv::reset() {
  state_ = spec_.initial_state();
  steps_ = 0;
  done_ = false;
  return state_;
}

ToyEnv::StepOut ToyEnv::step(int action, Rng& rng) {
  if (done_) {
    throw Error(ErrorCode::kValidation, "step on a finished episode");
  }
  auto outcomes = transitions(spec_, state_, action);
  const Transition* chosen = &outcomes.back();
  if (outcomes.size() > 1) {
    double u = rng.next_double();
    double cum = 0.0;
    for (const Transition& tr : outcomes) {
      cum += tr.prob;
      if (u < cum) {
        chosen = &tr;
        break;
      }
    }
  }
  state_ = chosen->next_state;
  ++steps_;
  done_ = chosen->done || steps_ >= spec_.horizon;
  return StepOut{state_, chosen->reward, done_};
}

double optimal_expected_return(const ToyGameSpec& spec) {
  int n = spec.num_states();
  // value[s] at h steps remaining; terminal states are absorbing with value 0.
  std::vector<double> value(static_cast<std::size_t>(n), 0.0);
  std::vector<double> next(static_cast<std::size_t>(n), 0.0);
  for (int h = 1; h <= spec.horizon; ++h) {
    for (int s = 0; s < n; ++s) {
      if (spec.is_terminal(s)) {
        next[static_cast<std::size_t>(s)] = 0.0;
        continue;
      }
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < spec.num_actions(); ++a) {
        double q = 0.0;
        for (const Transition& tr : transitions(spec, s, a)) {
          q += tr.prob *
               (tr.reward + (tr.done ? 0.0 : value[static_cast<std::size_t>(tr.next_state)]));
        }
        best = std::max(best, q);
      }
      next[static_cast<std::size_t>(s)] = best;
    }
    std::swap(value, next);
  }
  return value[static_cast<std::size_t>(spec.initial_state())];
}

double random_policy_mean_return(const ToyGameSpec& spec, int episodes,
                                 std::uint64_t seed) {
  if (episodes < 1) {
    throw Error(ErrorCode::kValidation, "need at least one episode");
  }
  Rng rng(seed);
  ToyEnv env(spec);
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    env.reset();
    double ep = 0.0;
    while (true) {
      int action = static_cast<int>(rng.next_below(
          static_cast<std::uint64_t>(spec.num_actions())));
      auto out = env.step(action, rng);
      ep += out.reward;
      if (out.done) break;
    }
    total += ep;
  }
  return total / static_cast<double>(episodes);
}

std::pair<double, double> return_bounds(const ToyGameSpec& spec) {
  int n = spec.num_states();
  std::vector<double> lo(static_cast<std::size_t>(n), 0.0);
  std::vector<double> hi(static_cast<std::size_t>(n), 0.0);
  std::vector<double> lo_next(lo);
  std::vector<double> hi_next(hi);
  for (int h = 1; h <= spec.horizon; ++h) {
    for (int s = 0; s < n; ++s) {
      if (spec.is_terminal(s)) {
        lo_next[static_cast<std::size_t>(s)] = 0.0;
        hi_next[static_cast<std::size_t>(s)] = 0.0;
        continue;
      }
      double worst = std::numeric_limits<double>::infinity();
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < spec.num_actions(); ++a) {
        for (const Transition& tr : transitions(spec, s, a)) {
          double tail_lo = tr.done ? 0.0 : lo[static_cast<std::size_t>(tr.next_state)];
          double tail_hi = tr.done ? 0.0 : hi[static_cast<std::size_t>(tr.next_state)];
          worst = std::min(worst, tr.reward + tail_lo);
          best = std::max(best, tr.reward + tail_hi);
        }
      }
      lo_next[static_cast<std::size_t>(s)] = worst;
      hi_next[static_cast<std::size_t>(s)] = best;
    }
    std::swap(lo, lo_next);
    std::swap(hi, hi_next);
  }
  auto s0 = static_cast<std::size_t>(spec.initial_state());
  return {lo[s0], hi[s0]};
}

}  // namespace mtro
