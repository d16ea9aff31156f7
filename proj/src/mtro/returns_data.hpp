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
#include <map>
#include <string>
#include <vector>

#include "mtro/errors.hpp"

namespace mtro {

/// Quantized-return bin layout. One bin per integer in [r_min, r_max].
struct QuantizationSpec {
  int r_min = -20;
  int r_max = 100;
  bool clip_rewards = true;  // clip each reward to [-1, 1] at ingestion

  int bin_count() const { return r_max - r_min + 1; }
  void validate() const;
};

/// Round half away from zero, then clamp into [r_min, r_max].
int quantize_return(double value, const QuantizationSpec& spec);

/// One trajectory. `returns_to_go` and `expert` are derived at ingestion and
/// never serialized.
struct Episode {
  std::string game_id;
  std::uint64_t generation_index = 0;  // ordinal in the behavior agent's training
  std::vector<int> observations;
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<double> returns_to_go;  // derived
  bool expert = false;                // derived

  std::size_t length() const { return rewards.size(); }
  double episode_return() const { return returns_to_go.front(); }
};

/// Suffix sums of the reward sequence. Throws EmptyEpisode on empty input.
std::vector<double> compute_returns_to_go(const std::vector<double>& rewards);

/// Clip every reward into [lo, hi] in place. Invalidates returns_to_go.
void clip_rewards_in_place(Episode& episode, double lo = -1.0, double hi = 1.0);

/// Per game, flag the last ceil(fraction * count) episodes by generation_index
/// as expert. fraction must lie in (0, 1]. Ties in generation_index are broken
/// by list order and reported on stderr.
void label_experts(std::vector<Episode>& dataset, double fraction);

/// Recompute returns-to-go for every episode, clipping rewards first when the
/// spec asks for it, then label experts. The standard ingestion path.
void prepare_dataset(std::vector<Episode>& dataset, const QuantizationSpec& spec,
                     double expert_fraction);

struct ReturnCounts {
  std::string game_id;
  std::map<int, std::int64_t> counts;         // N(b)
  std::map<int, std::int64_t> expert_counts;  // n_expert(b)
  std::int64_t total = 0;                     // N_total

  std::int64_t n(int bin) const;
  std::int64_t n_expert(int bin) const;
  void validate() const;
};

/// Whether counts index whole episodes (by the return at t=1) or every
/// per-timestep return-to-go occurrence.
enum class CountBasis { kEpisode, kTimestep };

const char* count_basis_name(CountBasis basis);
CountBasis count_basis_from_name(const std::string& name);

/// Histogram of quantized returns with the expert sub-histogram. The dataset
/// must be prepared (returns-to-go present, experts labeled) and single-game.
ReturnCounts build_return_counts(const std::vector<Episode>& dataset,
                                 const QuantizationSpec& spec,
                                 CountBasis basis = CountBasis::kEpisode);

/// JSON Lines episode files: one object per line with fields game_id,
/// generation_index, observations, actions, rewards.
std::vector<Episode> load_episodes(const std::string& path);
void save_episodes(const std::vector<Episode>& dataset, const std::string& path);

/// Count-table CSV: `# game_id=<id> N_total=<n>` header, then bin,N,n_expert.
void write_counts_csv(const ReturnCounts& counts, const QuantizationSpec& spec,
                      const std::string& path);

}  // namespace mtro
