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
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mtro/dist.hpp"
#include "mtro/expert_model.hpp"
#include "mtro/games.hpp"
#include "mtro/returns_data.hpp"
#include "mtro/target_sampler.hpp"

namespace mtro {

/// Count-based return-conditioned policy: P(a | observation, target bin) from
/// smoothed (observation, return bin, action) counts. Unseen keys fall back to
/// uniform over actions.
class EmpiricalPolicy {
 public:
  EmpiricalPolicy(int num_actions, double smoothing);

  static EmpiricalPolicy fit(const std::vector<Episode>& dataset,
                             const QuantizationSpec& spec, int num_actions,
                             double smoothing = 1.0);

  std::vector<double> action_probs(int observation, int return_bin) const;
  int sample_action(int observation, int return_bin, Rng& rng) const;

  int num_actions() const { return num_actions_; }
  double smoothing() const { return smoothing_; }

  /// Raw count access for fitting and tests.
  void record(int observation, int return_bin, int action);

 private:
  int num_actions_;
  double smoothing_;
  std::map<std::pair<int, int>, std::vector<std::int64_t>> table_;
};

/// Count-based return predictor: P(return-to-go bin | observation). Unseen
/// observations fall back to the dataset-wide return-to-go histogram.
class EmpiricalReturnPredictor {
 public:
  static EmpiricalReturnPredictor fit(const std::vector<Episode>& dataset,
                                      const QuantizationSpec& spec);

  CategoricalReturnDist predict(int observation) const;
  const BinRange& range() const { return range_; }

 private:
  EmpiricalReturnPredictor(BinRange range, CategoricalReturnDist fallback)
      : range_(range), fallback_(std::move(fallback)) {}

  BinRange range_;
  std::map<int, std::vector<std::int64_t>> table_;
  CategoricalReturnDist fallback_;
};

/// File-backed predictor: JSON Lines with one record per (game_id,
/// observation), each carrying a logit vector of one entry per bin; converted
/// by max-subtracted softmax at load.
class FilePredictor {
 public:
  static FilePredictor load(const std::string& path, const BinRange& range);

  /// Throws MissingInput when (game_id, observation) has no record.
  CategoricalReturnDist predict(const std::string& game_id, int observation) const;
  bool has(const std::string& game_id, int observation) const;

 private:
  BinRange range_{0, 1};
  std::map<std::pair<std::string, int>, CategoricalReturnDist> table_;
};

/// Controlled degradation of predicted distributions: translate mass by
/// `shift` bins (mass piles up at the range edges), then flatten or sharpen
/// with temperature via p^(1/T), renormalized.
struct PredictorCorruption {
  int shift = 0;
  double temperature = 1.0;

  bool is_identity() const { return shift == 0 && temperature == 1.0; }
  void validate() const;
};

CategoricalReturnDist corrupt(const CategoricalReturnDist& d,
                              const PredictorCorruption& c);

using PredictorFn = std::function<CategoricalReturnDist(int observation)>;

struct TraceRow {
  int t;
  double alpha;
  int target_bin;
  double posterior_entropy;
};

struct EpisodeOutcome {
  double episode_return = 0.0;
  int steps = 0;
  std::uint64_t degenerate_steps = 0;
  std::vector<TraceRow> trace;
};

/// One evaluation episode: predict, corrupt, pick a target, act, step the
/// environment. All randomness comes from two streams derived from `seed`, so
/// the outcome is a pure function of its inputs.
EpisodeOutcome run_episode(const ToyGameSpec& spec, const EmpiricalPolicy& policy,
                           const PredictorFn& predictor,
                           const PredictorCorruption& corruption,
                           const DerdTable& derd, const MethodSpec& method,
                           std::uint64_t seed, bool record_trace = false);

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path);

}  // namespace mtro
