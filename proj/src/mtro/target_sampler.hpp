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
#include <optional>
#include <string>
#include <vector>

#include "mtro/dist.hpp"
#include "mtro/expert_model.hpp"

namespace mtro {

/// Target-return selection rules. The first five are the posterior
/// combinations compared in the evaluation tables; kDtDecrement is the plain
/// fixed-target-minus-reward baseline.
enum class MethodKind {
  kMgdtBayes,    // exponential classifier * predicted
  kNaive,        // derd + (1/alpha) log predicted
  kMtro,         // derd + (1/alpha) log predicted + (1 - 1/alpha) log reference
  kMtroNoDerd,   // classifier + (1/alpha) log predicted + (1 - 1/alpha) log reference
  kMtroNoBarp,   // derd * predicted
  kDtDecrement,  // fixed initial target decremented by observed rewards
};

const char* method_name(MethodKind kind);
MethodKind method_from_name(const std::string& name);

/// Whether the expert weights come from the offline data (derd) rather than
/// the exponential classifier.
bool method_uses_derd(MethodKind kind);

struct MethodSpec {
  MethodKind kind = MethodKind::kMtro;
  ExponentialClassifierParams classifier;  // used by kMgdtBayes, kMtroNoDerd
  int warmup_len = 20;                     // ell
  double kl_epsilon = 1e-6;

  void validate() const;
};

/// alpha = D_KL(mean(predicted) || smoothed reference) + 1, computed from the
/// first warmup_len predicted distributions. Always >= 1.
double compute_alpha(const std::vector<CategoricalReturnDist>& predicted,
                     const CategoricalReturnDist& reference, double epsilon);

/// One posterior combination step in log space. alpha must be >= 1; a
/// coefficient of exactly zero drops its term so the alpha = 1 case reduces
/// to the plain Bayes product bit-for-bit. Throws DegeneratePosterior when
/// every combined weight is -inf.
CategoricalReturnDist combine_posterior(const LogWeights& expert_logw,
                                        const CategoricalReturnDist& predicted,
                                        const CategoricalReturnDist& reference,
                                        double alpha, MethodKind kind);

/// Plain decrement update for the fixed-target baseline.
inline double decrement_target(double target, double reward) { return target - reward; }

/// Per-episode state of the action-generation loop: warm-up buffer, frozen
/// alpha, step counter, and the sampling stream. Never shared between
/// episodes or threads.
class TargetSampler {
 public:
  TargetSampler(const DerdTable& derd, const MethodSpec& spec, std::uint64_t seed);

  struct StepResult {
    int target_bin = 0;
    double alpha = 1.0;
    bool degenerate = false;       // posterior collapsed; sampled the reference
    double posterior_entropy = 0;  // entropy of the distribution actually sampled
  };

  /// Advance one step: buffer the prediction while warming up, freeze alpha
  /// at step warmup_len, combine per the method, and sample a target bin.
  StepResult step(const CategoricalReturnDist& predicted);

  /// kDtDecrement only: set the initial target before the first step and
  /// push each observed reward after the corresponding step.
  void set_initial_target(double target);
  void apply_reward(double reward);

  int step_count() const { return t_ - 1; }
  std::optional<double> alpha() const { return alpha_; }
  std::uint64_t degenerate_count() const { return degenerate_; }
  double current_target() const { return current_target_; }

 private:
  const DerdTable* derd_;
  MethodSpec spec_;
  LogWeights expert_logw_;
  QuantizationSpec quant_;
  int t_ = 1;
  std::vector<CategoricalReturnDist> warmup_;
  std::optional<double> alpha_;
  double current_target_ = 0.0;
  Rng rng_;
  std::uint64_t degenerate_ = 0;
};

}  // namespace mtro
