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

#include "mtro/target_sampler.hpp"

#include <cmath>
#include <limits>

namespace mtro {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_log(double p) { return p > 0.0 ? std::log(p) : -kInf; }
}  // namespace

const char* method_name(MethodKind kind) {
  switch (kind) {
    case MethodKind::kMgdtBayes: return "mgdt_bayes";
    case MethodKind::kNaive: return "naive";
    case MethodKind::kMtro: return "mtro";
    case MethodKind::kMtroNoDerd: return "mtro_no_derd";
    case MethodKind::kMtroNoBarp: return "mtro_no_barp";
    case MethodKind::kDtDecrement: return "dt_decrement";
  }
  return "unknown";
}

MethodKind method_from_name(const std::string& name) {
  if (name == "mgdt_bayes") return MethodKind::kMgdtBayes;
  if (name == "naive") return MethodKind::kNaive;
  if (name == "mtro") return MethodKind::kMtro;
  if (name == "mtro_no_derd") return MethodKind::kMtroNoDerd;
  if (name == "mtro_no_barp") return MethodKind::kMtroNoBarp;
  if (name == "dt_decrement") return MethodKind::kDtDecrement;
  throw Error(ErrorCode::kConfigError, "unknown method '" + name + "'");
}

bool method_uses_derd(MethodKind kind) {
  switch (kind) {
    case MethodKind::kNaive:
    case MethodKind::kMtro:
    case MethodKind::kMtroNoBarp:
      return true;
    default:
      return false;
  }
}

void MethodSpec::validate() const {
  if (warmup_len < 1) {
    throw Error(ErrorCode::kValidation, "warmup length must be >= 1");
  }
  if (!(kl_epsilon >= 0.0)) {
    throw Error(ErrorCode::kValidation, "kl_epsilon must be >= 0");
  }
  classifier.validate();
}

double compute_alpha(const std::vector<CategoricalReturnDist>& predicted,
                     const CategoricalReturnDist& reference, double epsilon) {
  return kl_divergence(mean_of_dists(predicted), reference, epsilon) + 1.0;
}

CategoricalReturnDist combine_posterior(const LogWeights& expert_logw,
                                        const CategoricalReturnDist& predicted,
                                        const CategoricalReturnDist& reference,
                                        double alpha, MethodKind kind) {
  if (!(alpha >= 1.0)) {
    throw Error(ErrorCode::kValidation, "alpha must be >= 1");
  }
  if (expert_logw.range != predicted.range() || predicted.range() != reference.range()) {
    throw Error(ErrorCode::kValidation, "posterior combination needs a shared bin range");
  }

  double pred_coeff = 1.0;
  double ref_coeff = 0.0;
  switch (kind) {
    case MethodKind::kMgdtBayes:
    case MethodKind::kMtroNoBarp:
      break;  // plain Bayes product; alpha ignored
    case MethodKind::kNaive:
      pred_coeff = 1.0 / alpha;
      break;
    case MethodKind::kMtro:
    case MethodKind::kMtroNoDerd:
      pred_coeff = 1.0 / alpha;
      ref_coeff = 1.0 - 1.0 / alpha;
      break;
    case MethodKind::kDtDecrement:
      throw Error(ErrorCode::kValidation, "the decrement baseline has no posterior");
  }

  LogWeights combined{expert_logw.range,
                      std::vector<double>(expert_logw.logw.size(), -kInf)};
  for (std::size_t i = 0; i < combined.logw.size(); ++i) {
    double w = expert_logw.logw[i];
    if (w == -kInf) continue;
    w += pred_coeff * safe_log(predicted.prob_at_index(i));
    // A zero coefficient drops the term; 0 * -inf would poison it with NaN.
    if (ref_coeff != 0.0) {
      w += ref_coeff * safe_log(reference.prob_at_index(i));
    }
    combined.logw[i] = w;
  }
  return normalize(combined);
}

TargetSampler::TargetSampler(const DerdTable& derd, const MethodSpec& spec,
                             std::uint64_t seed)
    : derd_(&derd),
      spec_(spec),
      expert_logw_(method_uses_derd(spec.kind) || spec.kind == MethodKind::kDtDecrement
                       ? derd.logweights()
                       : exp_classifier_logweights(spec.classifier, derd.range())),
      quant_{derd.range().r_min, derd.range().r_max, false},
      rng_(seed) {
  spec_.validate();
}

void TargetSampler::set_initial_target(double target) { current_target_ = target; }

void TargetSampler::apply_reward(double reward) {
  if (spec_.kind == MethodKind::kDtDecrement) {
    current_target_ = decrement_target(current_target_, reward);
  }
}

TargetSampler::StepResult TargetSampler::step(const CategoricalReturnDist& predicted) {
  StepResult result;
  if (spec_.kind == MethodKind::kDtDecrement) {
    result.target_bin = quantize_return(current_target_, quant_);
    result.alpha = 1.0;
    ++t_;
    return result;
  }

  if (static_cast<int>(warmup_.size()) < spec_.warmup_len) {
    warmup_.push_back(predicted);
  }
  if (t_ == spec_.warmup_len && !alpha_.has_value()) {
    alpha_ = compute_alpha(warmup_, derd_->reference_distribution(), spec_.kl_epsilon);
  }
  double alpha = alpha_.value_or(1.0);
  result.alpha = alpha;

  const CategoricalReturnDist& reference = derd_->reference_distribution();
  try {
    CategoricalReturnDist posterior =
        combine_posterior(expert_logw_, predicted, reference, alpha, spec_.kind);
    result.target_bin = sample(posterior, rng_);
    result.posterior_entropy = posterior.entropy();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegeneratePosterior) throw;
    // No bin survives the combination; fall back to the dataset distribution.
    ++degenerate_;
    result.degenerate = true;
    result.target_bin = sample(reference, rng_);
    result.posterior_entropy = reference.entropy();
  }
  ++t_;
  return result;
}

}  // namespace mtro
