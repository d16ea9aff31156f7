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

#include <string>

#include "mtro/dist.hpp"
#include "mtro/returns_data.hpp"

namespace mtro {

/// Parameters of the exponential expert classifier: weight(R) proportional to
/// exp(kappa * (R - r_low) / (r_high - r_low)).
struct ExponentialClassifierParams {
  double kappa = 10.0;
  double r_low = -20.0;
  double r_high = 100.0;

  void validate() const;
};

/// Proportional-form log weights of the exponential classifier over a bin
/// range; normalization is deferred to posterior combination.
LogWeights exp_classifier_logweights(const ExponentialClassifierParams& params,
                                     const BinRange& range);

/// Data-driven expert-return table: per-bin expert ratios and the dataset
/// reference distribution, both derived from return counts. Immutable after
/// construction; computed once per game and shared read-only.
class DerdTable {
 public:
  DerdTable(ReturnCounts counts, BinRange range, double lambda = 0.0);

  const ReturnCounts& counts() const { return counts_; }
  const BinRange& range() const { return range_; }
  double lambda() const { return lambda_; }

  /// log((n_expert(b) + lambda) / (N(b) + 2 lambda)); -inf where the
  /// numerator is zero (no expert mass and lambda = 0).
  LogWeights logweights() const;

  /// Smoothed expert ratio at one bin; NaN where N(b) = 0 and lambda = 0.
  double expert_ratio(int bin) const;

  /// N(b) / N_total over the full range, zeros where no episodes landed.
  const CategoricalReturnDist& reference_distribution() const { return reference_; }

  /// Highest bin carrying expert mass; the stand-in for a human-chosen
  /// initial target in the decrement baseline.
  int max_expert_bin() const;

  /// CSV artifact: `# game_id=<id> N_total=<n>` header, then
  /// bin,N,n_expert,ratio,reference_prob with ratio empty where N = 0.
  void write_csv(const std::string& path) const;
  static DerdTable from_csv(const std::string& path, double lambda = 0.0);

 private:
  ReturnCounts counts_;
  BinRange range_;
  double lambda_;
  CategoricalReturnDist reference_;
};

}  // namespace mtro
