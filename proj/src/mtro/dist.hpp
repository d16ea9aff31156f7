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

#include <span>
#include <string>
#include <vector>

#include "mtro/errors.hpp"
#include "mtro/returns_data.hpp"
#include "mtro/rng.hpp"

namespace mtro {

/// Inclusive integer bin range shared by every distribution in one operation.
struct BinRange {
  int r_min = -20;
  int r_max = 100;

  int size() const { return r_max - r_min + 1; }
  int index_of(int bin) const { return bin - r_min; }
  int bin_at(int index) const { return r_min + index; }
  bool contains(int bin) const { return bin >= r_min && bin <= r_max; }
  bool operator==(const BinRange&) const = default;

  static BinRange of(const QuantizationSpec& spec) {
    return BinRange{spec.r_min, spec.r_max};
  }
  void validate() const;
};

/// Unnormalized log weights over a bin range. -inf encodes probability zero;
/// +inf and NaN are rejected.
struct LogWeights {
  BinRange range;
  std::vector<double> logw;

  double& at_bin(int bin) { return logw[static_cast<std::size_t>(range.index_of(bin))]; }
  double at_bin(int bin) const { return logw[static_cast<std::size_t>(range.index_of(bin))]; }

  static LogWeights zeros(const BinRange& range);
  static LogWeights neg_inf(const BinRange& range);
};

/// Normalized categorical distribution over quantized return bins.
/// Immutable value type; construction validates normalization.
class CategoricalReturnDist {
 public:
  CategoricalReturnDist(BinRange range, std::vector<double> probs);

  const BinRange& range() const { return range_; }
  std::span<const double> probs() const { return probs_; }
  double prob_at_index(std::size_t i) const { return probs_[i]; }
  double prob_at_bin(int bin) const {
    return probs_[static_cast<std::size_t>(range_.index_of(bin))];
  }
  int size() const { return range_.size(); }

  /// Shannon entropy in nats; zero-probability bins contribute nothing.
  double entropy() const;

  static CategoricalReturnDist point_mass(const BinRange& range, int bin);
  static CategoricalReturnDist uniform(const BinRange& range);

 private:
  BinRange range_;
  std::vector<double> probs_;
};

/// Max-subtracted exponentiation and normalization:
///   probs[i] = exp(logw[i] - m) / sum_j exp(logw[j] - m),  m = max finite logw.
/// Entries of -inf map to probability exactly 0. Throws DegeneratePosterior
/// when every entry is -inf; callers decide the fallback.
CategoricalReturnDist normalize(const LogWeights& w);

/// D_KL(p || q') where q' = (1-s) q + s uniform, s = epsilon * bin_count,
/// renormalized. Terms with p_i = 0 contribute 0. With epsilon = 0 and some
/// p_i > 0 on a q_i = 0 bin, throws InfiniteDivergence.
double kl_divergence(const CategoricalReturnDist& p, const CategoricalReturnDist& q,
                     double epsilon);

/// Elementwise arithmetic mean. Throws EmptyAverage on an empty list.
CategoricalReturnDist mean_of_dists(const std::vector<CategoricalReturnDist>& ds);

/// Inverse-CDF draw from the deterministic 64-bit stream. Never returns a bin
/// whose probability is zero.
int sample(const CategoricalReturnDist& d, Rng& rng);

/// `bin,prob` rows for the plot-emitting CLI.
void write_dist_csv(const CategoricalReturnDist& d, const std::string& path);

}  // namespace mtro
