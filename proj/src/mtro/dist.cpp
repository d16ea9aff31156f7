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

#include "mtro/dist.hpp"

#include <cmath>
#include <fstream>
#include <limits>

namespace mtro {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void BinRange::validate() const {
  if (r_min >= r_max) {
    throw Error(ErrorCode::kValidation, "bin range: r_min must be < r_max");
  }
}

LogWeights LogWeights::zeros(const BinRange& range) {
  return LogWeights{range, std::vector<double>(static_cast<std::size_t>(range.size()), 0.0)};
}

LogWeights LogWeights::neg_inf(const BinRange& range) {
  return LogWeights{range, std::vector<double>(static_cast<std::size_t>(range.size()), -kInf)};
}

CategoricalReturnDist::CategoricalReturnDist(BinRange range, std::vector<double> probs)
    : range_(range), probs_(std::move(probs)) {
  if (probs_.size() != static_cast<std::size_t>(range_.size())) {
    throw Error(ErrorCode::kValidation, "probability vector length != bin count");
  }
  double sum = 0.0;
  double max_p = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::kValidation, "probabilities must be finite and >= 0");
    }
    sum += p;
    max_p = std::max(max_p, p);
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kValidation,
                "probabilities sum to " + std::to_string(sum) + ", expected 1");
  }
  if (max_p <= 0.0) {
    throw Error(ErrorCode::kValidation, "distribution has no positive entry");
  }
}

double CategoricalReturnDist::entropy() const {
  double h = 0.0;
  for (double p : probs_) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

CategoricalReturnDist CategoricalReturnDist::point_mass(const BinRange& range, int bin) {
  std::vector<double> p(static_cast<std::size_t>(range.size()), 0.0);
  p[static_cast<std::size_t>(range.index_of(bin))] = 1.0;
  return CategoricalReturnDist(range, std::move(p));
}

CategoricalReturnDist CategoricalReturnDist::uniform(const BinRange& range) {
  auto n = static_cast<std::size_t>(range.size());
  return CategoricalReturnDist(range, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

CategoricalReturnDist normalize(const LogWeights& w) {
  double m = -kInf;
  for (double lw : w.logw) {
    if (std::isnan(lw) || lw == kInf) {
      throw Error(ErrorCode::kValidation, "log weights must be in [-inf, +inf)");
    }
    m = std::max(m, lw);
  }
  if (m == -kInf) {
    throw Error(ErrorCode::kDegeneratePosterior, "all log weights are -inf");
  }
  std::vector<double> p(w.logw.size(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < w.logw.size(); ++i) {
    if (w.logw[i] == -kInf) continue;  // exactly zero, not exp(-inf)
    p[i] = std::exp(w.logw[i] - m);
    sum += p[i];
  }
  for (double& x : p) x /= sum;
  return CategoricalReturnDist(w.range, std::move(p));
}

double kl_divergence(const CategoricalReturnDist& p, const CategoricalReturnDist& q,
                     double epsilon) {
  if (p.range() != q.range()) {
    throw Error(ErrorCode::kValidation, "KL divergence needs a shared bin range");
  }
  if (epsilon < 0.0) {
    throw Error(ErrorCode::kValidation, "KL smoothing epsilon must be >= 0");
  }
  auto n = static_cast<std::size_t>(p.size());
  double s = epsilon * static_cast<double>(n);
  double uniform = 1.0 / static_cast<double>(n);

  // Smooth q toward uniform, then renormalize. s = 0 leaves q untouched so
  // the identity case is exact.
  std::vector<double> qs(n);
  double qsum = 1.0;
  if (s > 0.0) {
    qsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      qs[i] = (1.0 - s) * q.prob_at_index(i) + s * uniform;
      qsum += qs[i];
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) qs[i] = q.prob_at_index(i);
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double pi = p.prob_at_index(i);
    if (pi <= 0.0) continue;
    double qi = qs[i] / qsum;
    if (qi <= 0.0) {
      throw Error(ErrorCode::kInfiniteDivergence,
                  "p has mass on a zero-probability bin of q; pass epsilon > 0");
    }
    kl += pi * std::log(pi / qi);
  }
  // Round-off can push a mathematically non-negative sum a few ulps below 0.
  return std::max(kl, 0.0);
}

CategoricalReturnDist mean_of_dists(const std::vector<CategoricalReturnDist>& ds) {
  if (ds.empty()) {
    throw Error(ErrorCode::kEmptyAverage, "mean of zero distributions");
  }
  const BinRange& range = ds.front().range();
  auto n = static_cast<std::size_t>(range.size());
  std::vector<double> acc(n, 0.0);
  for (const auto& d : ds) {
    if (d.range() != range) {
      throw Error(ErrorCode::kValidation, "averaged distributions must share a bin range");
    }
    for (std::size_t i = 0; i < n; ++i) acc[i] += d.prob_at_index(i);
  }
  for (double& x : acc) x /= static_cast<double>(ds.size());
  return CategoricalReturnDist(range, std::move(acc));
}

int sample(const CategoricalReturnDist& d, Rng& rng) {
  double u = rng.next_double();
  double cum = 0.0;
  int last_positive = -1;
  auto n = static_cast<std::size_t>(d.size());
  for (std::size_t i = 0; i < n; ++i) {
    double p = d.prob_at_index(i);
    if (p <= 0.0) continue;
    cum += p;
    last_positive = static_cast<int>(i);
    if (u < cum) return d.range().bin_at(static_cast<int>(i));
  }
  // Round-off shortfall in the cumulative sum: fall back to the top bin.
  return d.range().bin_at(last_positive);
}

void write_dist_csv(const CategoricalReturnDist& d, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write distribution file " + path);
  }
  out << "bin,prob\n";
  char buf[64];
  for (int i = 0; i < d.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", d.prob_at_index(static_cast<std::size_t>(i)));
    out << d.range().bin_at(i) << ',' << buf << '\n';
  }
}

}  // namespace mtro
