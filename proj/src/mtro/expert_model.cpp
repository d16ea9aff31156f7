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

#include "mtro/expert_model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace mtro {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

CategoricalReturnDist make_reference(const ReturnCounts& counts, const BinRange& range) {
  std::vector<double> probs(static_cast<std::size_t>(range.size()), 0.0);
  for (const auto& [bin, n] : counts.counts) {
    if (!range.contains(bin)) {
      throw Error(ErrorCode::kValidation,
                  "count bin " + std::to_string(bin) + " outside quantization range");
    }
    probs[static_cast<std::size_t>(range.index_of(bin))] =
        static_cast<double>(n) / static_cast<double>(counts.total);
  }
  return CategoricalReturnDist(range, std::move(probs));
}

}  // namespace

void ExponentialClassifierParams::validate() const {
  if (!std::isfinite(kappa)) {
    throw Error(ErrorCode::kValidation, "classifier kappa must be finite");
  }
  if (!(r_low < r_high)) {
    throw Error(ErrorCode::kDegenerateBounds,
                "classifier needs r_low < r_high; got [" + std::to_string(r_low) +
                    ", " + std::to_string(r_high) + "]");
  }
}

LogWeights exp_classifier_logweights(const ExponentialClassifierParams& params,
                                     const BinRange& range) {
  params.validate();
  LogWeights w = LogWeights::zeros(range);
  for (int i = 0; i < range.size(); ++i) {
    double r = static_cast<double>(range.bin_at(i));
    w.logw[static_cast<std::size_t>(i)] =
        params.kappa * (r - params.r_low) / (params.r_high - params.r_low);
  }
  return w;
}

DerdTable::DerdTable(ReturnCounts counts, BinRange range, double lambda)
    : counts_(std::move(counts)),
      range_(range),
      lambda_(lambda),
      reference_(make_reference(counts_, range_)) {
  range_.validate();
  counts_.validate();
  if (lambda_ < 0.0) {
    throw Error(ErrorCode::kValidation, "derd smoothing lambda must be >= 0");
  }
}

LogWeights DerdTable::logweights() const {
  LogWeights w = LogWeights::neg_inf(range_);
  for (int i = 0; i < range_.size(); ++i) {
    int bin = range_.bin_at(i);
    double num = static_cast<double>(counts_.n_expert(bin)) + lambda_;
    double den = static_cast<double>(counts_.n(bin)) + 2.0 * lambda_;
    if (num > 0.0 && den > 0.0) {
      w.logw[static_cast<std::size_t>(i)] = std::log(num / den);
    }
  }
  return w;
}

double DerdTable::expert_ratio(int bin) const {
  double num = static_cast<double>(counts_.n_expert(bin)) + lambda_;
  double den = static_cast<double>(counts_.n(bin)) + 2.0 * lambda_;
  if (den <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return num / den;
}

int DerdTable::max_expert_bin() const {
  int best = range_.r_min;
  bool found = false;
  for (const auto& [bin, n] : counts_.expert_counts) {
    if (n > 0 && (!found || bin > best)) {
      best = bin;
      found = true;
    }
  }
  if (!found) {
    throw Error(ErrorCode::kValidation, "no expert episodes in counts");
  }
  return best;
}

void DerdTable::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write derd file " + path);
  }
  out << "# game_id=" << counts_.game_id << " N_total=" << counts_.total << '\n';
  out << "bin,N,n_expert,ratio,reference_prob\n";
  char buf[64];
  for (int i = 0; i < range_.size(); ++i) {
    int bin = range_.bin_at(i);
    out << bin << ',' << counts_.n(bin) << ',' << counts_.n_expert(bin) << ',';
    double ratio = expert_ratio(bin);
    if (!std::isnan(ratio)) {
      std::snprintf(buf, sizeof buf, "%.17g", ratio);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g",
                  reference_.prob_at_index(static_cast<std::size_t>(i)));
    out << ',' << buf << '\n';
  }
}

DerdTable DerdTable::from_csv(const std::string& path, double lambda) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kMissingInput, "cannot open derd file " + path);
  }
  std::string line;
  if (!std::getline(in, line) || line.rfind("# game_id=", 0) != 0) {
    throw Error(ErrorCode::kParseError, path + ": missing '# game_id=...' header");
  }
  ReturnCounts counts;
  {
    std::istringstream hdr(line.substr(2));
    std::string field;
    while (hdr >> field) {
      auto eq = field.find('=');
      if (eq == std::string::npos) continue;
      std::string key = field.substr(0, eq);
      std::string value = field.substr(eq + 1);
      if (key == "game_id") counts.game_id = value;
      if (key == "N_total") counts.total = std::stoll(value);
    }
  }
  if (!std::getline(in, line) || line.rfind("bin,N,n_expert", 0) != 0) {
    throw Error(ErrorCode::kParseError, path + ": missing column header");
  }
  int r_min = 0;
  int r_max = 0;
  bool first = true;
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    int bin = 0;
    std::int64_t n = 0;
    std::int64_t ne = 0;
    try {
      std::getline(row, cell, ',');
      bin = std::stoi(cell);
      std::getline(row, cell, ',');
      n = std::stoll(cell);
      std::getline(row, cell, ',');
      ne = std::stoll(cell);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParseError,
                  path + " line " + std::to_string(line_no) + ": malformed row");
    }
    if (first) {
      r_min = bin;
      first = false;
    }
    r_max = bin;
    if (n > 0) counts.counts[bin] = n;
    if (ne > 0) counts.expert_counts[bin] = ne;
  }
  if (first) {
    throw Error(ErrorCode::kParseError, path + ": no bin rows");
  }
  return DerdTable(std::move(counts), BinRange{r_min, r_max}, lambda);
}

}  // namespace mtro
