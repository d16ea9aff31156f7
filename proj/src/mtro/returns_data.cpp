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

#include "mtro/returns_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace mtro {

void QuantizationSpec::validate() const {
  if (r_min >= r_max) {
    throw Error(ErrorCode::kValidation,
                "quantization: r_min must be < r_max (got " +
                    std::to_string(r_min) + " >= " + std::to_string(r_max) + ")");
  }
}

int quantize_return(double value, const QuantizationSpec& spec) {
  // Half away from zero keeps the rule symmetric around 0.
  double rounded = value >= 0.0 ? std::floor(value + 0.5) : std::ceil(value - 0.5);
  rounded = std::clamp(rounded, static_cast<double>(spec.r_min),
                       static_cast<double>(spec.r_max));
  return static_cast<int>(rounded);
}

std::vector<double> compute_returns_to_go(const std::vector<double>& rewards) {
  if (rewards.empty()) {
    throw Error(ErrorCode::kEmptyEpisode, "returns-to-go of an empty episode");
  }
  std::vector<double> rtg(rewards.size());
  double acc = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    acc += rewards[i];
    rtg[i] = acc;
  }
  return rtg;
}

void clip_rewards_in_place(Episode& episode, double lo, double hi) {
  for (double& r : episode.rewards) r = std::clamp(r, lo, hi);
  episode.returns_to_go.clear();
}

void label_experts(std::vector<Episode>& dataset, double fraction) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw Error(ErrorCode::kInvalidFraction,
                "expert fraction must lie in (0, 1], got " + std::to_string(fraction));
  }
  // Group indices per game, keeping file order for tie breaking.
  std::map<std::string, std::vector<std::size_t>> per_game;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    per_game[dataset[i].game_id].push_back(i);
  }
  for (auto& [game, idx] : per_game) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return dataset[a].generation_index < dataset[b].generation_index;
    });
    for (std::size_t k = 1; k < idx.size(); ++k) {
      if (dataset[idx[k]].generation_index == dataset[idx[k - 1]].generation_index) {
        std::cerr << "warning: duplicate generation_index "
                  << dataset[idx[k]].generation_index << " in game " << game
                  << "; ties broken by file order\n";
        break;
      }
    }
    auto expert_count = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(idx.size())));
    expert_count = std::min(expert_count, idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      dataset[idx[k]].expert = k >= idx.size() - expert_count;
    }
  }
}

void prepare_dataset(std::vector<Episode>& dataset, const QuantizationSpec& spec,
                     double expert_fraction) {
  spec.validate();
  for (Episode& e : dataset) {
    if (spec.clip_rewards) clip_rewards_in_place(e);
    e.returns_to_go = compute_returns_to_go(e.rewards);
  }
  label_experts(dataset, expert_fraction);
}

std::int64_t ReturnCounts::n(int bin) const {
  auto it = counts.find(bin);
  return it == counts.end() ? 0 : it->second;
}

std::int64_t ReturnCounts::n_expert(int bin) const {
  auto it = expert_counts.find(bin);
  return it == expert_counts.end() ? 0 : it->second;
}

void ReturnCounts::validate() const {
  if (total < 1) {
    throw Error(ErrorCode::kEmptyDataset, "return counts cover no episodes");
  }
  std::int64_t sum = 0;
  for (const auto& [bin, n] : counts) {
    sum += n;
    auto it = expert_counts.find(bin);
    std::int64_t ne = it == expert_counts.end() ? 0 : it->second;
    if (ne < 0 || ne > n) {
      throw Error(ErrorCode::kValidation,
                  "bin " + std::to_string(bin) + ": n_expert out of [0, N]");
    }
  }
  for (const auto& [bin, ne] : expert_counts) {
    if (ne > 0 && counts.find(bin) == counts.end()) {
      throw Error(ErrorCode::kValidation,
                  "bin " + std::to_string(bin) + ": expert count without episodes");
    }
  }
  if (sum != total) {
    throw Error(ErrorCode::kValidation, "sum of bin counts != N_total");
  }
}

const char* count_basis_name(CountBasis basis) {
  return basis == CountBasis::kEpisode ? "episode" : "timestep";
}

CountBasis count_basis_from_name(const std::string& name) {
  if (name == "episode") return CountBasis::kEpisode;
  if (name == "timestep") return CountBasis::kTimestep;
  throw Error(ErrorCode::kConfigError, "unknown count_basis '" + name + "'");
}

ReturnCounts build_return_counts(const std::vector<Episode>& dataset,
                                 const QuantizationSpec& spec, CountBasis basis) {
  spec.validate();
  if (dataset.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "cannot count returns of an empty dataset");
  }
  ReturnCounts out;
  out.game_id = dataset.front().game_id;
  for (const Episode& e : dataset) {
    if (e.game_id != out.game_id) {
      throw Error(ErrorCode::kValidation,
                  "return counts are per game; found episodes from '" + out.game_id +
                      "' and '" + e.game_id + "'");
    }
    if (e.returns_to_go.size() != e.rewards.size() || e.rewards.empty()) {
      throw Error(ErrorCode::kValidation,
                  "dataset must be prepared before counting (returns-to-go missing)");
    }
    if (basis == CountBasis::kEpisode) {
      int bin = quantize_return(e.episode_return(), spec);
      out.counts[bin] += 1;
      if (e.expert) out.expert_counts[bin] += 1;
      out.total += 1;
    } else {
      for (double rtg : e.returns_to_go) {
        int bin = quantize_return(rtg, spec);
        out.counts[bin] += 1;
        if (e.expert) out.expert_counts[bin] += 1;
        out.total += 1;
      }
    }
  }
  out.validate();
  return out;
}

namespace {

template <typename T>
std::vector<T> require_array(const nlohmann::json& record, const char* field,
                             std::size_t line_no) {
  if (!record.contains(field) || !record[field].is_array()) {
    throw Error(ErrorCode::kSchemaError,
                "line " + std::to_string(line_no) + ": missing array field '" +
                    field + "'");
  }
  try {
    return record[field].get<std::vector<T>>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kSchemaError,
                "line " + std::to_string(line_no) + ": field '" + field +
                    "' has elements of the wrong type");
  }
}

}  // namespace

std::vector<Episode> load_episodes(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kMissingInput, "cannot open episode file " + path);
  }
  std::vector<Episode> dataset;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
    Episode ep;
    if (!record.contains("game_id") || !record["game_id"].is_string()) {
      throw Error(ErrorCode::kSchemaError,
                  "line " + std::to_string(line_no) + ": missing string field 'game_id'");
    }
    ep.game_id = record["game_id"].get<std::string>();
    if (!record.contains("generation_index") ||
        !record["generation_index"].is_number_unsigned()) {
      throw Error(ErrorCode::kSchemaError,
                  "line " + std::to_string(line_no) +
                      ": missing non-negative integer field 'generation_index'");
    }
    ep.generation_index = record["generation_index"].get<std::uint64_t>();
    ep.observations = require_array<int>(record, "observations", line_no);
    ep.actions = require_array<int>(record, "actions", line_no);
    ep.rewards = require_array<double>(record, "rewards", line_no);
    if (ep.rewards.empty()) {
      throw Error(ErrorCode::kSchemaError,
                  "line " + std::to_string(line_no) + ": empty episode");
    }
    if (ep.observations.size() != ep.actions.size() ||
        ep.actions.size() != ep.rewards.size()) {
      throw Error(ErrorCode::kSchemaError,
                  "line " + std::to_string(line_no) +
                      ": observations/actions/rewards lengths differ");
    }
    dataset.push_back(std::move(ep));
  }
  return dataset;
}

void save_episodes(const std::vector<Episode>& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write episode file " + path);
  }
  for (const Episode& e : dataset) {
    nlohmann::json record{{"game_id", e.game_id},
                          {"generation_index", e.generation_index},
                          {"observations", e.observations},
                          {"actions", e.actions},
                          {"rewards", e.rewards}};
    out << record.dump() << '\n';
  }
  if (!out) {
    throw Error(ErrorCode::kIoError, "short write to " + path);
  }
}

void write_counts_csv(const ReturnCounts& counts, const QuantizationSpec& spec,
                      const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write counts file " + path);
  }
  out << "# game_id=" << counts.game_id << " N_total=" << counts.total << '\n';
  out << "bin,N,n_expert\n";
  for (int bin = spec.r_min; bin <= spec.r_max; ++bin) {
    out << bin << ',' << counts.n(bin) << ',' << counts.n_expert(bin) << '\n';
  }
}

}  // namespace mtro
