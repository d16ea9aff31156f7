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

#include "mtro/empirical.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace mtro {

namespace {
// Stream-splitting tags so the sampler and the world never share draws.
constexpr std::uint64_t kSamplerTag = 0x53414D504C455221ULL;
constexpr std::uint64_t kWorldTag = 0x574F524C44212121ULL;
}  // namespace

EmpiricalPolicy::EmpiricalPolicy(int num_actions, double smoothing)
    : num_actions_(num_actions), smoothing_(smoothing) {
  if (num_actions < 1) {
    throw Error(ErrorCode::kValidation, "policy needs at least one action");
  }
  if (!(smoothing > 0.0)) {
    throw Error(ErrorCode::kValidation, "policy smoothing must be > 0");
  }
}

void EmpiricalPolicy::record(int observation, int return_bin, int action) {
  auto& row = table_[{observation, return_bin}];
  if (row.empty()) row.assign(static_cast<std::size_t>(num_actions_), 0);
  row[static_cast<std::size_t>(action)] += 1;
}

EmpiricalPolicy EmpiricalPolicy::fit(const std::vector<Episode>& dataset,
                                     const QuantizationSpec& spec, int num_actions,
                                     double smoothing) {
  if (dataset.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "cannot fit a policy on an empty dataset");
  }
  EmpiricalPolicy policy(num_actions, smoothing);
  for (const Episode& e : dataset) {
    if (e.returns_to_go.size() != e.length()) {
      throw Error(ErrorCode::kValidation,
                  "dataset must be prepared before fitting (returns-to-go missing)");
    }
    for (std::size_t t = 0; t < e.length(); ++t) {
      int bin = quantize_return(e.returns_to_go[t], spec);
      policy.record(e.observations[t], bin, e.actions[t]);
    }
  }
  return policy;
}

std::vector<double> EmpiricalPolicy::action_probs(int observation, int return_bin) const {
  auto n = static_cast<std::size_t>(num_actions_);
  auto it = table_.find({observation, return_bin});
  if (it == table_.end()) {
    return std::vector<double>(n, 1.0 / static_cast<double>(num_actions_));
  }
  std::int64_t total = 0;
  for (std::int64_t c : it->second) total += c;
  std::vector<double> probs(n);
  double denom = static_cast<double>(total) + smoothing_ * static_cast<double>(num_actions_);
  for (std::size_t a = 0; a < n; ++a) {
    probs[a] = (static_cast<double>(it->second[a]) + smoothing_) / denom;
  }
  return probs;
}

int EmpiricalPolicy::sample_action(int observation, int return_bin, Rng& rng) const {
  std::vector<double> probs = action_probs(observation, return_bin);
  double u = rng.next_double();
  double cum = 0.0;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    cum += probs[a];
    if (u < cum) return static_cast<int>(a);
  }
  return num_actions_ - 1;
}

EmpiricalReturnPredictor EmpiricalReturnPredictor::fit(
    const std::vector<Episode>& dataset, const QuantizationSpec& spec) {
  if (dataset.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "cannot fit a predictor on an empty dataset");
  }
  BinRange range = BinRange::of(spec);
  auto n = static_cast<std::size_t>(range.size());
  std::map<int, std::vector<std::int64_t>> table;
  std::vector<std::int64_t> global(n, 0);
  for (const Episode& e : dataset) {
    if (e.returns_to_go.size() != e.length()) {
      throw Error(ErrorCode::kValidation,
                  "dataset must be prepared before fitting (returns-to-go missing)");
    }
    for (std::size_t t = 0; t < e.length(); ++t) {
      int bin = quantize_return(e.returns_to_go[t], spec);
      auto& row = table[e.observations[t]];
      if (row.empty()) row.assign(n, 0);
      row[static_cast<std::size_t>(range.index_of(bin))] += 1;
      global[static_cast<std::size_t>(range.index_of(bin))] += 1;
    }
  }
  std::int64_t gtotal = 0;
  for (std::int64_t c : global) gtotal += c;
  std::vector<double> fallback(n);
  for (std::size_t i = 0; i < n; ++i) {
    fallback[i] = static_cast<double>(global[i]) / static_cast<double>(gtotal);
  }
  EmpiricalReturnPredictor predictor(range,
                                     CategoricalReturnDist(range, std::move(fallback)));
  predictor.table_ = std::move(table);
  return predictor;
}

CategoricalReturnDist EmpiricalReturnPredictor::predict(int observation) const {
  auto it = table_.find(observation);
  if (it == table_.end()) return fallback_;
  std::int64_t total = 0;
  for (std::int64_t c : it->second) total += c;
  auto n = it->second.size();
  std::vector<double> probs(n);
  for (std::size_t i = 0; i < n; ++i) {
    probs[i] = static_cast<double>(it->second[i]) / static_cast<double>(total);
  }
  return CategoricalReturnDist(range_, std::move(probs));
}

FilePredictor FilePredictor::load(const std::string& path, const BinRange& range) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kMissingInput, "cannot open predictor file " + path);
  }
  FilePredictor predictor;
  predictor.range_ = range;
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
    if (!record.contains("game_id") || !record.contains("observation") ||
        !record.contains("logits") || !record["logits"].is_array()) {
      throw Error(ErrorCode::kSchemaError,
                  "line " + std::to_string(line_no) +
                      ": need fields game_id, observation, logits");
    }
    auto logits = record["logits"].get<std::vector<double>>();
    if (logits.size() != static_cast<std::size_t>(range.size())) {
      throw Error(ErrorCode::kSchemaError,
                  "line " + std::to_string(line_no) + ": logit vector has " +
                      std::to_string(logits.size()) + " entries, expected " +
                      std::to_string(range.size()));
    }
    LogWeights w{range, std::move(logits)};
    predictor.table_.emplace(
        std::make_pair(record["game_id"].get<std::string>(),
                       record["observation"].get<int>()),
        normalize(w));
  }
  return predictor;
}

bool FilePredictor::has(const std::string& game_id, int observation) const {
  return table_.contains({game_id, observation});
}

CategoricalReturnDist FilePredictor::predict(const std::string& game_id,
                                             int observation) const {
  auto it = table_.find({game_id, observation});
  if (it == table_.end()) {
    throw Error(ErrorCode::kMissingInput,
                "predictor file has no record for (" + game_id + ", " +
                    std::to_string(observation) + ")");
  }
  return it->second;
}

void PredictorCorruption::validate() const {
  if (!(temperature > 0.0)) {
    throw Error(ErrorCode::kConfigError, "corruption temperature must be > 0");
  }
}

CategoricalReturnDist corrupt(const CategoricalReturnDist& d,
                              const PredictorCorruption& c) {
  c.validate();
  if (c.is_identity()) return d;
  const BinRange& range = d.range();
  auto n = static_cast<std::size_t>(range.size());
  std::vector<double> shifted(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto j = static_cast<std::int64_t>(i) + c.shift;
    j = std::clamp<std::int64_t>(j, 0, static_cast<std::int64_t>(n) - 1);
    shifted[static_cast<std::size_t>(j)] += d.prob_at_index(i);
  }
  if (c.temperature != 1.0) {
    double sum = 0.0;
    for (double& p : shifted) {
      p = p > 0.0 ? std::pow(p, 1.0 / c.temperature) : 0.0;
      sum += p;
    }
    for (double& p : shifted) p /= sum;
  }
  return CategoricalReturnDist(range, std::move(shifted));
}

EpisodeOutcome run_episode(const ToyGameSpec& spec, const EmpiricalPolicy& policy,
                           const PredictorFn& predictor,
                           const PredictorCorruption& corruption,
                           const DerdTable& derd, const MethodSpec& method,
                           std::uint64_t seed, bool record_trace) {
  TargetSampler sampler(derd, method, mix64(seed ^ kSamplerTag));
  Rng world(mix64(seed ^ kWorldTag));
  if (method.kind == MethodKind::kDtDecrement) {
    sampler.set_initial_target(static_cast<double>(derd.max_expert_bin()));
  }

  ToyEnv env(spec);
  EpisodeOutcome outcome;
  int obs = env.reset();
  while (true) {
    CategoricalReturnDist predicted = corrupt(predictor(obs), corruption);
    auto sres = sampler.step(predicted);
    int action = policy.sample_action(obs, sres.target_bin, world);
    auto out = env.step(action, world);
    outcome.episode_return += out.reward;
    ++outcome.steps;
    sampler.apply_reward(out.reward);
    if (record_trace) {
      outcome.trace.push_back(TraceRow{outcome.steps, sres.alpha, sres.target_bin,
                                       sres.posterior_entropy});
    }
    if (out.done) break;
    obs = out.observation;
  }
  outcome.degenerate_steps = sampler.degenerate_count();
  return outcome;
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write trace file " + path);
  }
  out << "t,alpha,target_bin,posterior_entropy\n";
  char buf[128];
  for (const TraceRow& row : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%d,%.17g", row.t, row.alpha,
                  row.target_bin, row.posterior_entropy);
    out << buf << '\n';
  }
}

}  // namespace mtro
