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

#include "mtro/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace mtro {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r");
  auto end = s.find_last_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

class KeyValueFile {
 public:
  explicit KeyValueFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
      throw Error(ErrorCode::kMissingInput, "cannot open config file " + path);
    }
    std::string line;
    std::string section = "run";
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      line = trim(line);
      if (line.empty() || line[0] == '#' || line[0] == ';') continue;
      if (line.front() == '[') {
        if (line.back() != ']') {
          throw Error(ErrorCode::kConfigError,
                      "config line " + std::to_string(line_no) + ": unclosed section");
        }
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorCode::kConfigError,
                    "config line " + std::to_string(line_no) + ": expected key = value");
      }
      std::string key = section + "." + trim(line.substr(0, eq));
      if (values_.count(key)) {
        throw Error(ErrorCode::kConfigError, "duplicate config key '" + key + "'");
      }
      values_[key] = trim(line.substr(eq + 1));
    }
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    seen_.push_back(key);
    return it->second;
  }

  std::string require_string(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) {
      throw Error(ErrorCode::kConfigError, "config is missing required key '" + key + "'");
    }
    seen_.push_back(key);
    return it->second;
  }

  double get_double(const std::string& key, double fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    seen_.push_back(key);
    try {
      std::size_t pos = 0;
      double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(it->second);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfigError,
                  "config key '" + key + "': '" + it->second + "' is not a number");
    }
  }

  std::int64_t get_int(const std::string& key, std::int64_t fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    seen_.push_back(key);
    try {
      std::size_t pos = 0;
      std::int64_t v = std::stoll(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(it->second);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfigError,
                  "config key '" + key + "': '" + it->second + "' is not an integer");
    }
  }

  std::uint64_t require_u64(const std::string& key) {
    std::string raw = require_string(key);
    try {
      std::size_t pos = 0;
      if (raw.empty() || raw[0] == '-') throw std::invalid_argument(raw);
      std::uint64_t v = std::stoull(raw, &pos);
      if (pos != raw.size()) throw std::invalid_argument(raw);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfigError,
                  "config key '" + key + "': '" + raw + "' is not a 64-bit seed");
    }
  }

  bool get_bool(const std::string& key, bool fallback) {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    seen_.push_back(key);
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw Error(ErrorCode::kConfigError,
                "config key '" + key + "': expected true/false, got '" + it->second + "'");
  }

  void reject_unknown() const {
    for (const auto& [key, value] : values_) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
        throw Error(ErrorCode::kConfigError, "unknown config key '" + key + "'");
      }
    }
  }

 private:
  std::map<std::string, std::string> values_;
  mutable std::vector<std::string> seen_;
};

}  // namespace

void RunConfig::validate() const {
  if (games.empty()) {
    throw Error(ErrorCode::kConfigError, "config selects no games");
  }
  if (methods.empty()) {
    throw Error(ErrorCode::kConfigError, "config selects no methods");
  }
  if (trials < 1) {
    throw Error(ErrorCode::kConfigError, "run.trials must be >= 1");
  }
  if (!(expert_fraction > 0.0) || expert_fraction > 1.0) {
    throw Error(ErrorCode::kConfigError, "run.expert_fraction must lie in (0, 1]");
  }
  if (derd_lambda < 0.0) {
    throw Error(ErrorCode::kConfigError, "sampler.derd_lambda must be >= 0");
  }
  if (max_degenerate_fraction < 0.0 || max_degenerate_fraction > 1.0) {
    throw Error(ErrorCode::kConfigError,
                "sampler.max_degenerate_fraction must lie in [0, 1]");
  }
  if (!(policy_smoothing > 0.0)) {
    throw Error(ErrorCode::kConfigError, "policy.smoothing must be > 0");
  }
  bool found_baseline = false;
  for (MethodKind kind : methods) {
    if (method_name(kind) == baseline_method) found_baseline = true;
  }
  if (!found_baseline) {
    throw Error(ErrorCode::kConfigError,
                "run.baseline_method '" + baseline_method + "' is not in run.methods");
  }
  quantization.validate();
  learner.validate();
  sampler.validate();
  corruption.validate();
}

RunConfig load_config(const std::string& path) {
  KeyValueFile file(path);
  RunConfig config;

  config.base_seed = file.require_u64("run.base_seed");
  for (const std::string& name :
       split_list(file.get_string("run.games", "corridor, gamble, sparse_goal"))) {
    config.games.push_back(ToyGameSpec::by_name(name));
  }
  for (const std::string& name : split_list(file.get_string(
           "run.methods", "mgdt_bayes, naive, mtro_no_barp, mtro_no_derd, mtro"))) {
    config.methods.push_back(method_from_name(name));
  }
  config.trials = static_cast<int>(file.get_int("run.trials", config.trials));
  config.expert_fraction =
      file.get_double("run.expert_fraction", config.expert_fraction);
  config.output_dir = file.get_string("run.output_dir", config.output_dir);
  config.baseline_method =
      file.get_string("run.baseline_method", config.baseline_method);

  config.quantization.r_min =
      static_cast<int>(file.get_int("quantization.r_min", config.quantization.r_min));
  config.quantization.r_max =
      static_cast<int>(file.get_int("quantization.r_max", config.quantization.r_max));
  config.quantization.clip_rewards =
      file.get_bool("quantization.clip_rewards", config.quantization.clip_rewards);
  config.count_basis = count_basis_from_name(
      file.get_string("quantization.count_basis", count_basis_name(config.count_basis)));

  config.learner.n_episodes =
      static_cast<int>(file.get_int("dataset.episodes", config.learner.n_episodes));
  config.learner.learning_rate =
      file.get_double("dataset.learning_rate", config.learner.learning_rate);
  config.learner.discount = file.get_double("dataset.discount", config.learner.discount);
  config.learner.epsilon_start =
      file.get_double("dataset.epsilon_start", config.learner.epsilon_start);
  config.learner.epsilon_end =
      file.get_double("dataset.epsilon_end", config.learner.epsilon_end);
  config.learner.anneal_fraction =
      file.get_double("dataset.anneal_fraction", config.learner.anneal_fraction);

  config.sampler.warmup_len =
      static_cast<int>(file.get_int("sampler.warmup_len", config.sampler.warmup_len));
  config.sampler.kl_epsilon =
      file.get_double("sampler.kl_epsilon", config.sampler.kl_epsilon);
  config.sampler.classifier.kappa =
      file.get_double("sampler.kappa", config.sampler.classifier.kappa);
  config.sampler.classifier.r_low =
      file.get_double("sampler.classifier_r_low", config.sampler.classifier.r_low);
  config.sampler.classifier.r_high =
      file.get_double("sampler.classifier_r_high", config.sampler.classifier.r_high);
  config.derd_lambda = file.get_double("sampler.derd_lambda", config.derd_lambda);
  config.max_degenerate_fraction = file.get_double("sampler.max_degenerate_fraction",
                                                   config.max_degenerate_fraction);

  config.corruption.shift =
      static_cast<int>(file.get_int("corruption.shift", config.corruption.shift));
  config.corruption.temperature =
      file.get_double("corruption.temperature", config.corruption.temperature);

  config.policy_smoothing = file.get_double("policy.smoothing", config.policy_smoothing);
  config.predictor_file = file.get_string("policy.predictor_file", "");

  file.reject_unknown();
  config.validate();
  return config;
}

std::string config_canonical_text(const RunConfig& config) {
  std::ostringstream out;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "run.base_seed=" << config.base_seed << '\n';
  out << "run.games=";
  for (std::size_t i = 0; i < config.games.size(); ++i) {
    out << (i ? "," : "") << config.games[i].game_id;
  }
  out << '\n' << "run.methods=";
  for (std::size_t i = 0; i < config.methods.size(); ++i) {
    out << (i ? "," : "") << method_name(config.methods[i]);
  }
  out << '\n';
  out << "run.trials=" << config.trials << '\n';
  out << "run.expert_fraction=" << num(config.expert_fraction) << '\n';
  out << "run.baseline_method=" << config.baseline_method << '\n';
  out << "quantization.r_min=" << config.quantization.r_min << '\n';
  out << "quantization.r_max=" << config.quantization.r_max << '\n';
  out << "quantization.clip_rewards=" << (config.quantization.clip_rewards ? 1 : 0)
      << '\n';
  out << "quantization.count_basis=" << count_basis_name(config.count_basis) << '\n';
  out << "dataset.episodes=" << config.learner.n_episodes << '\n';
  out << "dataset.learning_rate=" << num(config.learner.learning_rate) << '\n';
  out << "dataset.discount=" << num(config.learner.discount) << '\n';
  out << "dataset.epsilon_start=" << num(config.learner.epsilon_start) << '\n';
  out << "dataset.epsilon_end=" << num(config.learner.epsilon_end) << '\n';
  out << "dataset.anneal_fraction=" << num(config.learner.anneal_fraction) << '\n';
  out << "sampler.warmup_len=" << config.sampler.warmup_len << '\n';
  out << "sampler.kl_epsilon=" << num(config.sampler.kl_epsilon) << '\n';
  out << "sampler.kappa=" << num(config.sampler.classifier.kappa) << '\n';
  out << "sampler.classifier_r_low=" << num(config.sampler.classifier.r_low) << '\n';
  out << "sampler.classifier_r_high=" << num(config.sampler.classifier.r_high) << '\n';
  out << "sampler.derd_lambda=" << num(config.derd_lambda) << '\n';
  out << "sampler.max_degenerate_fraction=" << num(config.max_degenerate_fraction)
      << '\n';
  out << "corruption.shift=" << config.corruption.shift << '\n';
  out << "corruption.temperature=" << num(config.corruption.temperature) << '\n';
  out << "policy.smoothing=" << num(config.policy_smoothing) << '\n';
  out << "policy.predictor_file=" << config.predictor_file << '\n';
  return out.str();
}

std::uint64_t config_hash(const RunConfig& config) {
  return fnv1a64(config_canonical_text(config));
}

}  // namespace mtro
