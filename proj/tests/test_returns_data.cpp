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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mtro/dataset_gen.hpp"
#include "mtro/games.hpp"
#include "mtro/returns_data.hpp"
#include "oracles.hpp"

using namespace mtro;

namespace {

Episode make_episode(const std::string& game, std::uint64_t gen,
                     std::vector<double> rewards) {
  Episode e;
  e.game_id = game;
  e.generation_index = gen;
  e.rewards = std::move(rewards);
  e.observations.assign(e.rewards.size(), 0);
  e.actions.assign(e.rewards.size(), 0);
  return e;
}

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("returns-to-go is the suffix sum") {
  CHECK(compute_returns_to_go({1, 0, 2}) == std::vector<double>{3, 2, 2});
  CHECK(compute_returns_to_go({0, 0, 0, 0, 0}) == std::vector<double>{0, 0, 0, 0, 0});
  CHECK(compute_returns_to_go({-1, 1, -1, 1}) == std::vector<double>{0, 1, 0, 1});
  CHECK_THROWS_AS(compute_returns_to_go({}), Error);
}

TEST_CASE("returns-to-go properties on random reward sequences") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t len = 1 + rng.next_below(40);
    std::vector<double> rewards(len);
    for (double& r : rewards) r = rng.next_double() * 4.0 - 2.0;
    auto rtg = compute_returns_to_go(rewards);
    REQUIRE(rtg.size() == len);
    CHECK(rtg.back() == rewards.back());
    for (std::size_t t = 0; t < len; ++t) {
      double suffix = 0.0;
      for (std::size_t u = t; u < len; ++u) suffix += rewards[u];
      CHECK(std::abs(rtg[t] - suffix) < 1e-12);
    }
  }
}

TEST_CASE("quantization rounds half away from zero and clamps") {
  QuantizationSpec spec;
  CHECK(quantize_return(150, spec) == 100);
  CHECK(quantize_return(-25, spec) == -20);
  CHECK(quantize_return(3.5, spec) == 4);
  CHECK(quantize_return(-3.5, spec) == -4);
  CHECK(quantize_return(0.0, spec) == 0);
  CHECK(quantize_return(2.49, spec) == 2);

  QuantizationSpec bad{5, 5, true};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("quantization is idempotent and monotone") {
  QuantizationSpec spec;
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    double x = rng.next_double() * 300.0 - 150.0;
    double y = rng.next_double() * 300.0 - 150.0;
    if (y < x) std::swap(x, y);
    int bx = quantize_return(x, spec);
    int by = quantize_return(y, spec);
    CHECK(quantize_return(bx, spec) == bx);  // idempotent
    CHECK(bx <= by);                         // monotone
    CHECK(bx >= spec.r_min);
    CHECK(by <= spec.r_max);
  }
}

TEST_CASE("expert labeling flags the final fraction per game") {
  std::vector<Episode> dataset;
  for (int i = 0; i < 100; ++i) dataset.push_back(make_episode("a", i, {1.0}));
  label_experts(dataset, 0.1);
  int experts = 0;
  std::uint64_t min_expert_gen = 1000;
  std::uint64_t max_plain_gen = 0;
  for (const Episode& e : dataset) {
    if (e.expert) {
      ++experts;
      min_expert_gen = std::min(min_expert_gen, e.generation_index);
    } else {
      max_plain_gen = std::max(max_plain_gen, e.generation_index);
    }
  }
  CHECK(experts == 10);
  CHECK(min_expert_gen == 90);
  CHECK(min_expert_gen > max_plain_gen);
}

TEST_CASE("expert labeling uses the ceiling on fractional boundaries") {
  std::vector<Episode> dataset;
  for (int i = 0; i < 105; ++i) dataset.push_back(make_episode("a", i, {1.0}));
  label_experts(dataset, 0.1);
  int experts = 0;
  for (const Episode& e : dataset) experts += e.expert ? 1 : 0;
  CHECK(experts == 11);  // ceil(10.5)
}

TEST_CASE("expert labeling boundary and error cases") {
  std::vector<Episode> dataset;
  for (int i = 0; i < 7; ++i) dataset.push_back(make_episode("a", i, {1.0}));
  label_experts(dataset, 1.0);
  for (const Episode& e : dataset) CHECK(e.expert);

  CHECK_THROWS_AS(label_experts(dataset, 0.0), Error);
  CHECK_THROWS_AS(label_experts(dataset, 1.5), Error);
}

TEST_CASE("expert labeling is per game and list-order independent") {
  Rng rng(99);
  std::vector<Episode> dataset;
  for (int i = 0; i < 40; ++i) dataset.push_back(make_episode("g1", i, {1.0}));
  for (int i = 0; i < 25; ++i) dataset.push_back(make_episode("g2", i, {1.0}));
  for (std::size_t i = dataset.size(); i > 1; --i) {
    std::swap(dataset[i - 1], dataset[rng.next_below(i)]);
  }
  label_experts(dataset, 0.1);
  std::map<std::string, int> experts;
  for (const Episode& e : dataset) experts[e.game_id] += e.expert ? 1 : 0;
  CHECK(experts["g1"] == 4);
  CHECK(experts["g2"] == 3);  // ceil(2.5)
}

TEST_CASE("return counts: direct example") {
  std::vector<Episode> dataset{make_episode("a", 0, {5.0}), make_episode("a", 1, {5.0}),
                               make_episode("a", 2, {7.0})};
  QuantizationSpec spec{-20, 100, false};
  for (auto& e : dataset) e.returns_to_go = compute_returns_to_go(e.rewards);
  dataset[2].expert = true;

  ReturnCounts counts = build_return_counts(dataset, spec);
  CHECK(counts.n(5) == 2);
  CHECK(counts.n(7) == 1);
  CHECK(counts.n_expert(7) == 1);
  CHECK(counts.n_expert(5) == 0);
  CHECK(counts.total == 3);
  CHECK_THROWS_AS(build_return_counts({}, spec), Error);
}

TEST_CASE("return counts clamp out-of-range episode returns") {
  std::vector<Episode> dataset{make_episode("a", 0, {150.0})};
  QuantizationSpec spec{-20, 100, false};
  dataset[0].returns_to_go = compute_returns_to_go(dataset[0].rewards);
  ReturnCounts counts = build_return_counts(dataset, spec);
  CHECK(counts.n(100) == 1);
}

TEST_CASE("return counts match a one-pass recount oracle on a generated corpus") {
  ToyGameSpec game = ToyGameSpec::corridor();
  LearnerConfig learner;
  learner.n_episodes = 5000;
  std::vector<Episode> dataset = generate_offline_dataset(game, learner, 123);
  QuantizationSpec spec{-20, 100, true};
  prepare_dataset(dataset, spec, 0.1);

  ReturnCounts counts = build_return_counts(dataset, spec);
  std::vector<double> episode_returns;
  std::vector<double> expert_returns;
  for (const Episode& e : dataset) {
    episode_returns.push_back(e.episode_return());
    if (e.expert) expert_returns.push_back(e.episode_return());
  }
  auto oracle_all = oracles::recount(episode_returns, spec.r_min, spec.r_max);
  auto oracle_expert = oracles::recount(expert_returns, spec.r_min, spec.r_max);

  CHECK(counts.total == 5000);
  for (const auto& [bin, n] : oracle_all) CHECK(counts.n(bin) == n);
  for (const auto& [bin, n] : counts.counts) CHECK(oracle_all[bin] == n);
  for (const auto& [bin, n] : oracle_expert) CHECK(counts.n_expert(bin) == n);

  std::int64_t sum = 0;
  std::int64_t expert_sum = 0;
  for (const auto& [bin, n] : counts.counts) sum += n;
  for (const auto& [bin, n] : counts.expert_counts) expert_sum += n;
  CHECK(sum == counts.total);
  CHECK(expert_sum == 500);
}

TEST_CASE("timestep basis counts every return-to-go occurrence") {
  std::vector<Episode> dataset{make_episode("a", 0, {1.0, 1.0}),
                               make_episode("a", 1, {0.0, 2.0})};
  QuantizationSpec spec{-20, 100, false};
  for (auto& e : dataset) e.returns_to_go = compute_returns_to_go(e.rewards);
  dataset[1].expert = true;
  ReturnCounts counts = build_return_counts(dataset, spec, CountBasis::kTimestep);
  CHECK(counts.total == 4);
  CHECK(counts.n(2) == 3);  // rtg 2 opens both episodes and closes the second
  CHECK(counts.n(1) == 1);
  CHECK(counts.n_expert(2) == 2);
}

TEST_CASE("prepared episodes keep returns-to-go consistent with rewards") {
  ToyGameSpec game = ToyGameSpec::gamble();
  LearnerConfig learner;
  learner.n_episodes = 50;
  std::vector<Episode> dataset = generate_offline_dataset(game, learner, 5);
  QuantizationSpec spec{-20, 100, game.clip_rewards};
  prepare_dataset(dataset, spec, 0.1);
  for (const Episode& e : dataset) {
    auto again = compute_returns_to_go(e.rewards);
    REQUIRE(again.size() == e.returns_to_go.size());
    for (std::size_t t = 0; t < again.size(); ++t) {
      CHECK(std::abs(again[t] - e.returns_to_go[t]) < 1e-12);
    }
    CHECK(e.returns_to_go.back() == e.rewards.back());
  }
}

TEST_CASE("reward clipping applies at ingestion when enabled") {
  std::vector<Episode> dataset{make_episode("a", 0, {3.0, -2.0, 0.5})};
  QuantizationSpec spec{-20, 100, true};
  prepare_dataset(dataset, spec, 1.0);
  CHECK(dataset[0].rewards == std::vector<double>{1.0, -1.0, 0.5});
  CHECK(dataset[0].episode_return() == 0.5);
}

TEST_CASE("episode files round-trip") {
  std::vector<Episode> dataset;
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    std::size_t len = 1 + rng.next_below(10);
    Episode e;
    e.game_id = i % 2 ? "g1" : "g2";
    e.generation_index = static_cast<std::uint64_t>(i);
    for (std::size_t t = 0; t < len; ++t) {
      e.observations.push_back(static_cast<int>(rng.next_below(16)));
      e.actions.push_back(static_cast<int>(rng.next_below(4)));
      e.rewards.push_back(rng.next_double() * 6.0 - 3.0);
    }
    dataset.push_back(std::move(e));
  }
  auto path = temp_file("mtro_roundtrip.jsonl");
  save_episodes(dataset, path.string());
  auto loaded = load_episodes(path.string());
  REQUIRE(loaded.size() == dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    CHECK(loaded[i].game_id == dataset[i].game_id);
    CHECK(loaded[i].generation_index == dataset[i].generation_index);
    CHECK(loaded[i].observations == dataset[i].observations);
    CHECK(loaded[i].actions == dataset[i].actions);
    CHECK(loaded[i].rewards == dataset[i].rewards);
  }
  std::filesystem::remove(path);
}

TEST_CASE("loading rejects length mismatches with the line number") {
  auto path = temp_file("mtro_badlen.jsonl");
  {
    std::ofstream out(path);
    out << R"({"game_id":"a","generation_index":0,"observations":[1],"actions":[0],"rewards":[1.0]})"
        << '\n';
    out << R"({"game_id":"a","generation_index":1,"observations":[1,2],"actions":[0],"rewards":[1.0]})"
        << '\n';
  }
  try {
    load_episodes(path.string());
    FAIL("expected SchemaError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSchemaError);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("loading rejects truncated JSON with the line number") {
  auto path = temp_file("mtro_truncated.jsonl");
  {
    std::ofstream out(path);
    out << R"({"game_id":"a","generation_index":0,"observations":[1],"actions":[0],"rewards":[1.0]})"
        << '\n';
    out << R"({"game_id":"a","generation_index":1,"observ)" << '\n';
  }
  try {
    load_episodes(path.string());
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParseError);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("counts CSV carries the game header and all bins") {
  std::vector<Episode> dataset{make_episode("g", 0, {2.0})};
  QuantizationSpec spec{-2, 3, false};
  dataset[0].returns_to_go = compute_returns_to_go(dataset[0].rewards);
  dataset[0].expert = true;
  ReturnCounts counts = build_return_counts(dataset, spec);
  auto path = temp_file("mtro_counts.csv");
  write_counts_csv(counts, spec, path.string());

  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# game_id=g N_total=1");
  std::getline(in, line);
  CHECK(line == "bin,N,n_expert");
  int rows = 0;
  bool saw_bin2 = false;
  while (std::getline(in, line)) {
    ++rows;
    if (line == "2,1,1") saw_bin2 = true;
  }
  CHECK(rows == 6);
  CHECK(saw_bin2);
  std::filesystem::remove(path);
}
