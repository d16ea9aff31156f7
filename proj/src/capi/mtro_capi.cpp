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

#include "mtro/mtro.h"

#include <cmath>
#include <cstring>
#include <string>

#include "mtro/config.hpp"
#include "mtro/pipeline.hpp"

namespace {

thread_local std::string g_last_error;

mtro_status status_of(const mtro::Error& e) {
  using mtro::ErrorCode;
  switch (e.code()) {
    case ErrorCode::kMissingInput:
    case ErrorCode::kMissingBaseline:
      return MTRO_ERR_MISSING;
    case ErrorCode::kIoError:
      return MTRO_ERR;
    case ErrorCode::kDegeneratePosterior:
    case ErrorCode::kInfiniteDivergence:
      return MTRO_ERR_DEGENERATE;
    default:
      return MTRO_ERR_VALIDATION;
  }
}

template <typename Fn>
mtro_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const mtro::Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MTRO_ERR;
  }
}

mtro_status invalid(const char* message) {
  g_last_error = message;
  return MTRO_ERR_VALIDATION;
}

}  // namespace

struct mtro_config {
  mtro::RunConfig config;
};

struct mtro_dataset {
  std::vector<mtro::Episode> episodes;
};

struct mtro_derd {
  mtro::DerdTable table;
};

struct mtro_sampler {
  mtro_derd* derd;  // owned copy backing the table reference
  mtro::TargetSampler sampler;
};

extern "C" {

const char* mtro_version(void) { return "1.0.0"; }

const char* mtro_last_error(void) { return g_last_error.c_str(); }

mtro_status mtro_config_load(const char* path, mtro_config** out) {
  if (!path || !out) return invalid("mtro_config_load: null argument");
  return guarded([&] {
    *out = new mtro_config{mtro::load_config(path)};
    return MTRO_OK;
  });
}

void mtro_config_free(mtro_config* config) { delete config; }

mtro_status mtro_config_set_seed(mtro_config* config, uint64_t seed) {
  if (!config) return invalid("mtro_config_set_seed: null config");
  config->config.base_seed = seed;
  return MTRO_OK;
}

mtro_status mtro_config_output_dir(const mtro_config* config, char* buffer,
                                   size_t buffer_len) {
  if (!config || !buffer) return invalid("mtro_config_output_dir: null argument");
  const std::string& dir = config->config.output_dir;
  if (dir.size() + 1 > buffer_len) return invalid("mtro_config_output_dir: buffer too small");
  std::memcpy(buffer, dir.c_str(), dir.size() + 1);
  return MTRO_OK;
}

mtro_status mtro_run_gen_data(const mtro_config* config, const char* dir) {
  if (!config || !dir) return invalid("mtro_run_gen_data: null argument");
  return guarded([&] {
    mtro::cmd_gen_data(config->config, dir);
    return MTRO_OK;
  });
}

mtro_status mtro_run_derd(const mtro_config* config, const char* dir) {
  if (!config || !dir) return invalid("mtro_run_derd: null argument");
  return guarded([&] {
    mtro::cmd_derd(config->config, dir);
    return MTRO_OK;
  });
}

mtro_status mtro_run_eval(const mtro_config* config, const char* dir, int jobs) {
  if (!config || !dir) return invalid("mtro_run_eval: null argument");
  return guarded([&]() -> mtro_status {
    mtro::EvalTotals totals = mtro::cmd_eval(config->config, dir, jobs);
    if (totals.degenerate_fraction() > config->config.max_degenerate_fraction) {
      g_last_error = "degenerate posterior fraction " +
                     std::to_string(totals.degenerate_fraction()) +
                     " exceeds sampler.max_degenerate_fraction";
      return MTRO_ERR_DEGENERATE;
    }
    return MTRO_OK;
  });
}

mtro_status mtro_run_report(const mtro_config* config, const char* dir,
                            int allow_partial) {
  if (!config || !dir) return invalid("mtro_run_report: null argument");
  return guarded([&] {
    mtro::cmd_report(config->config, dir, allow_partial != 0);
    return MTRO_OK;
  });
}

mtro_status mtro_run_plot_data(const mtro_config* config, const char* dir) {
  if (!config || !dir) return invalid("mtro_run_plot_data: null argument");
  return guarded([&] {
    mtro::cmd_plot_data(config->config, dir);
    return MTRO_OK;
  });
}

mtro_status mtro_dataset_load(const char* path, mtro_dataset** out) {
  if (!path || !out) return invalid("mtro_dataset_load: null argument");
  return guarded([&] {
    *out = new mtro_dataset{mtro::load_episodes(path)};
    return MTRO_OK;
  });
}

mtro_status mtro_dataset_save(const mtro_dataset* dataset, const char* path) {
  if (!dataset || !path) return invalid("mtro_dataset_save: null argument");
  return guarded([&] {
    mtro::save_episodes(dataset->episodes, path);
    return MTRO_OK;
  });
}

void mtro_dataset_free(mtro_dataset* dataset) { delete dataset; }

mtro_status mtro_dataset_size(const mtro_dataset* dataset, size_t* out) {
  if (!dataset || !out) return invalid("mtro_dataset_size: null argument");
  *out = dataset->episodes.size();
  return MTRO_OK;
}

mtro_status mtro_derd_build(const mtro_dataset* dataset, int r_min, int r_max,
                            int clip_rewards, double expert_fraction, double lambda,
                            mtro_derd** out) {
  if (!dataset || !out) return invalid("mtro_derd_build: null argument");
  return guarded([&] {
    mtro::QuantizationSpec spec{r_min, r_max, clip_rewards != 0};
    std::vector<mtro::Episode> episodes = dataset->episodes;
    mtro::prepare_dataset(episodes, spec, expert_fraction);
    mtro::ReturnCounts counts = mtro::build_return_counts(episodes, spec);
    *out = new mtro_derd{
        mtro::DerdTable(std::move(counts), mtro::BinRange::of(spec), lambda)};
    return MTRO_OK;
  });
}

mtro_status mtro_derd_load_csv(const char* path, double lambda, mtro_derd** out) {
  if (!path || !out) return invalid("mtro_derd_load_csv: null argument");
  return guarded([&] {
    *out = new mtro_derd{mtro::DerdTable::from_csv(path, lambda)};
    return MTRO_OK;
  });
}

mtro_status mtro_derd_write_csv(const mtro_derd* derd, const char* path) {
  if (!derd || !path) return invalid("mtro_derd_write_csv: null argument");
  return guarded([&] {
    derd->table.write_csv(path);
    return MTRO_OK;
  });
}

void mtro_derd_free(mtro_derd* derd) { delete derd; }

mtro_status mtro_derd_expert_ratio(const mtro_derd* derd, int bin, double* out) {
  if (!derd || !out) return invalid("mtro_derd_expert_ratio: null argument");
  if (!derd->table.range().contains(bin)) {
    return invalid("mtro_derd_expert_ratio: bin outside range");
  }
  *out = derd->table.expert_ratio(bin);
  return MTRO_OK;
}

mtro_status mtro_derd_bin_count(const mtro_derd* derd, size_t* out) {
  if (!derd || !out) return invalid("mtro_derd_bin_count: null argument");
  *out = static_cast<size_t>(derd->table.range().size());
  return MTRO_OK;
}

mtro_status mtro_derd_reference(const mtro_derd* derd, double* probs, size_t len) {
  if (!derd || !probs) return invalid("mtro_derd_reference: null argument");
  const auto& reference = derd->table.reference_distribution();
  if (len != static_cast<size_t>(reference.size())) {
    return invalid("mtro_derd_reference: buffer length != bin count");
  }
  for (size_t i = 0; i < len; ++i) probs[i] = reference.prob_at_index(i);
  return MTRO_OK;
}

mtro_status mtro_sampler_new(const mtro_derd* derd, const char* method, int warmup_len,
                             double kl_epsilon, uint64_t seed, mtro_sampler** out) {
  if (!derd || !method || !out) return invalid("mtro_sampler_new: null argument");
  return guarded([&] {
    mtro::MethodSpec spec;
    spec.kind = mtro::method_from_name(method);
    if (warmup_len > 0) spec.warmup_len = warmup_len;
    if (kl_epsilon >= 0.0) spec.kl_epsilon = kl_epsilon;
    // Keep a private copy of the table so the sampler cannot dangle.
    auto* owned = new mtro_derd{derd->table};
    *out = new mtro_sampler{owned, mtro::TargetSampler(owned->table, spec, seed)};
    return MTRO_OK;
  });
}

void mtro_sampler_free(mtro_sampler* sampler) {
  if (!sampler) return;
  delete sampler->derd;
  delete sampler;
}

mtro_status mtro_sampler_step(mtro_sampler* sampler, const double* predicted,
                              size_t len, int* target_bin, int* degenerate) {
  if (!sampler || !predicted || !target_bin) {
    return invalid("mtro_sampler_step: null argument");
  }
  return guarded([&] {
    const mtro::BinRange& range = sampler->derd->table.range();
    if (len != static_cast<size_t>(range.size())) {
      throw mtro::Error(mtro::ErrorCode::kValidation,
                        "predicted length != bin count");
    }
    mtro::CategoricalReturnDist dist(range,
                                     std::vector<double>(predicted, predicted + len));
    auto result = sampler->sampler.step(dist);
    *target_bin = result.target_bin;
    if (degenerate) *degenerate = result.degenerate ? 1 : 0;
    return MTRO_OK;
  });
}

mtro_status mtro_sampler_alpha(const mtro_sampler* sampler, double* out) {
  if (!sampler || !out) return invalid("mtro_sampler_alpha: null argument");
  *out = sampler->sampler.alpha().value_or(std::nan(""));
  return MTRO_OK;
}

}  // extern "C"
