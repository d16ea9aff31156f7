/*------------------------------------------------------------------------------
 *
 *   Copyright 2026 The mtro Authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
 *
 *----------------------------------------------------------------------------*/

/* Public C API of the mtro shared library.
 *
 * mtro selects target returns for return-conditioned policies from offline
 * datasets: it estimates which returns correspond to expert behavior, blends
 * the policy's own return predictions with the dataset distribution according
 * to their divergence, and evaluates the resulting agents across a small
 * multi-game suite.
 *
 * All objects are opaque handles created and destroyed by this API. Every
 * fallible call returns an mtro_status; mtro_last_error() describes the most
 * recent failure on the calling thread.
 */

#ifndef MTRO_H
#define MTRO_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#ifdef MTRO_BUILD
#define MTRO_API __declspec(dllexport)
#else
#define MTRO_API __declspec(dllimport)
#endif
#else
#define MTRO_API __attribute__((visibility("default")))
#endif

typedef enum mtro_status {
  MTRO_OK = 0,
  MTRO_ERR = 1,             /* unexpected failure (I/O, internal)       */
  MTRO_ERR_VALIDATION = 2,  /* bad config, bad arguments, schema errors */
  MTRO_ERR_MISSING = 3,     /* required input file or record absent     */
  MTRO_ERR_DEGENERATE = 4,  /* degenerate-math diagnostics over budget  */
} mtro_status;

MTRO_API const char* mtro_version(void);

/* Thread-local message for the last failing call on this thread. */
MTRO_API const char* mtro_last_error(void);

/* ----------------------------------------------------------------- config */

typedef struct mtro_config mtro_config;

MTRO_API mtro_status mtro_config_load(const char* path, mtro_config** out);
MTRO_API void mtro_config_free(mtro_config* config);
MTRO_API mtro_status mtro_config_set_seed(mtro_config* config, uint64_t seed);
MTRO_API mtro_status mtro_config_output_dir(const mtro_config* config, char* buffer,
                                            size_t buffer_len);

/* --------------------------------------------------------------- pipeline */

/* Each command reads and writes its artifacts under `dir` (episode files,
 * derd tables, results, reports). jobs >= 1 bounds eval parallelism. */
MTRO_API mtro_status mtro_run_gen_data(const mtro_config* config, const char* dir);
MTRO_API mtro_status mtro_run_derd(const mtro_config* config, const char* dir);
MTRO_API mtro_status mtro_run_eval(const mtro_config* config, const char* dir, int jobs);
MTRO_API mtro_status mtro_run_report(const mtro_config* config, const char* dir,
                                     int allow_partial);
MTRO_API mtro_status mtro_run_plot_data(const mtro_config* config, const char* dir);

/* ---------------------------------------------------------------- dataset */

typedef struct mtro_dataset mtro_dataset;

MTRO_API mtro_status mtro_dataset_load(const char* path, mtro_dataset** out);
MTRO_API mtro_status mtro_dataset_save(const mtro_dataset* dataset, const char* path);
MTRO_API void mtro_dataset_free(mtro_dataset* dataset);
MTRO_API mtro_status mtro_dataset_size(const mtro_dataset* dataset, size_t* out);

/* ------------------------------------------------------------------- derd */

typedef struct mtro_derd mtro_derd;

/* Ingest a loaded dataset (clip per flags, compute returns-to-go, label the
 * final expert_fraction of episodes) and build the expert-return table over
 * integer bins [r_min, r_max]. */
MTRO_API mtro_status mtro_derd_build(const mtro_dataset* dataset, int r_min, int r_max,
                                     int clip_rewards, double expert_fraction,
                                     double lambda, mtro_derd** out);
MTRO_API mtro_status mtro_derd_load_csv(const char* path, double lambda,
                                        mtro_derd** out);
MTRO_API mtro_status mtro_derd_write_csv(const mtro_derd* derd, const char* path);
MTRO_API void mtro_derd_free(mtro_derd* derd);

/* Smoothed expert ratio at one bin; NaN where the bin holds no episodes. */
MTRO_API mtro_status mtro_derd_expert_ratio(const mtro_derd* derd, int bin, double* out);

/* Copy the dataset return distribution into `probs` (length = bin count). */
MTRO_API mtro_status mtro_derd_reference(const mtro_derd* derd, double* probs,
                                         size_t len);
MTRO_API mtro_status mtro_derd_bin_count(const mtro_derd* derd, size_t* out);

/* ---------------------------------------------------------------- sampler */

typedef struct mtro_sampler mtro_sampler;

/* method: "mgdt_bayes", "naive", "mtro", "mtro_no_derd", "mtro_no_barp" or
 * "dt_decrement". warmup_len and kl_epsilon follow the evaluation defaults
 * (20, 1e-6) when passed 0 and a negative value respectively. */
MTRO_API mtro_status mtro_sampler_new(const mtro_derd* derd, const char* method,
                                      int warmup_len, double kl_epsilon,
                                      uint64_t seed, mtro_sampler** out);
MTRO_API void mtro_sampler_free(mtro_sampler* sampler);

/* Advance one step with a predicted distribution over the derd bin range
 * (length = bin count, entries >= 0 summing to 1). Writes the sampled target
 * bin. degenerate (optional) is set to 1 when the posterior collapsed and the
 * reference distribution was sampled instead. */
MTRO_API mtro_status mtro_sampler_step(mtro_sampler* sampler, const double* predicted,
                                       size_t len, int* target_bin, int* degenerate);

/* Frozen divergence weight; NaN until warmup_len steps have been taken. */
MTRO_API mtro_status mtro_sampler_alpha(const mtro_sampler* sampler, double* out);

#ifdef __cplusplus
}
#endif

#endif /* MTRO_H */
