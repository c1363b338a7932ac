/* Copyright 2026 The patland Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of libpatland.
 *
 * Every function returns a pl_status; on failure the message is available
 * from pl_last_error() on the calling thread until the next call. Strings
 * returned through char** parameters are owned by the caller and released
 * with pl_string_free(). Options are JSON objects passed as strings (NULL or
 * "" for defaults); unknown keys are rejected. */

#ifndef PATLAND_PATLAND_H_
#define PATLAND_PATLAND_H_

#include <stddef.h>
#include <stdint.h>

#if defined(PATLAND_BUILDING_LIBRARY)
#define PL_API __attribute__((visibility("default")))
#else
#define PL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pl_status {
  PL_OK = 0,
  PL_INVALID_ARGUMENT = 1,
  PL_PARSE_ERROR = 2,
  PL_VALIDATION_ERROR = 3,
  PL_FORMAT_ERROR = 4,
  PL_NOT_FOUND = 5,
  PL_CONFLICT = 6,
  PL_PRECONDITION_FAILED = 7,
  PL_NUMERICAL_ERROR = 8,
  PL_CONVERGENCE_ERROR = 9,
  PL_IO_ERROR = 10,
  PL_INTERNAL_ERROR = 11
} pl_status;

typedef struct pl_corpus pl_corpus;
typedef struct pl_workspace pl_workspace;
typedef struct pl_model pl_model;
typedef struct pl_server pl_server;

PL_API const char* pl_version(void);
PL_API const char* pl_last_error(void);
PL_API pl_status pl_last_status(void);
PL_API const char* pl_status_name(pl_status status);
PL_API void pl_string_free(char* text);

/* ---- corpus ---- */

/* A JSONL file, or a directory holding patents.jsonl (and labels.jsonl). */
PL_API pl_status pl_corpus_load(const char* path, pl_corpus** out);
/* options: {"patents": path, "cpc": path, "citations": path, "claims": path,
 *           "columns": {field: header, ...}} */
PL_API pl_status pl_corpus_load_tsv(const char* options_json, pl_corpus** out, char** warnings_json);
PL_API pl_status pl_corpus_add_labels(pl_corpus* corpus, const char* labels_path);
PL_API pl_status pl_corpus_save(const pl_corpus* corpus, const char* directory);
PL_API size_t pl_corpus_size(const pl_corpus* corpus);
/* {"patents", "labels", "citations", "dangling_citations", "families", ...} */
PL_API pl_status pl_corpus_summary(const pl_corpus* corpus, char** summary_json);
PL_API void pl_corpus_free(pl_corpus* corpus);

/* ---- graph ---- */

/* options: {"cpc_level": "subgroup"|"subclass", "include_citing": bool}.
 * Writes seeds.txt, l1.txt, l2.txt, antiseed_pool.txt into out_dir. */
PL_API pl_status pl_expand(const pl_corpus* corpus, const char* seed_file, const char* options_json,
                           const char* out_dir, char** result_json);
/* Writes antiseeds.txt and antiseed_labels.jsonl into out_dir. */
PL_API pl_status pl_sample_antiseeds(const char* pool_file, size_t n, uint64_t rng_seed, const char* out_dir);

/* ---- features and models ---- */

/* options: {"embeddings": path, "w2v": path, "ft": path, "cpc_titles": path} */
PL_API pl_status pl_workspace_new(const pl_corpus* corpus, const char* options_json, pl_workspace** out);
PL_API void pl_workspace_free(pl_workspace* workspace);

/* options: {"labels": path, "min_df": n, "hops": [1, 2], "embedding": bool, "max_tokens": n}
 * Writes vocabulary.json, tfidf.jsonl, code spaces and count vectors. */
PL_API pl_status pl_featurize(const pl_workspace* workspace, const char* options_json, const char* out_dir,
                              char** result_json);

/* Learner options (shared by train, evaluate and curve):
 * {"svm": {"c", "gamma", "tolerance", "max_iterations"},
 *  "neural": {"epochs", "batch_size", "learning_rate", "min_updates"},
 *  "min_df", "pca_components", "cpc_slots", "stream_width", "hidden": [..],
 *  "dropout", "threshold", "abstract_tokens", "claims_tokens"} */
PL_API pl_status pl_model_train(const pl_workspace* workspace, const char* labels_path, const char* model_spec,
                                const char* options_json, uint64_t rng_seed, pl_model** out);
PL_API pl_status pl_model_save(const pl_model* model, const char* directory);
PL_API pl_status pl_model_load(const pl_workspace* workspace, const char* directory, pl_model** out);
/* Scores every id of ids_file and writes JSONL {patent_id, score, included}.
 * threshold NaN keeps the model's own decision rule. */
PL_API pl_status pl_model_export_landscape(const pl_model* model, const char* ids_file, double threshold,
                                           const char* out_path, char** summary_json);
PL_API void pl_model_free(pl_model* model);

/* ---- evaluation ---- */

/* {"balanced": n, "holdout": n, "balanced_counts": [...], "holdout_counts": [...]} */
PL_API pl_status pl_bundle_summary(const char* labels_path, uint64_t rng_seed, char** summary_json);
/* options: learner options plus {"k": n} */
PL_API pl_status pl_evaluate(const pl_workspace* workspace, const char* labels_path, const char* model_spec,
                             const char* options_json, uint64_t rng_seed, char** report_json, char** report_table);
/* sizes: comma-separated, e.g. "400,200,100,48,24"; NULL for those defaults. */
PL_API pl_status pl_curve(const pl_workspace* workspace, const char* labels_path, const char* model_spec,
                          const char* sizes, const char* options_json, uint64_t rng_seed, char** curve_json,
                          char** curve_csv);
PL_API pl_status pl_kappa(const char* labels_a, const char* labels_b, char** result_json);

/* ---- annotation service ---- */

/* options: {"state_dir": path, "cors_origin": origin} */
PL_API pl_status pl_server_new(const pl_corpus* corpus, const char* options_json, pl_server** out);
/* In-process request; query is "k=5&annotator_id=a" or NULL. */
PL_API pl_status pl_server_handle(pl_server* server, const char* method, const char* path, const char* query,
                                  const char* body, int* http_status, char** response_json);
/* port 0 picks a free port, reported through bound_port. */
PL_API pl_status pl_server_bind(pl_server* server, const char* host, int port, int* bound_port);
/* Blocks until pl_server_stop(). */
PL_API pl_status pl_server_serve(pl_server* server);
PL_API void pl_server_stop(pl_server* server);
PL_API void pl_server_free(pl_server* server);

/* ---- synthetic data ---- */

/* options: {"patents": n, "seed_count": n, "rng_seed": n, "harvest": bool}.
 * Writes a synthetic landscape (and labels.jsonl when harvesting). */
PL_API pl_status pl_synth(const char* options_json, const char* out_dir, char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* PATLAND_PATLAND_H_ */
