/*
 * Copyright 2026 The coastsurr Authors
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
#ifndef COASTSURR_COASTSURR_H
#define COASTSURR_COASTSURR_H

#include <stddef.h>

#if defined(COASTSURR_BUILDING_LIBRARY)
#define CS_API __attribute__((visibility("default")))
#else
#define CS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status; details go to cs_last_error(),
 * which is per thread and valid until the next call on that thread. */
typedef enum cs_status {
  CS_OK = 0,
  CS_ERR_INVALID_ARGUMENT = 1,
  CS_ERR_PARSE = 2,
  CS_ERR_LENGTH = 3,
  CS_ERR_CONFIG = 4,
  CS_ERR_IO = 5,
  CS_ERR_SHAPE = 6,
  CS_ERR_CAPACITY = 7,
  CS_ERR_NUMERIC = 8,
  CS_ERR_NOT_FOUND = 9,
  CS_ERR_INTERNAL = 10
} cs_status;

CS_API const char* cs_version(void);
CS_API const char* cs_last_error(void);
CS_API const char* cs_status_name(cs_status s);
/* Process exit code for a status: 0 ok, 1 user error, 2 numeric or
 * internal failure. */
CS_API int cs_status_exit_code(cs_status s);

/* Strings returned through char** out-parameters are owned by the caller. */
CS_API void cs_free_string(char* s);

typedef void (*cs_log_fn)(const char* line, void* user);

/* Runs a pipeline command ("synthgen", "train", ...). options_json is a JSON
 * object (NULL for defaults); the JSON summary lands in *result_json. */
CS_API cs_status cs_run_command(const char* name, const char* options_json, cs_log_fn log, void* user,
                                char** result_json);

/* Space-separated list of command names. */
CS_API const char* cs_command_names(void);

/* A loaded checkpoint or ensemble plus the corpus metadata (region,
 * footprint, manifest) needed to build inputs from scenario strings.
 * Read-only after loading; safe to share between threads. */
typedef struct cs_model cs_model;

CS_API cs_status cs_model_load(const char* model_path, const char* corpus_dir, cs_model** out);
CS_API void cs_model_free(cs_model* model);
/* JSON with n, olu_count, members, model_version, region and SLR levels. */
CS_API cs_status cs_model_info(const cs_model* model, char** info_json);
CS_API cs_status cs_model_grid_size(const cs_model* model, int* n);

/* Scenario strings carry the SLR suffix, e.g. "01011010_1.5". Output
 * buffers hold n * n floats, row-major. */
CS_API cs_status cs_model_predict(const cs_model* model, const char* scenario, float* out, size_t out_len);
/* Prediction for an explicit input grid in {-1, 0, 1}. */
CS_API cs_status cs_model_predict_grid(const cs_model* model, const float* input, double slr_m, float* out,
                                       size_t out_len);
/* Ensemble mean and population standard deviation; needs two or more
 * members. */
CS_API cs_status cs_model_uncertainty(const cs_model* model, const char* scenario, float* mean, float* stddev,
                                      size_t len);
/* layer may be NULL or "" for the last decoder block. */
CS_API cs_status cs_model_gradcam(const cs_model* model, const char* scenario, const char* layer, float* out,
                                  size_t out_len);
/* The HTTP /predict handler without the transport. */
CS_API cs_status cs_model_request(const cs_model* model, const char* request_json, int* http_status,
                                  char** response_json);

/* Metrics report for `count` pairs of n x n grids stored back to back.
 * metrics_json may be NULL. */
CS_API cs_status cs_evaluate(const float* preds, const float* truths, size_t count, int n, const char* metrics_json,
                             char** report_json);

typedef struct cs_server cs_server;

/* Starts serving `model` on a background thread. port 0 binds any free
 * port. */
CS_API cs_status cs_server_start(const cs_model* model, const char* host, int port, int threads, cs_server** out);
/* Loads the model named by options and starts serving. Keys: config,
 * checkpoint, corpus, host, port, threads. The port comes from options,
 * then COASTSURR_PORT, then the config. */
CS_API cs_status cs_server_start_from_options(const char* options_json, cs_server** out);
CS_API int cs_server_port(const cs_server* server);
/* Blocks until the server stops. */
CS_API cs_status cs_server_wait(cs_server* server);
CS_API void cs_server_stop(cs_server* server);
CS_API void cs_server_free(cs_server* server);

#ifdef __cplusplus
}
#endif

#endif /* COASTSURR_COASTSURR_H */
