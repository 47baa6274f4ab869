// Copyright 2026 The braggsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * C interface to braggsim. Every handle is opaque; every call that can fail
 * returns a bragg_status and leaves a message for bragg_last_error() on the
 * calling thread. Strings returned by the library stay valid until the
 * owning handle is freed (or, for bragg_last_error, until the next failing
 * call on the same thread).
 */

#ifndef BRAGGSIM_H
#define BRAGGSIM_H

#include <stddef.h>

#if defined(_WIN32)
#define BRAGG_API __declspec(dllexport)
#else
#define BRAGG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bragg_status {
  BRAGG_OK = 0,
  BRAGG_ERR_USAGE = 1,
  BRAGG_ERR_PARSE = 2,
  BRAGG_ERR_VALIDATION = 3,
  BRAGG_ERR_NUMERIC = 4,
  BRAGG_ERR_IO = 5,
  BRAGG_ERR_INTERNAL = 6
} bragg_status;

typedef struct bragg_config bragg_config;
typedef struct bragg_result bragg_result;

BRAGG_API const char* bragg_version(void);
BRAGG_API const char* bragg_last_error(void);

/* Configuration loading. On success *out owns a new handle. */
BRAGG_API bragg_status bragg_config_load(const char* path, bragg_config** out);
BRAGG_API bragg_status bragg_config_from_json(const char* json_text, const char* name, bragg_config** out);
BRAGG_API bragg_status bragg_config_from_preset(const char* preset, bragg_config** out);
BRAGG_API bragg_status bragg_config_set_output_dir(bragg_config* config, const char* dir);
BRAGG_API const char* bragg_config_name(const bragg_config* config);
BRAGG_API const char* bragg_config_output_dir(const bragg_config* config);
BRAGG_API void bragg_config_free(bragg_config* config);

/* Runs the configured experiment with `workers` threads (0 means 1). */
BRAGG_API bragg_status bragg_run(const bragg_config* config, unsigned workers, bragg_result** out);
BRAGG_API const char* bragg_result_summary_json(const bragg_result* result);
BRAGG_API const char* bragg_result_output_dir(const bragg_result* result);
BRAGG_API void bragg_result_free(bragg_result* result);

/* Built-in presets, indexed 0 .. bragg_preset_count() - 1. */
BRAGG_API size_t bragg_preset_count(void);
BRAGG_API const char* bragg_preset_name(size_t index);
BRAGG_API const char* bragg_preset_json(size_t index);

/* sqrt(N)/2, the number spread of the binomial two-well state. */
BRAGG_API double bragg_number_uncertainty(int N);
/* Well occupations recovered from the two spectral lines (units of g). */
BRAGG_API bragg_status bragg_well_populations(double omega_plus, double omega_minus, double g, double* n0, double* n1);

#ifdef __cplusplus
}
#endif

#endif /* BRAGGSIM_H */
