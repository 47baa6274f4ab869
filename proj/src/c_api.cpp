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

#include "braggsim.h"

#include <exception>
#include <new>
#include <string>

#include "braggsim/config.hpp"
#include "braggsim/error.hpp"
#include "braggsim/runner.hpp"
#include "braggsim/spectrum.hpp"

struct bragg_config {
  braggsim::RunConfig config;
};

struct bragg_result {
  braggsim::RunResult result;
};

namespace {

thread_local std::string last_error;

bragg_status status_for(braggsim::ErrorCode code) {
  using braggsim::ErrorCode;
  switch (code) {
    case ErrorCode::ParseError: return BRAGG_ERR_PARSE;
    case ErrorCode::ValidationError: return BRAGG_ERR_VALIDATION;
    case ErrorCode::IoError: return BRAGG_ERR_IO;
    case ErrorCode::InvalidArgument: return BRAGG_ERR_USAGE;
    default: break;
  }
  return braggsim::is_numeric_guard(code) ? BRAGG_ERR_NUMERIC : BRAGG_ERR_INTERNAL;
}

// Runs fn and turns any exception into a status code plus a stored message.
template <class Fn>
bragg_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return BRAGG_OK;
  } catch (const braggsim::Error& e) {
    last_error = e.what();
    return status_for(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return BRAGG_ERR_INTERNAL;
}

bragg_status null_argument(const char* what) {
  last_error = std::string("null argument: ") + what;
  return BRAGG_ERR_USAGE;
}

}  // namespace

extern "C" {

const char* bragg_version(void) { return BRAGGSIM_VERSION; }

const char* bragg_last_error(void) { return last_error.c_str(); }

bragg_status bragg_config_load(const char* path, bragg_config** out) {
  if (!path || !out) return null_argument("path/out");
  *out = nullptr;
  return guarded([&] { *out = new bragg_config{braggsim::load_config(path)}; });
}

bragg_status bragg_config_from_json(const char* json_text, const char* name, bragg_config** out) {
  if (!json_text || !out) return null_argument("json_text/out");
  *out = nullptr;
  return guarded([&] { *out = new bragg_config{braggsim::parse_config(json_text, name ? name : "config")}; });
}

bragg_status bragg_config_from_preset(const char* preset, bragg_config** out) {
  if (!preset || !out) return null_argument("preset/out");
  *out = nullptr;
  return guarded([&] { *out = new bragg_config{braggsim::preset_config(preset)}; });
}

bragg_status bragg_config_set_output_dir(bragg_config* config, const char* dir) {
  if (!config || !dir) return null_argument("config/dir");
  if (*dir == '\0') {
    last_error = "output_dir: must not be empty";
    return BRAGG_ERR_VALIDATION;
  }
  return guarded([&] { config->config.output_dir = dir; });
}

const char* bragg_config_name(const bragg_config* config) { return config ? config->config.name.c_str() : ""; }

const char* bragg_config_output_dir(const bragg_config* config) {
  return config ? config->config.output_dir.c_str() : "";
}

void bragg_config_free(bragg_config* config) { delete config; }

bragg_status bragg_run(const bragg_config* config, unsigned workers, bragg_result** out) {
  if (!config || !out) return null_argument("config/out");
  *out = nullptr;
  return guarded([&] { *out = new bragg_result{braggsim::run_experiment(config->config, workers ? workers : 1)}; });
}

const char* bragg_result_summary_json(const bragg_result* result) {
  return result ? result->result.summary_json.c_str() : "";
}

const char* bragg_result_output_dir(const bragg_result* result) {
  return result ? result->result.output_dir.c_str() : "";
}

void bragg_result_free(bragg_result* result) { delete result; }

size_t bragg_preset_count(void) { return braggsim::preset_names().size(); }

const char* bragg_preset_name(size_t index) {
  static const std::vector<std::string> names = braggsim::preset_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

const char* bragg_preset_json(size_t index) {
  const char* name = bragg_preset_name(index);
  return name ? braggsim::preset_text(name).c_str() : nullptr;
}

double bragg_number_uncertainty(int N) { return N < 0 ? -1.0 : braggsim::number_uncertainty(N); }

bragg_status bragg_well_populations(double omega_plus, double omega_minus, double g, double* n0, double* n1) {
  if (!n0 || !n1) return null_argument("n0/n1");
  return guarded([&] {
    const auto pops = braggsim::well_populations_from_peaks(omega_plus, omega_minus, g);
    *n0 = pops.n0;
    *n1 = pops.n1;
  });
}

}  // extern "C"
