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

// braggsim command line: runs one experiment from a JSON config or a
// built-in preset. Links only against the C interface.

#include <unistd.h>

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "braggsim.h"

namespace {

bool use_color() {
  const char* no_color = std::getenv("NO_COLOR");
  if (no_color && *no_color) return false;
  return isatty(fileno(stderr)) != 0;
}

int fail(bragg_status status) {
  const bool color = use_color();
  std::fprintf(stderr, "%serror%s: %s\n", color ? "\033[31m" : "", color ? "\033[0m" : "", bragg_last_error());
  return static_cast<int>(status);
}

int run(const std::string& config_path, const std::string& preset, const std::string& output_dir, unsigned workers) {
  bragg_config* config = nullptr;
  bragg_status st = config_path.empty() ? bragg_config_from_preset(preset.c_str(), &config)
                                        : bragg_config_load(config_path.c_str(), &config);
  if (st != BRAGG_OK) return fail(st);
  if (!output_dir.empty() && (st = bragg_config_set_output_dir(config, output_dir.c_str())) != BRAGG_OK) {
    bragg_config_free(config);
    return fail(st);
  }
  bragg_result* result = nullptr;
  st = bragg_run(config, workers, &result);
  bragg_config_free(config);
  if (st != BRAGG_OK) return fail(st);
  std::printf("%s\n", bragg_result_summary_json(result));
  bragg_result_free(result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"braggsim: light scattering from atoms in a two-well optical lattice"};
  app.set_version_flag("--version", std::string(bragg_version()));
  app.require_subcommand(1);

  std::string config_path, preset, output_dir;
  unsigned workers = 1;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment and write CSV files plus manifest.json");
  auto* config_opt = run_cmd->add_option("--config", config_path, "Path to a JSON run configuration");
  auto* preset_opt = run_cmd->add_option("--preset", preset, "Name of a built-in preset (see `presets list`)");
  config_opt->excludes(preset_opt);
  run_cmd->add_option("--workers", workers, "Worker threads; results do not depend on this")
      ->check(CLI::Range(1u, 1024u));
  run_cmd->add_option("--output-dir", output_dir, "Override the output directory from the config");

  auto* presets_cmd = app.add_subcommand("presets", "Inspect built-in presets");
  presets_cmd->require_subcommand(1);
  auto* list_cmd = presets_cmd->add_subcommand("list", "List preset names in figure order");
  std::string show_name;
  auto* show_cmd = presets_cmd->add_subcommand("show", "Print the JSON of one preset");
  show_cmd->add_option("name", show_name, "Preset name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*run_cmd) {
    if (config_path.empty() && preset.empty()) {
      std::fprintf(stderr, "error: run needs --config or --preset\n");
      return 1;
    }
    return run(config_path, preset, output_dir, workers);
  }
  if (*list_cmd) {
    for (size_t k = 0; k < bragg_preset_count(); ++k) std::printf("%s\n", bragg_preset_name(k));
    return 0;
  }
  if (*show_cmd) {
    for (size_t k = 0; k < bragg_preset_count(); ++k) {
      if (show_name == bragg_preset_name(k)) {
        std::printf("%s", bragg_preset_json(k));
        return 0;
      }
    }
    std::fprintf(stderr, "error: unknown preset \"%s\"\n", show_name.c_str());
    return 3;
  }
  return 1;
}
