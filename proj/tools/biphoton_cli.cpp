// Copyright 2026 The biphoton Authors
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

// Command-line runner: `run`, `preset` and `list`.

#include <CLI11.hpp>
#include <cstdio>
#include <optional>
#include <string>

#include "biphoton/biphoton.h"

namespace {

int exit_code(bp_status s) {
    switch (s) {
        case BP_OK:
            return 0;
        case BP_ERR_CONFIG:
        case BP_ERR_INVALID:
            return 2;
        case BP_ERR_NUMERIC:
            return 3;
        case BP_ERR_IO:
            return 4;
        default:
            return 1;
    }
}

int report(bp_status s, const char *context) {
    if (s != BP_OK) std::fprintf(stderr, "biphoton: %s: %s\n", context, bp_last_error());
    return exit_code(s);
}

int execute(bp_scenario *sc, const std::string &out_dir) {
    const std::string dir = out_dir.empty() ? std::string("artifacts/") + bp_scenario_experiment(sc) : out_dir;
    std::fprintf(stderr, "running %s -> %s\n", bp_scenario_experiment(sc), dir.c_str());
    bp_run *run = nullptr;
    const bp_status s = bp_scenario_run(sc, dir.c_str(), &run);
    if (s != BP_OK) return report(s, "run failed");
    for (size_t k = 0; k < bp_run_file_count(run); ++k) std::printf("%s/%s\n", bp_run_dir(run), bp_run_file(run, k));
    bp_run_free(run);
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Two-photon scattering simulations and wavefront-shaping experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", bp_version());

    std::string config_path, out_dir, preset_name;
    std::optional<std::uint64_t> seed;
    bool full = false;

    auto *run = app.add_subcommand("run", "run a scenario from a config file");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--out", out_dir, "artifact directory (default artifacts/<experiment>)");
    run->add_option("--seed", seed, "override the global seed");
    run->add_flag("--full", full, "use the large grid (n_full, default 51)");

    auto *preset = app.add_subcommand("preset", "run a built-in preset");
    preset->add_option("name", preset_name, "preset name (see `list`)")->required();
    preset->add_option("--out", out_dir, "artifact directory (default artifacts/<experiment>)");

    auto *list = app.add_subcommand("list", "list presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (list->parsed()) {
        for (size_t k = 0; k < bp_preset_count(); ++k) {
            std::printf("%-20s %s\n", bp_preset_name(k), bp_preset_description(k));
        }
        return 0;
    }

    bp_scenario *sc = nullptr;
    bp_status s = run->parsed() ? bp_scenario_load(config_path.c_str(), &sc)
                                : bp_scenario_preset(preset_name.c_str(), &sc);
    if (s != BP_OK) return report(s, "cannot load scenario");
    if (seed) s = bp_scenario_set_seed(sc, *seed);
    if (s == BP_OK && full) s = bp_scenario_set_full(sc, 1);
    int rc = s == BP_OK ? execute(sc, out_dir) : report(s, "invalid option");
    bp_scenario_free(sc);
    return rc;
}
