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

#ifndef BIPHOTON_SCENARIO_HPP
#define BIPHOTON_SCENARIO_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace biphoton {

struct ConfigEntry {
    std::string value;
    int line = 0;
};

/// Sectioned `key = value` configuration. Keys are checked against a fixed
/// schema while parsing, so every entry held here is known and well typed.
class ScenarioConfig {
   public:
    std::string origin;  // file name or preset name, used in messages
    std::string experiment;
    std::uint64_t seed = 1;
    bool full = false;
    std::map<std::string, std::map<std::string, ConfigEntry>> sections;

    bool has(const std::string &section, const std::string &key) const;
    std::string get_string(const std::string &section, const std::string &key, const std::string &def) const;
    long get_int(const std::string &section, const std::string &key, long def) const;
    double get_double(const std::string &section, const std::string &key, double def) const;
    bool get_bool(const std::string &section, const std::string &key, bool def) const;
    std::vector<long> get_int_list(const std::string &section, const std::string &key,
                                   const std::vector<long> &def) const;

    /// Sets a value as if it appeared in the file (line 0).
    void set(const std::string &section, const std::string &key, const std::string &value);

    /// Resolved configuration as text, one `key = value` per line.
    std::string dump() const;
};

/// Parses config text; syntax errors, unknown sections/keys and badly typed
/// values raise config errors that carry `origin:line`.
ScenarioConfig parse_config(const std::string &text, const std::string &origin);
ScenarioConfig load_config(const std::string &path);

struct PresetInfo {
    std::string name;
    std::string description;
};

/// Presets in a stable order.
const std::vector<PresetInfo> &list_presets();
std::string preset_text(const std::string &name);
ScenarioConfig preset_config(const std::string &name);

/// Known experiments (values of the top-level `experiment` key).
const std::vector<std::string> &experiment_names();

struct RunSummary {
    std::string out_dir;
    std::vector<std::string> files;  // relative to out_dir, in manifest order
};

/// Runs the experiment and writes its artifacts plus manifest.txt.
RunSummary run_scenario(const ScenarioConfig &cfg, const std::string &out_dir);

}  // namespace biphoton

#endif
