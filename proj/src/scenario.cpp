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

#include "biphoton/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "biphoton/events.hpp"
#include "biphoton/io.hpp"
#include "biphoton/system.hpp"

namespace biphoton {

namespace fs = std::filesystem;

namespace {

enum class KeyType { integer, real, text, boolean, int_list };

struct KeySpec {
    const char *section;
    const char *key;
    KeyType type;
};

// An empty section name marks top-level keys.
constexpr KeySpec kSchema[] = {
    {"", "experiment", KeyType::text},
    {"", "seed", KeyType::integer},
    {"grid", "n", KeyType::integer},
    {"grid", "n_full", KeyType::integer},
    {"grid", "slm_pitch_um", KeyType::real},
    {"grid", "f_in_mm", KeyType::real},
    {"grid", "f_out_mm", KeyType::real},
    {"spdc", "lambda_p_nm", KeyType::real},
    {"spdc", "sigma_r_um", KeyType::real},
    {"spdc", "sigma_k_per_m", KeyType::real},
    {"spdc", "crystal_mm", KeyType::real},
    {"spdc", "profile", KeyType::text},
    {"optics", "f0_mm", KeyType::real},
    {"optics", "f1_mm", KeyType::real},
    {"optics", "f2_mm", KeyType::real},
    {"optics", "f3_mm", KeyType::real},
    {"optics", "f4_mm", KeyType::real},
    {"optics", "f5_mm", KeyType::real},
    {"optics", "lambda_nm", KeyType::real},
    {"optics", "m_prime", KeyType::real},
    {"optics", "m_dprime", KeyType::real},
    {"optics", "m_tprime", KeyType::real},
    {"object", "kind", KeyType::text},
    {"object", "path", KeyType::text},
    {"object", "threshold", KeyType::real},
    {"object", "binarize", KeyType::boolean},
    {"object", "point_dx_px", KeyType::integer},
    {"object", "point_dy_px", KeyType::integer},
    {"object", "encoding", KeyType::text},
    {"object", "magnification", KeyType::real},
    {"medium", "kind", KeyType::text},
    {"medium", "variants", KeyType::text},
    {"medium", "corr_len_px", KeyType::real},
    {"medium", "envelope_px", KeyType::real},
    {"medium", "seed", KeyType::integer},
    {"slm", "macro_n", KeyType::integer},
    {"slm", "macro_list", KeyType::int_list},
    {"slm", "block", KeyType::integer},
    {"slm", "phase_steps", KeyType::integer},
    {"optimization", "state", KeyType::text},
    {"optimization", "steps", KeyType::integer},
    {"optimization", "phase_samples", KeyType::integer},
    {"optimization", "phase_set", KeyType::text},
    {"optimization", "feedback", KeyType::text},
    {"optimization", "fraction", KeyType::real},
    {"optimization", "plateau_window", KeyType::integer},
    {"optimization", "plateau_tol", KeyType::real},
    {"optimization", "init", KeyType::text},
    {"optimization", "target_3x3", KeyType::boolean},
    {"optimization", "runs", KeyType::integer},
    {"optimization", "pair_rate_hz", KeyType::real},
    {"optimization", "noise_rate_hz", KeyType::real},
    {"optimization", "exposure_s", KeyType::real},
    {"optimization", "window_ns", KeyType::real},
    {"events", "pair_rate_hz", KeyType::real},
    {"events", "noise_rate_hz", KeyType::real},
    {"events", "duration_s", KeyType::real},
    {"events", "window_ns", KeyType::real},
    {"events", "jitter_ns", KeyType::real},
    {"events", "tick_ns", KeyType::real},
    {"events", "write_events", KeyType::boolean},
    {"outputs", "pgm", KeyType::boolean},
    {"outputs", "csv", KeyType::boolean},
    {"outputs", "matrices", KeyType::boolean},
};

const std::vector<std::string> kSections = {"grid",   "spdc", "optics",       "object", "medium",
                                            "slm",    "optimization", "events", "outputs"};
const std::vector<std::string> kRequired = {"grid", "spdc", "optics", "medium", "outputs"};

const KeySpec *find_key(const std::string &section, const std::string &key) {
    for (const KeySpec &k : kSchema)
        if (section == k.section && key == k.key) return &k;
    return nullptr;
}

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string where(const std::string &origin, int line) {
    return line > 0 ? origin + ":" + std::to_string(line) : origin;
}

std::string key_name(const std::string &section, const std::string &key) {
    return section.empty() ? key : "[" + section + "] " + key;
}

bool parse_long_strict(const std::string &s, long *out) {
    if (s.empty()) return false;
    char *end = nullptr;
    errno = 0;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (errno != 0 || *end != '\0') return false;
    *out = v;
    return true;
}

bool parse_double_strict(const std::string &s, double *out) {
    if (s.empty()) return false;
    char *end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (*end != '\0' || !std::isfinite(v)) return false;
    *out = v;
    return true;
}

bool parse_bool_strict(const std::string &s, bool *out) {
    if (s == "true" || s == "yes" || s == "on" || s == "1") {
        *out = true;
        return true;
    }
    if (s == "false" || s == "no" || s == "off" || s == "0") {
        *out = false;
        return true;
    }
    return false;
}

bool parse_list_strict(const std::string &s, std::vector<long> *out) {
    std::vector<long> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        long x;
        if (!parse_long_strict(trim(item), &x)) return false;
        v.push_back(x);
    }
    if (v.empty()) return false;
    *out = std::move(v);
    return true;
}

void check_type(const KeySpec &spec, const std::string &value, const std::string &at) {
    bool ok = true;
    const char *expect = "";
    long l;
    double d;
    bool b;
    std::vector<long> list;
    switch (spec.type) {
        case KeyType::integer:
            ok = parse_long_strict(value, &l);
            expect = "an integer";
            break;
        case KeyType::real:
            ok = parse_double_strict(value, &d);
            expect = "a finite number";
            break;
        case KeyType::boolean:
            ok = parse_bool_strict(value, &b);
            expect = "true or false";
            break;
        case KeyType::int_list:
            ok = parse_list_strict(value, &list);
            expect = "a comma-separated list of integers";
            break;
        case KeyType::text:
            break;
    }
    if (!ok) fail_config(at + ": " + key_name(spec.section, spec.key) + ": expected " + expect + ", got '" + value + "'");
}

}  // namespace

bool ScenarioConfig::has(const std::string &section, const std::string &key) const {
    const auto s = sections.find(section);
    return s != sections.end() && s->second.count(key) > 0;
}

std::string ScenarioConfig::get_string(const std::string &section, const std::string &key,
                                       const std::string &def) const {
    if (!has(section, key)) return def;
    return sections.at(section).at(key).value;
}

long ScenarioConfig::get_int(const std::string &section, const std::string &key, long def) const {
    if (!has(section, key)) return def;
    long v = 0;
    const auto &e = sections.at(section).at(key);
    if (!parse_long_strict(e.value, &v)) fail_config(where(origin, e.line) + ": " + key_name(section, key) + ": not an integer");
    return v;
}

double ScenarioConfig::get_double(const std::string &section, const std::string &key, double def) const {
    if (!has(section, key)) return def;
    double v = 0;
    const auto &e = sections.at(section).at(key);
    if (!parse_double_strict(e.value, &v)) fail_config(where(origin, e.line) + ": " + key_name(section, key) + ": not a number");
    return v;
}

bool ScenarioConfig::get_bool(const std::string &section, const std::string &key, bool def) const {
    if (!has(section, key)) return def;
    bool v = false;
    const auto &e = sections.at(section).at(key);
    if (!parse_bool_strict(e.value, &v)) fail_config(where(origin, e.line) + ": " + key_name(section, key) + ": not a boolean");
    return v;
}

std::vector<long> ScenarioConfig::get_int_list(const std::string &section, const std::string &key,
                                               const std::vector<long> &def) const {
    if (!has(section, key)) return def;
    std::vector<long> v;
    const auto &e = sections.at(section).at(key);
    if (!parse_list_strict(e.value, &v)) fail_config(where(origin, e.line) + ": " + key_name(section, key) + ": not an integer list");
    return v;
}

void ScenarioConfig::set(const std::string &section, const std::string &key, const std::string &value) {
    const KeySpec *spec = find_key(section, key);
    if (!spec) fail_config(origin + ": unknown key " + key_name(section, key));
    check_type(*spec, value, origin);
    sections[section][key] = ConfigEntry{value, 0};
}

std::string ScenarioConfig::dump() const {
    std::ostringstream out;
    out << "experiment = " << experiment << "\nseed = " << seed << "\n";
    for (const auto &name : kSections) {
        const auto s = sections.find(name);
        if (s == sections.end()) continue;
        out << "[" << name << "]\n";
        for (const auto &[k, e] : s->second) out << k << " = " << e.value << "\n";
    }
    return out.str();
}

ScenarioConfig parse_config(const std::string &text, const std::string &origin) {
    ScenarioConfig cfg;
    cfg.origin = origin;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int lineno = 0;
    bool seen_experiment = false;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const std::string at = where(origin, lineno);
        if (line.front() == '[') {
            if (line.back() != ']') fail_config(at + ": malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
                fail_config(at + ": unknown section [" + section + "]");
            }
            if (cfg.sections.count(section)) fail_config(at + ": section [" + section + "] appears twice");
            cfg.sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail_config(at + ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail_config(at + ": missing key before '='");
        if (value.empty()) fail_config(at + ": " + key_name(section, key) + ": missing value");
        const KeySpec *spec = find_key(section, key);
        if (!spec) {
            fail_config(at + ": unknown key '" + key + "'" + (section.empty() ? " at top level" : " in [" + section + "]"));
        }
        check_type(*spec, value, at);
        if (section.empty()) {
            if (key == "experiment") {
                if (seen_experiment) fail_config(at + ": experiment given twice");
                cfg.experiment = value;
                seen_experiment = true;
            } else {
                long s = 0;
                parse_long_strict(value, &s);
                if (s < 0) fail_config(at + ": seed must be nonnegative");
                cfg.seed = static_cast<std::uint64_t>(s);
            }
            continue;
        }
        auto &sec = cfg.sections[section];
        if (sec.count(key)) fail_config(at + ": " + key_name(section, key) + " given twice");
        sec[key] = ConfigEntry{value, lineno};
    }

    std::vector<std::string> missing;
    for (const auto &r : kRequired)
        if (!cfg.sections.count(r)) missing.push_back("[" + r + "]");
    if (!seen_experiment || !missing.empty()) {
        std::string msg = origin + ": incomplete config;";
        if (!seen_experiment) msg += " missing top-level key 'experiment';";
        if (!missing.empty()) {
            msg += " missing required sections:";
            for (const auto &m : missing) msg += " " + m;
        }
        fail_config(msg);
    }
    const auto &known = experiment_names();
    if (std::find(known.begin(), known.end(), cfg.experiment) == known.end()) {
        fail_config(origin + ": unknown experiment '" + cfg.experiment + "'");
    }
    return cfg;
}

ScenarioConfig load_config(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail_io("cannot open config " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path);
}

const std::vector<std::string> &experiment_names() {
    static const std::vector<std::string> names = {"fig2",          "fig3-opt",       "fig4-media",
                                                   "sm2-events",    "sm5-tm",         "sm9-sigma",
                                                   "sm11-classical", "sm12-macropixels", "sm13-multiplicity",
                                                   "sm14-diff-encoding"};
    return names;
}

// ---------------------------------------------------------------------------
// Presets

namespace {

constexpr const char *kCommon = R"(seed = 1

[grid]
n = 32
slm_pitch_um = 100
f_in_mm = 150
f_out_mm = 150

[spdc]
lambda_p_nm = 402
sigma_r_um = 13
sigma_k_per_m = 4700
profile = gaussian

[optics]
f0_mm = 200
f1_mm = 35
f2_mm = 150
f3_mm = 150
f4_mm = 150
f5_mm = 150
lambda_nm = 804
m_prime = 0.83
m_dprime = 4.3
m_tprime = 1.6

[outputs]
pgm = true
csv = true
matrices = false
)";

struct PresetDef {
    const char *name;
    const char *description;
    const char *body;
};

const PresetDef kPresets[] = {
    {"fig2", "digit '8' without medium, through a thin medium, and after tailoring (guide-state optimization)",
     R"(experiment = fig2
[object]
kind = digit8
encoding = finite
[medium]
kind = thin
corr_len_px = 2
[slm]
macro_n = 16
[optimization]
state = guide
steps = 1500
)"},
    {"fig3-opt", "guide-state optimization: trace, phase mask and correlation peak before and after",
     R"(experiment = fig3-opt
[medium]
kind = thin
corr_len_px = 2
[slm]
macro_n = 16
[optimization]
state = guide
steps = 1500
)"},
    {"fig4-media", "other media: random phase screen and simulated thick medium, before and after tailoring",
     R"(experiment = fig4-media
[object]
kind = digit8
encoding = finite
[medium]
kind = random-phase
variants = random-phase,thick
corr_len_px = 2
envelope_px = 3
[slm]
macro_n = 16
[optimization]
state = guide
steps = 1500
)"},
    {"sm2-events", "synthetic time-tagged events, greedy pairing and accidental subtraction",
     R"(experiment = sm2-events
[object]
kind = digit8
encoding = exact
[medium]
kind = none
[events]
pair_rate_hz = 100000
noise_rate_hz = 20000
duration_s = 1
window_ns = 6
jitter_ns = 1
tick_ns = 1.56
write_events = false
)"},
    {"sm5-tm", "phase-shifting Hadamard measurement of the SLM-to-camera matrix and identity-mask focusing",
     R"(experiment = sm5-tm
[grid]
n = 16
[medium]
kind = thin
corr_len_px = 2
[slm]
macro_n = 8
block = 1
phase_steps = 4
)"},
    {"sm9-sigma", "double-cosine fits with a diagonal versus a finite-width guide state",
     R"(experiment = sm9-sigma
[medium]
kind = thick
corr_len_px = 2
envelope_px = 3
[slm]
macro_n = 16
[optimization]
steps = 300
)"},
    {"sm11-classical", "entangled, classically correlated and coherent light through four versions of the system",
     R"(experiment = sm11-classical
[object]
kind = digit8
encoding = finite
[medium]
kind = thin
corr_len_px = 2
[slm]
macro_n = 16
[optimization]
state = guide
steps = 1500
)"},
    {"sm12-macropixels", "tailoring with 8x8, 16x16 and 32x32 macropixels on one medium",
     R"(experiment = sm12-macropixels
[object]
kind = digit8
encoding = finite
[medium]
kind = thin
corr_len_px = 2
[slm]
macro_list = 8,16,32
[optimization]
state = guide
steps = 3000
)"},
    {"sm13-multiplicity", "ten seeded optimizations compared with each other and with the identity mask",
     R"(experiment = sm13-multiplicity
[grid]
n = 16
[medium]
kind = thin
corr_len_px = 2
[slm]
macro_n = 16
[optimization]
state = guide
steps = 1000
runs = 10
)"},
    {"sm14-diff-encoding", "difference-coordinate encoding through an odd-phase circulant",
     R"(experiment = sm14-diff-encoding
[object]
kind = digit8
[medium]
kind = none
)"},
};

}  // namespace

const std::vector<PresetInfo> &list_presets() {
    static const std::vector<PresetInfo> list = [] {
        std::vector<PresetInfo> v;
        for (const auto &p : kPresets) v.push_back({p.name, p.description});
        return v;
    }();
    return list;
}

std::string preset_text(const std::string &name) {
    for (const auto &p : kPresets) {
        if (name != p.name) continue;
        // Preset sections override the shared blocks; merge by section so that
        // no section appears twice.
        std::map<std::string, std::vector<std::string>> blocks;
        std::vector<std::string> top;
        auto absorb = [&](const std::string &text) {
            std::istringstream in(text);
            std::string line, section;
            while (std::getline(in, line)) {
                const std::string t = trim(line);
                if (t.empty()) continue;
                if (t.front() == '[') {
                    section = t.substr(1, t.size() - 2);
                    blocks[section];
                    continue;
                }
                const std::string key = trim(t.substr(0, t.find('=')));
                auto &dst = section.empty() ? top : blocks[section];
                dst.erase(std::remove_if(dst.begin(), dst.end(),
                                         [&](const std::string &l) { return trim(l.substr(0, l.find('='))) == key; }),
                          dst.end());
                dst.push_back(t);
            }
        };
        absorb(kCommon);
        absorb(p.body);
        std::string out;
        for (const auto &l : top) out += l + "\n";
        for (const auto &s : kSections) {
            const auto b = blocks.find(s);
            if (b == blocks.end()) continue;
            out += "\n[" + s + "]\n";
            for (const auto &l : b->second) out += l + "\n";
        }
        return out;
    }
    fail_config("unknown preset '" + name + "'");
}

ScenarioConfig preset_config(const std::string &name) { return parse_config(preset_text(name), "preset:" + name); }

// ---------------------------------------------------------------------------
// Running

namespace {

class Artifacts {
   public:
    Artifacts(std::string dir, bool pgm, bool csv, bool matrices)
        : dir_(std::move(dir)), pgm_(pgm), csv_(csv), matrices_(matrices) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) fail_io("cannot create output directory " + dir_ + ": " + ec.message());
    }

    bool matrices() const { return matrices_; }

    void image(const std::string &stem, const RMatrix &img, const std::string &what) {
        if (!img.allFinite()) fail_numeric("non-finite values in image " + stem);
        if (pgm_) {
            const double factor = write_pgm16(img, path(stem + ".pgm"));
            char buf[64];
            std::snprintf(buf, sizeof(buf), " (pgm normalization %.6g)", factor);
            add(stem + ".pgm", what + buf);
        }
        if (csv_) {
            write_csv(img, path(stem + ".csv"));
            add(stem + ".csv", what);
        }
    }

    void table(const std::string &name, const std::string &text, const std::string &what) {
        write_text(text, path(name));
        add(name, what);
    }

    void mask(const std::string &stem, const PhaseMask &m, const std::string &what) {
        write_mask_biph1(m, path(stem + ".biph"));
        add(stem + ".biph", what + " (BIPH1 f64 phases)");
        write_mask_pgm(m, path(stem + ".pgm"));
        add(stem + ".pgm", what + " (8-bit preview)");
    }

    void matrix(const std::string &stem, const CMatrix &m, const std::string &tag, const std::string &what) {
        write_biph1(m, path(stem + ".biph"), tag);
        add(stem + ".biph", what);
    }

    void add(const std::string &file, const std::string &what) { files_.emplace_back(file, what); }

    std::string path(const std::string &file) const { return (fs::path(dir_) / file).string(); }

    RunSummary finish(const ScenarioConfig &cfg) {
        write_text(cfg.dump(), path("config.txt"));
        add("config.txt", "resolved configuration");
        add("manifest.txt", "this file");
        std::ostringstream m;
        m << "# biphoton artifacts\n# experiment = " << cfg.experiment << "\n# seed = " << cfg.seed
          << "\n# source = " << cfg.origin << "\n";
        std::istringstream conf(cfg.dump());
        std::string line;
        while (std::getline(conf, line)) m << "#   " << line << "\n";
        for (const auto &[f, w] : files_) m << f << "\t" << w << "\n";
        write_text(m.str(), path("manifest.txt"));
        RunSummary s;
        s.out_dir = dir_;
        for (const auto &[f, w] : files_) s.files.push_back(f);
        return s;
    }

   private:
    std::string dir_;
    bool pgm_, csv_, matrices_;
    std::vector<std::pair<std::string, std::string>> files_;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Metrics {
    std::vector<std::pair<std::string, std::string>> rows;
    void put(const std::string &k, double v) { rows.emplace_back(k, fmt(v)); }
    void put(const std::string &k, const std::string &v) { rows.emplace_back(k, v); }
    std::string text() const {
        std::string out = "metric,value\n";
        for (const auto &[k, v] : rows) out += k + "," + v + "\n";
        return out;
    }
};

void require(bool ok, const std::string &key, const std::string &msg) {
    if (!ok) fail_config(key + ": " + msg);
}

DeskParams desk_params(const ScenarioConfig &c) {
    DeskParams p;
    p.n = static_cast<int>(c.full ? c.get_int("grid", "n_full", 51) : c.get_int("grid", "n", 32));
    require(p.n >= 4 && p.n <= 64, "[grid] n", "must lie in [4, 64]");
    p.slm_pitch = c.get_double("grid", "slm_pitch_um", 100.0) * 1e-6;
    p.f_in = c.get_double("grid", "f_in_mm", 150.0) * 1e-3;
    p.f_out = c.get_double("grid", "f_out_mm", 150.0) * 1e-3;
    require(p.slm_pitch > 0, "[grid] slm_pitch_um", "must be positive");
    require(p.f_in > 0 && p.f_out > 0, "[grid] f_in_mm/f_out_mm", "must be positive");
    p.encoding_magnification = c.get_double("object", "magnification", 1.0);
    require(p.encoding_magnification > 0, "[object] magnification", "must be positive");

    p.spdc.lambda_p = c.get_double("spdc", "lambda_p_nm", 402.0) * 1e-9;
    p.spdc.sigma_k = c.get_double("spdc", "sigma_k_per_m", 4.7e3);
    p.spdc.L = c.get_double("spdc", "crystal_mm", 0.0) * 1e-3;
    require(p.spdc.lambda_p > 0, "[spdc] lambda_p_nm", "must be positive");
    require(p.spdc.sigma_k > 0, "[spdc] sigma_k_per_m", "must be positive");
    require(p.spdc.L >= 0, "[spdc] crystal_mm", "must be nonnegative");
    if (c.has("spdc", "sigma_r_um")) {
        p.spdc.sigma_r = c.get_double("spdc", "sigma_r_um", 13.0) * 1e-6;
        require(p.spdc.sigma_r >= 0, "[spdc] sigma_r_um", "must be nonnegative");
        if (p.spdc.L > 0) {
            try {
                p.spdc.check_consistency(1e-2);
            } catch (const Error &e) {
                fail_config(std::string("[spdc] sigma_r_um/crystal_mm: ") + e.what());
            }
        }
    } else if (p.spdc.L > 0) {
        p.spdc.sigma_r = p.spdc.sigma_r_from_crystal();
    }
    const std::string profile = c.get_string("spdc", "profile", "gaussian");
    require(profile == "gaussian" || profile == "sinc", "[spdc] profile", "must be gaussian or sinc");
    p.spdc.profile = profile == "sinc" ? Profile::sinc : Profile::gaussian;

    const double fdef[6] = {200, 35, 150, 150, 150, 150};
    for (int k = 0; k < 6; ++k) {
        const std::string key = "f" + std::to_string(k) + "_mm";
        p.optics.f[k] = c.get_double("optics", key, fdef[k]) * 1e-3;
        require(p.optics.f[k] > 0, "[optics] " + key, "must be positive");
    }
    p.optics.lambda = c.get_double("optics", "lambda_nm", 804.0) * 1e-9;
    p.optics.M_prime = c.get_double("optics", "m_prime", 0.83);
    p.optics.M_dprime = c.get_double("optics", "m_dprime", 4.3);
    p.optics.M_tprime = c.get_double("optics", "m_tprime", 1.6);
    require(p.optics.lambda > 0, "[optics] lambda_nm", "must be positive");
    require(p.optics.M_dprime > 0, "[optics] m_dprime", "must be positive");

    try {
        p.medium = parse_medium_kind(c.get_string("medium", "kind", "thin"));
    } catch (const Error &e) {
        fail_config(std::string("[medium] kind: ") + e.what());
    }
    p.speckle.corr_len = c.get_double("medium", "corr_len_px", 2.0);
    p.speckle.envelope_sigma = c.get_double("medium", "envelope_px", 3.0);
    p.speckle.seed = static_cast<std::uint64_t>(c.get_int("medium", "seed", static_cast<long>(mix_seed(c.seed, 101) >> 2)));
    if (p.medium != MediumKind::none) {
        require(p.speckle.corr_len >= 1.0 && p.speckle.corr_len < p.n / 2.0, "[medium] corr_len_px",
                "must lie in [1, n/2)");
    }
    if (p.medium == MediumKind::thick) require(p.speckle.envelope_sigma > 0, "[medium] envelope_px", "must be positive");
    return p;
}

ObjectImage object_from(const ScenarioConfig &c, int n) {
    const std::string kind = c.get_string("object", "kind", "digit8");
    if (kind == "digit8") return digit_eight(n);
    if (kind == "point") {
        return point_object(n, static_cast<int>(c.get_int("object", "point_dx_px", 0)),
                            static_cast<int>(c.get_int("object", "point_dy_px", 0)));
    }
    if (kind == "constant") return constant_object(n, 1.0);
    if (kind == "pgm") {
        require(c.has("object", "path"), "[object] path", "required for kind = pgm");
        fs::path p = c.get_string("object", "path", "");
        if (p.is_relative() && fs::exists(fs::path(c.origin).parent_path() / p)) p = fs::path(c.origin).parent_path() / p;
        ObjectImage img = load_object_pgm(p.string(), c.get_double("object", "threshold", 0.0),
                                          c.get_bool("object", "binarize", false));
        return img;
    }
    fail_config("[object] kind: expected digit8, point, constant or pgm, got '" + kind + "'");
}

bool exact_encoding(const ScenarioConfig &c) {
    const std::string e = c.get_string("object", "encoding", "finite");
    require(e == "finite" || e == "exact", "[object] encoding", "must be finite or exact");
    return e == "exact";
}

MacroLayout layout_from(const ScenarioConfig &c, int n, long macro) {
    require(macro >= 1 && macro <= n, "[slm] macro_n", "must lie in [1, n]");
    if (c.has("slm", "block")) {
        const long block = c.get_int("slm", "block", 1);
        require(block >= 1 && block * macro <= n, "[slm] block", "macro_n * block must fit on the grid");
        return macro_layout(n, static_cast<int>(macro), static_cast<int>(block));
    }
    return macro_layout(n, static_cast<int>(macro));
}

OptConfig opt_config(const ScenarioConfig &c, std::uint64_t stream) {
    OptConfig o;
    o.max_steps = static_cast<int>(c.get_int("optimization", "steps", 1500));
    require(o.max_steps >= 1, "[optimization] steps", "must be at least 1");
    o.phase_samples = static_cast<int>(c.get_int("optimization", "phase_samples", 7));
    const std::string set = c.get_string("optimization", "phase_set", "uniform");
    require(set == "uniform" || set == "six", "[optimization] phase_set", "must be uniform or six");
    if (set == "six") o.phases = six_step_phases();
    require(o.sweep_phases().size() >= 5, "[optimization] phase_samples", "must be at least 5");
    const std::string fb = c.get_string("optimization", "feedback", "analytic");
    require(fb == "analytic" || fb == "sampled", "[optimization] feedback", "must be analytic or sampled");
    o.feedback = fb == "sampled" ? Feedback::sampled : Feedback::analytic;
    o.fraction = c.get_double("optimization", "fraction", 0.5);
    require(o.fraction > 0 && o.fraction <= 1, "[optimization] fraction", "must lie in (0, 1]");
    o.plateau_window = static_cast<int>(c.get_int("optimization", "plateau_window", 200));
    o.plateau_tol = c.get_double("optimization", "plateau_tol", 1e-4);
    require(o.plateau_window >= 0 && o.plateau_tol >= 0, "[optimization] plateau_window/plateau_tol",
            "must be nonnegative");
    const std::string init = c.get_string("optimization", "init", "zero");
    require(init == "zero" || init == "random", "[optimization] init", "must be zero or random");
    o.init = init == "random" ? InitMode::random : InitMode::zero;
    o.target_3x3 = c.get_bool("optimization", "target_3x3", false);
    o.sampling.pair_rate = c.get_double("optimization", "pair_rate_hz", 2e4);
    o.sampling.noise_rate = c.get_double("optimization", "noise_rate_hz", 0.0);
    o.sampling.exposure_s = c.get_double("optimization", "exposure_s", 3.0);
    o.sampling.window_ns = c.get_double("optimization", "window_ns", 6.0);
    require(o.sampling.pair_rate > 0 && o.sampling.exposure_s > 0 && o.sampling.noise_rate >= 0 &&
                o.sampling.window_ns >= 0,
            "[optimization] pair_rate_hz/exposure_s/noise_rate_hz/window_ns", "invalid sampled-feedback rates");
    o.seed = mix_seed(c.seed, 200 + stream);
    return o;
}

OptResult run_opt(const ScenarioConfig &c, const DeskSystem &sys, const MacroLayout &layout, std::uint64_t stream) {
    const std::string state = c.get_string("optimization", "state", "guide");
    const OptConfig o = opt_config(c, stream);
    if (state == "guide") return optimize(sys.sm, sys.guide(), layout, o);
    if (state == "diagonal") return optimize(sys.sm, sys.diagonal_guide(), layout, o);
    if (state == "rho0") return optimize(sys.sm, sys.separable_guide(), layout, o);
    fail_config("[optimization] state: expected guide, diagonal or rho0, got '" + state + "'");
}

RMatrix field_image(const CVector &v, int n) {
    RMatrix img(n, n);
    for (int k = 0; k < n * n; ++k) img(k / n, k % n) = std::norm(v[k]);
    return img;
}

ComplexField object_field(const ObjectImage &obj, const Grid &g) {
    ComplexField f = zero_field(g);
    const int h = g.center();
    for (int y = 0; y < g.n; ++y)
        for (int x = 0; x < g.n; ++x) f.at(x, y) = std::sqrt(std::max(obj.at_offset(x - h, y - h), 0.0));
    return f;
}

RMatrix classical_image(const ScatteringMatrix &chain, const ObjectImage &obj) {
    const ComplexField out = classical(chain, object_field(obj, chain.grid_in));
    return field_image(out.values, chain.grid_out.n);
}

Artifacts make_artifacts(const ScenarioConfig &c, const std::string &dir) {
    return Artifacts(dir, c.get_bool("outputs", "pgm", true), c.get_bool("outputs", "csv", true),
                     c.get_bool("outputs", "matrices", false));
}

std::string trace_what(const OptResult &r) {
    return "optimization trace (" + std::to_string(r.trace.steps.size()) + " steps" +
           (r.trace.plateau ? ", plateau reached)" : ")");
}

// Object through the desk with a given mask: correlation and intensity images.
void emit_object(Artifacts &art, Metrics &met, const std::string &label, const DeskSystem &sys,
                 const TwoPhotonPure &psi_slm, const ObjectImage &obj, const PhaseMask &mask, bool with_medium) {
    const ScatteringMatrix &s = with_medium ? sys.sm : sys.sm_free;
    const CorrelationImage g = gamma_plus(propagate_slm(s, mask, psi_slm));
    const RMatrix target = intensity_image(obj);
    art.image("gamma_" + label, g.centered(), "sum-coordinate correlation image, " + label);
    const RMatrix inten = classical_image(sys.chain(mask, with_medium), obj);
    art.image("intensity_" + label, inten, "classical intensity image, " + label);
    met.put("fidelity_" + label, fidelity_ncc(g, target));
    met.put("classical_ncc_" + label, ncc(inten, center_resize(target, inten.rows())));
}

void exp_fig2(const ScenarioConfig &c, Artifacts &art) {
    const DeskSystem sys = build_desk(desk_params(c));
    const ObjectImage obj = object_from(c, sys.params.n);
    const TwoPhotonPure psi_slm = sys.to_slm(sys.object_state(obj, exact_encoding(c)));
    const MacroLayout layout = layout_from(c, sys.params.n, c.get_int("slm", "macro_n", 16));
    Metrics met;
    const PhaseMask zero = zero_mask(layout);
    emit_object(art, met, "no_medium", sys, psi_slm, obj, zero, false);
    emit_object(art, met, "medium", sys, psi_slm, obj, zero, true);
    const OptResult res = run_opt(c, sys, layout, 0);
    emit_object(art, met, "tailored", sys, psi_slm, obj, res.mask, true);
    art.table("trace.csv", res.trace.to_csv(), trace_what(res));
    art.mask("mask_tailored", res.mask, "optimized SLM phase mask");
    met.put("objective_initial", res.trace.initial_objective);
    met.put("objective_best", res.trace.best());
    art.table("metrics.csv", met.text(), "image fidelities and optimization summary");
}

void exp_fig3(const ScenarioConfig &c, Artifacts &art) {
    const DeskSystem sys = build_desk(desk_params(c));
    const MacroLayout layout = layout_from(c, sys.params.n, c.get_int("slm", "macro_n", 16));
    const TwoPhotonPure guide = sys.guide();
    const OptResult res = run_opt(c, sys, layout, 0);
    Metrics met;
    const CorrelationImage before = gamma_plus(propagate_slm(sys.sm, zero_mask(layout), guide));
    const CorrelationImage after = gamma_plus(propagate_slm(sys.sm, res.mask, guide));
    const CorrelationImage free = gamma_plus(propagate_slm(sys.sm_free, zero_mask(layout), guide));
    art.image("gamma_guide_no_medium", free.centered(), "guide-state correlation image without medium");
    art.image("gamma_guide_before", before.centered(), "guide-state correlation image through the medium");
    art.image("gamma_guide_after", after.centered(), "guide-state correlation image after optimization");
    art.table("trace.csv", res.trace.to_csv(), trace_what(res));
    art.mask("mask_optimized", res.mask, "optimized SLM phase mask");
    const IdentityMask id = identity_mask(sys.sm, layout, sys.target_pixel());
    art.mask("mask_identity", id.mask, "identity (conjugation) mask");
    const auto w = macropixel_weights(sys.sm, layout, sys.target_pixel(), sys.guide_slm_intensity());
    const SolutionDistance sd = solution_distance(res.mask, id.mask, w);
    std::string hist = "bin_center,weight\n";
    for (size_t k = 0; k < sd.histogram.size(); ++k) {
        hist += fmt(-kPi + (k + 0.5) * kTwoPi / sd.histogram.size()) + "," + fmt(sd.histogram[k]) + "\n";
    }
    art.table("phase_difference_histogram.csv", hist, "optimized minus identity phase histogram");
    met.put("objective_initial", res.trace.initial_objective);
    met.put("objective_best", res.trace.best());
    met.put("gain", res.trace.best() / res.trace.initial_objective);
    met.put("steps", static_cast<double>(res.trace.steps.size()));
    met.put("peak_separation", sd.separation);
    met.put("separation_degenerate", sd.degenerate ? "true" : "false");
    met.put("unlit_macropixels", static_cast<double>(id.unlit.size()));
    art.table("metrics.csv", met.text(), "optimization summary");
}

std::vector<std::string> split_list(const std::string &s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void exp_fig4(const ScenarioConfig &c, Artifacts &art) {
    DeskParams base = desk_params(c);
    std::vector<std::string> kinds = split_list(c.get_string("medium", "variants", medium_kind_name(base.medium)));
    require(!kinds.empty(), "[medium] variants", "empty list");
    Metrics met;
    std::uint64_t stream = 0;
    for (const auto &k : kinds) {
        DeskParams p = base;
        try {
            p.medium = parse_medium_kind(k);
        } catch (const Error &e) {
            fail_config(std::string("[medium] variants: ") + e.what());
        }
        if (p.medium == MediumKind::thick) {
            require(p.speckle.envelope_sigma > 0, "[medium] envelope_px", "must be positive");
        }
        const DeskSystem sys = build_desk(p);
        const ObjectImage obj = object_from(c, p.n);
        const TwoPhotonPure psi_slm = sys.to_slm(sys.object_state(obj, exact_encoding(c)));
        const MacroLayout layout = layout_from(c, p.n, c.get_int("slm", "macro_n", 16));
        emit_object(art, met, k + "_medium", sys, psi_slm, obj, zero_mask(layout), true);
        const OptResult res = run_opt(c, sys, layout, stream++);
        emit_object(art, met, k + "_tailored", sys, psi_slm, obj, res.mask, true);
        art.table("trace_" + k + ".csv", res.trace.to_csv(), trace_what(res) + ", " + k);
        art.mask("mask_" + k, res.mask, "optimized SLM phase mask, " + k);
    }
    art.table("metrics.csv", met.text(), "image fidelities per medium");
}

void exp_events(const ScenarioConfig &c, Artifacts &art) {
    const DeskSystem sys = build_desk(desk_params(c));
    const ObjectImage obj = object_from(c, sys.params.n);
    const TwoPhotonPure psi_in = sys.object_state(obj, exact_encoding(c));
    const MacroLayout layout = macro_layout(sys.params.n, 1, 1);
    const TwoPhotonPure out = two_photon(sys.chain(zero_mask(layout), sys.params.medium != MediumKind::none), psi_in);
    const G2Matrix g2 = g2_from_pure(out);

    SynthesisParams sp;
    sp.pair_rate = c.get_double("events", "pair_rate_hz", 1e5);
    sp.noise_rate = c.get_double("events", "noise_rate_hz", 2e4);
    sp.duration_s = c.get_double("events", "duration_s", 1.0);
    sp.jitter_ns = c.get_double("events", "jitter_ns", 1.0);
    sp.tick_ns = c.get_double("events", "tick_ns", 0.0);
    sp.seed = mix_seed(c.seed, 301);
    const double window = c.get_double("events", "window_ns", 6.0);
    require(sp.pair_rate >= 0 && sp.noise_rate >= 0, "[events] pair_rate_hz/noise_rate_hz", "must be nonnegative");
    require(sp.duration_s > 0, "[events] duration_s", "must be positive");
    require(sp.jitter_ns >= 0 && sp.tick_ns >= 0, "[events] jitter_ns/tick_ns", "must be nonnegative");
    require(window > 0, "[events] window_ns", "must be positive");

    const EventList ev = synthesize_events(g2, sp);
    const CoincidenceSet pairs = pair_coincidences(ev, window);
    const SumCoordinateMap map = sum_coordinate_map(sys.camera, MapMode::circular, MapSign::sum);
    const CorrelationImage raw = pair_histogram(ev, pairs, map);
    const CorrelationImage acc = accidental_map(ev, map, window);
    const CorrelationImage corr = corr_image_from_events(ev, pairs, acc, map);
    CorrelationImage analytic = project_sum(g2, map);

    art.image("gamma_raw", raw.centered(), "pair histogram before subtraction");
    art.image("gamma_accidentals", acc.centered(), "accidental estimate from singles");
    art.image("gamma_corrected", corr.centered(), "accidental-subtracted correlation image");
    art.image("gamma_analytic", analytic.centered(), "analytic correlation image");
    art.image("singles", singles_image(g2), "analytic singles image");
    if (c.get_bool("events", "write_events", false)) {
        write_events_csv(ev, art.path("events.csv"));
        art.add("events.csv", "synthetic events (x,y,t_ns)");
    }
    Metrics met;
    met.put("events", static_cast<double>(ev.events.size()));
    met.put("pairs_matched", static_cast<double>(pairs.pairs.size()));
    met.put("accidentals_expected", expected_accidentals(ev, window));
    met.put("ncc_corrected_vs_analytic", ncc(corr.centered(), analytic.centered()));
    met.put("ncc_raw_vs_analytic", ncc(raw.centered(), analytic.centered()));
    met.put("fidelity_corrected", fidelity_ncc(corr, intensity_image(obj)));
    art.table("metrics.csv", met.text(), "event pipeline summary");
}

void exp_tm(const ScenarioConfig &c, Artifacts &art) {
    DeskParams p = desk_params(c);
    const DeskSystem sys = build_desk(p);
    const long macro = c.get_int("slm", "macro_n", 8);
    require(macro >= 1 && macro < p.n, "[slm] macro_n", "must leave a reference border on the grid");
    const long block = c.get_int("slm", "block", 1);
    require(block >= 1 && macro * block < p.n, "[slm] block", "the active zone must leave a border");
    const MacroLayout layout = macro_layout(p.n, static_cast<int>(macro), static_cast<int>(block));
    const int steps = static_cast<int>(c.get_int("slm", "phase_steps", 4));
    require(steps >= 3, "[slm] phase_steps", "must be at least 3");
    const ComplexField ref = border_reference(sys.slm, layout);
    const MeasuredTM had = measure_tm(sys.sm, ref, layout, steps);
    const MeasuredTM pix = hadamard_to_pixel(had);
    write_measured_tm(pix, art.path("measured_tm.biph"));
    art.add("measured_tm.biph", "measured matrix, macropixel basis (BIPH1, tag measured)");
    if (art.matrices()) art.matrix("truth_sm", sys.sm.m, "truth", "true SLM-to-camera matrix");

    const int target = sys.target_pixel();
    const IdentityMask meas = identity_mask(pix, layout, target);
    const IdentityMask truth = identity_mask(sys.sm, layout, target);
    art.mask("mask_identity_measured", meas.mask, "identity mask from the measured matrix");
    art.mask("mask_identity_truth", truth.mask, "identity mask from the true matrix");

    auto focus = [&](const PhaseMask &m) {
        CVector field = CVector::Zero(sys.slm.d());
        for (int k = 0; k < layout.count(); ++k)
            for (int px : layout.pixels[k]) field[px] = std::polar(1.0, m.phases[k]);
        return CVector(sys.sm.m * field);
    };
    const CVector e0 = focus(zero_mask(layout)), e1 = focus(meas.mask);
    art.image("intensity_uncorrected", field_image(e0, p.n), "camera intensity, flat SLM");
    art.image("intensity_focused", field_image(e1, p.n), "camera intensity, measured identity mask");
    Metrics met;
    met.put("tm_error", tm_error(pix, sys.sm, layout));
    met.put("focus_enhancement", std::norm(e1[target]) / std::max(e0.cwiseAbs2().mean(), 1e-300));
    met.put("unlit_macropixels", static_cast<double>(meas.unlit.size()));
    art.table("metrics.csv", met.text(), "measurement error and focusing");
}

void exp_sigma(const ScenarioConfig &c, Artifacts &art) {
    const DeskSystem sys = build_desk(desk_params(c));
    const MacroLayout layout = layout_from(c, sys.params.n, c.get_int("slm", "macro_n", 16));
    Metrics met;
    const std::pair<const char *, TwoPhotonPure> states[] = {{"diagonal", sys.diagonal_guide()},
                                                             {"finite_width", sys.guide()}};
    std::uint64_t stream = 0;
    for (const auto &[name, psi] : states) {
        const OptResult res = optimize(sys.sm, psi, layout, opt_config(c, stream++));
        art.table(std::string("trace_") + name + ".csv", res.trace.to_csv(), trace_what(res) + ", " + name);
        double worst = 0.0;
        int big = 0;
        for (const auto &s : res.trace.steps) {
            const double r = s.fit.a / std::max(std::abs(s.fit.c), 1e-300);
            worst = std::max(worst, r);
            big += r >= 1e-2;
        }
        met.put(std::string("max_a_over_c_") + name, worst);
        met.put(std::string("fraction_a_over_c_ge_1e-2_") + name,
                static_cast<double>(big) / static_cast<double>(res.trace.steps.size()));
    }
    art.table("metrics.csv", met.text(), "first-harmonic statistics");
}

void exp_classical(const ScenarioConfig &c, Artifacts &art) {
    const DeskSystem sys = build_desk(desk_params(c));
    const ObjectImage obj = object_from(c, sys.params.n);
    const MacroLayout layout = layout_from(c, sys.params.n, c.get_int("slm", "macro_n", 16));
    const TwoPhotonPure psi_in = sys.object_state(obj, exact_encoding(c));
    const TwoPhotonMixed rho_t = sys.object_ensemble(obj);
    const IdentityMask id = identity_mask(sys.sm, layout, sys.target_pixel());
    const OptResult res = run_opt(c, sys, layout, 0);
    const RMatrix target = intensity_image(obj);
    art.mask("mask_identity", id.mask, "identity mask");
    art.mask("mask_nontrivial", res.mask, "optimized mask");
    art.table("trace.csv", res.trace.to_csv(), trace_what(res));

    const std::pair<const char *, ScatteringMatrix> systems[] = {
        {"no_medium", sys.chain(zero_mask(layout), false)},
        {"medium", sys.chain(zero_mask(layout), true)},
        {"identity", sys.chain(id.mask, true)},
        {"nontrivial", sys.chain(res.mask, true)},
    };
    std::string table = "system,entangled,rho_t,classical\n";
    for (const auto &[name, chain] : systems) {
        const CorrelationImage ge = gamma_plus(two_photon(chain, psi_in));
        const CorrelationImage gm = gamma_plus(mixed_g2(chain, rho_t));
        const RMatrix ic = classical_image(chain, obj);
        art.image(std::string("entangled_") + name, ge.centered(), std::string("entangled state, ") + name);
        art.image(std::string("rho_t_") + name, gm.centered(), std::string("classically correlated state, ") + name);
        art.image(std::string("classical_") + name, ic, std::string("coherent intensity, ") + name);
        table += std::string(name) + "," + fmt(fidelity_ncc(ge, target)) + "," + fmt(fidelity_ncc(gm, target)) + "," +
                 fmt(ncc(ic, center_resize(target, ic.rows()))) + "\n";
    }
    art.table("fidelity.csv", table, "fidelity of the 12 panels against the object");
}

void exp_macropixels(const ScenarioConfig &c, Artifacts &art) {
    const DeskSystem sys = build_desk(desk_params(c));
    const ObjectImage obj = object_from(c, sys.params.n);
    const TwoPhotonPure psi_slm = sys.to_slm(sys.object_state(obj, exact_encoding(c)));
    const TwoPhotonPure guide = sys.guide();
    const auto list = c.get_int_list("slm", "macro_list", {8, 16, 32});
    std::string table = "macro_n,gain,fwhm_px,contrast,object_fidelity\n";
    std::uint64_t stream = 0;
    for (long m : list) {
        const MacroLayout layout = layout_from(c, sys.params.n, m);
        const OptResult res = run_opt(c, sys, layout, stream++);
        const CorrelationImage g = gamma_plus(propagate_slm(sys.sm, res.mask, guide));
        const PeakMetrics pm = peak_metrics(g);
        const CorrelationImage go = gamma_plus(propagate_slm(sys.sm, res.mask, psi_slm));
        const std::string tag = "macro" + std::to_string(m);
        art.image("gamma_guide_" + tag, g.centered(), "restored guide peak, " + tag);
        art.image("gamma_object_" + tag, go.centered(), "object correlation image, " + tag);
        art.mask("mask_" + tag, res.mask, "optimized mask, " + tag);
        table += std::to_string(m) + "," + fmt(res.trace.best() / res.trace.initial_objective) + "," + fmt(pm.fwhm_px) +
                 "," + fmt(pm.contrast) + "," + fmt(fidelity_ncc(go, intensity_image(obj))) + "\n";
    }
    art.table("macropixels.csv", table, "peak width and contrast per macropixel grid");
}

void exp_multiplicity(const ScenarioConfig &c, Artifacts &art) {
    const DeskSystem sys = build_desk(desk_params(c));
    const MacroLayout layout = layout_from(c, sys.params.n, c.get_int("slm", "macro_n", 16));
    const long runs = c.get_int("optimization", "runs", 10);
    require(runs >= 2, "[optimization] runs", "must be at least 2");
    const IdentityMask id = identity_mask(sys.sm, layout, sys.target_pixel());
    const auto w = macropixel_weights(sys.sm, layout, sys.target_pixel(), sys.guide_slm_intensity());
    art.mask("mask_identity", id.mask, "identity mask");
    std::vector<PhaseMask> masks;
    std::string runs_csv = "run,gain,separation,mu1,mu2,weight1,weight2,degenerate,trivial\n";
    std::string hist_csv = "bin_center";
    for (long r = 0; r < runs; ++r) hist_csv += ",run" + std::to_string(r);
    hist_csv += "\n";
    std::vector<std::vector<double>> hists;
    for (long r = 0; r < runs; ++r) {
        const OptResult res = run_opt(c, sys, layout, static_cast<std::uint64_t>(r));
        const SolutionDistance sd = solution_distance(res.mask, id.mask, w);
        const TrivialityVerdict tv = is_trivial(sys.chain(res.mask), 0.5);
        runs_csv += std::to_string(r) + "," + fmt(res.trace.best() / res.trace.initial_objective) + "," +
                    fmt(sd.separation) + "," + fmt(sd.mu1) + "," + fmt(sd.mu2) + "," + fmt(sd.weight1) + "," +
                    fmt(sd.weight2) + "," + (sd.degenerate ? "true" : "false") + "," + (tv.trivial ? "true" : "false") +
                    "\n";
        art.mask("mask_run" + std::to_string(r), res.mask, "optimized mask, run " + std::to_string(r));
        hists.push_back(sd.histogram);
        masks.push_back(res.mask);
    }
    for (size_t k = 0; k < hists.front().size(); ++k) {
        hist_csv += fmt(-kPi + (k + 0.5) * kTwoPi / hists.front().size());
        for (const auto &h : hists) hist_csv += "," + fmt(h[k]);
        hist_csv += "\n";
    }
    std::string corr = "run";
    for (long r = 0; r < runs; ++r) corr += ",run" + std::to_string(r);
    corr += "\n";
    for (long a = 0; a < runs; ++a) {
        corr += "run" + std::to_string(a);
        for (long b = 0; b < runs; ++b) corr += "," + fmt(mask_correlation(masks[a], masks[b], w));
        corr += "\n";
    }
    art.table("runs.csv", runs_csv, "per-run separation and triviality");
    art.table("phase_difference_histograms.csv", hist_csv, "optimized minus identity histograms");
    art.table("mask_correlation.csv", corr, "pairwise mask correlation");
}

void exp_diff(const ScenarioConfig &c, Artifacts &art) {
    DeskParams p = desk_params(c);
    const Grid g = make_grid(p.n, 1.0, Boundary::circular);
    const ObjectImage obj = object_from(c, p.n);
    SPDCParams sp = p.spdc;
    sp.sigma_k = 0.0;
    const TwoPhotonPure psi = difference_encoded_state(obj, sp, g);
    const ScatteringMatrix s = pcp_solution(random_odd_phase_symbol(g, mix_seed(c.seed, 401)));
    const TwoPhotonPure out = two_photon(s, psi);
    const CorrelationImage gm_in = gamma_minus(psi);
    const CorrelationImage gm = gamma_minus(out);
    const CorrelationImage gp = gamma_plus(out);
    art.image("gamma_minus_input", gm_in.centered(), "difference-coordinate image at the input");
    art.image("gamma_minus_output", gm.centered(), "difference-coordinate image after the circulant");
    art.image("gamma_plus_output", gp.centered(), "sum-coordinate image after the circulant");
    Metrics met;
    const double scale = gm_in.values.maxCoeff();
    met.put("gamma_minus_max_rel_error", (gm.values - gm_in.values).cwiseAbs().maxCoeff() / scale);
    met.put("fidelity_minus", fidelity_ncc(gm, intensity_image(obj)));
    met.put("fidelity_plus", fidelity_ncc(gp, intensity_image(obj)));
    art.table("metrics.csv", met.text(), "restoration metrics");
}

}  // namespace

RunSummary run_scenario(const ScenarioConfig &cfg, const std::string &out_dir) {
    Artifacts art = make_artifacts(cfg, out_dir);
    const std::string &e = cfg.experiment;
    if (e == "fig2") {
        exp_fig2(cfg, art);
    } else if (e == "fig3-opt") {
        exp_fig3(cfg, art);
    } else if (e == "fig4-media") {
        exp_fig4(cfg, art);
    } else if (e == "sm2-events") {
        exp_events(cfg, art);
    } else if (e == "sm5-tm") {
        exp_tm(cfg, art);
    } else if (e == "sm9-sigma") {
        exp_sigma(cfg, art);
    } else if (e == "sm11-classical") {
        exp_classical(cfg, art);
    } else if (e == "sm12-macropixels") {
        exp_macropixels(cfg, art);
    } else if (e == "sm13-multiplicity") {
        exp_multiplicity(cfg, art);
    } else if (e == "sm14-diff-encoding") {
        exp_diff(cfg, art);
    } else {
        fail_config(cfg.origin + ": unknown experiment '" + e + "'");
    }
    return art.finish(cfg);
}

}  // namespace biphoton
