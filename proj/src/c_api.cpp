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

#include "biphoton/biphoton.h"

#include <new>
#include <string>
#include <vector>

#include "biphoton/io.hpp"
#include "biphoton/scenario.hpp"
#include "biphoton/system.hpp"

struct bp_scenario {
    biphoton::ScenarioConfig cfg;
    std::string dump;
};

struct bp_run {
    biphoton::RunSummary summary;
};

struct bp_matrix {
    biphoton::ScatteringMatrix s;
};

struct bp_state {
    biphoton::TwoPhotonPure psi;
};

namespace {

using namespace biphoton;

thread_local std::string g_last_error;

bp_status fail_status(bp_status code, const char *what) {
    g_last_error = what;
    return code;
}

bp_status status_of(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument:
            return BP_ERR_INVALID;
        case ErrorKind::config:
            return BP_ERR_CONFIG;
        case ErrorKind::numeric:
            return BP_ERR_NUMERIC;
        case ErrorKind::io:
            return BP_ERR_IO;
    }
    return BP_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
bp_status guarded(F &&body) {
    try {
        body();
        g_last_error.clear();
        return BP_OK;
    } catch (const Error &e) {
        return fail_status(status_of(e.kind()), e.what());
    } catch (const std::bad_alloc &) {
        return fail_status(BP_ERR_INTERNAL, "out of memory");
    } catch (const std::exception &e) {
        return fail_status(BP_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail_status(BP_ERR_INTERNAL, "unknown error");
    }
}

void need(const void *p, const char *what) {
    if (!p) fail(std::string(what) + " must not be NULL");
}

Grid unit_grid(int n) {
    if (n < 2 || n > 128) fail("grid side must lie in [2, 128]");
    return make_grid(n, 1.0, Boundary::circular);
}

}  // namespace

extern "C" {

const char *bp_version(void) { return "0.1.0"; }

const char *bp_last_error(void) { return g_last_error.c_str(); }

size_t bp_preset_count(void) { return list_presets().size(); }

const char *bp_preset_name(size_t index) {
    const auto &p = list_presets();
    return index < p.size() ? p[index].name.c_str() : nullptr;
}

const char *bp_preset_description(size_t index) {
    const auto &p = list_presets();
    return index < p.size() ? p[index].description.c_str() : nullptr;
}

bp_status bp_scenario_load(const char *path, bp_scenario **out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new bp_scenario{load_config(path), {}};
    });
}

bp_status bp_scenario_parse(const char *text, const char *origin, bp_scenario **out) {
    return guarded([&] {
        need(text, "text");
        need(out, "out");
        *out = new bp_scenario{parse_config(text, origin ? origin : "<text>"), {}};
    });
}

bp_status bp_scenario_preset(const char *name, bp_scenario **out) {
    return guarded([&] {
        need(name, "name");
        need(out, "out");
        *out = new bp_scenario{preset_config(name), {}};
    });
}

bp_status bp_scenario_set_seed(bp_scenario *sc, uint64_t seed) {
    return guarded([&] {
        need(sc, "scenario");
        sc->cfg.seed = seed;
    });
}

bp_status bp_scenario_set_full(bp_scenario *sc, int full) {
    return guarded([&] {
        need(sc, "scenario");
        sc->cfg.full = full != 0;
    });
}

bp_status bp_scenario_set(bp_scenario *sc, const char *section, const char *key, const char *value) {
    return guarded([&] {
        need(sc, "scenario");
        need(section, "section");
        need(key, "key");
        need(value, "value");
        sc->cfg.set(section, key, value);
    });
}

const char *bp_scenario_experiment(const bp_scenario *sc) { return sc ? sc->cfg.experiment.c_str() : nullptr; }

const char *bp_scenario_dump(bp_scenario *sc) {
    if (!sc) return nullptr;
    sc->dump = sc->cfg.dump();
    return sc->dump.c_str();
}

bp_status bp_scenario_run(const bp_scenario *sc, const char *out_dir, bp_run **out) {
    return guarded([&] {
        need(sc, "scenario");
        need(out_dir, "out_dir");
        RunSummary s = run_scenario(sc->cfg, out_dir);
        if (out) *out = new bp_run{std::move(s)};
    });
}

void bp_scenario_free(bp_scenario *sc) { delete sc; }

const char *bp_run_dir(const bp_run *run) { return run ? run->summary.out_dir.c_str() : nullptr; }

size_t bp_run_file_count(const bp_run *run) { return run ? run->summary.files.size() : 0; }

const char *bp_run_file(const bp_run *run, size_t index) {
    if (!run || index >= run->summary.files.size()) return nullptr;
    return run->summary.files[index].c_str();
}

void bp_run_free(bp_run *run) { delete run; }

bp_status bp_matrix_identity(int n, bp_matrix **out) {
    return guarded([&] {
        need(out, "out");
        *out = new bp_matrix{identity_matrix(unit_grid(n))};
    });
}

bp_status bp_matrix_sign_solution(int n, uint64_t seed, bp_matrix **out) {
    return guarded([&] {
        need(out, "out");
        *out = new bp_matrix{sign_solution(random_sign_field(unit_grid(n), seed))};
    });
}

bp_status bp_matrix_thin_medium(int n, double corr_len_px, uint64_t seed, bp_matrix **out) {
    return guarded([&] {
        need(out, "out");
        SpeckleSpec spec;
        spec.corr_len = corr_len_px;
        spec.seed = seed;
        *out = new bp_matrix{thin_medium(unit_grid(n), spec)};
    });
}

bp_status bp_matrix_from_data(int n, const double *re_im, bp_matrix **out) {
    return guarded([&] {
        need(re_im, "data");
        need(out, "out");
        const Grid g = unit_grid(n);
        const int d = g.d();
        CMatrix m(d, d);
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                const size_t k = 2 * (static_cast<size_t>(r) * d + c);
                m(r, c) = cplx(re_im[k], re_im[k + 1]);
            }
        if (!m.allFinite()) fail_numeric("matrix data contains non-finite values");
        *out = new bp_matrix{ScatteringMatrix{g, g, std::move(m), "user"}};
    });
}

bp_status bp_matrix_load(const char *path, int n, bp_matrix **out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        const Grid g = unit_grid(n);
        const Biph1Matrix b = read_biph1(path);
        if (b.m.rows() != g.d() || b.m.cols() != g.d()) {
            fail("matrix in " + std::string(path) + " does not match an " + std::to_string(n) + "x" +
                 std::to_string(n) + " grid");
        }
        *out = new bp_matrix{ScatteringMatrix{g, g, b.m, b.tag}};
    });
}

bp_status bp_matrix_save(const bp_matrix *m, const char *path, const char *tag) {
    return guarded([&] {
        need(m, "matrix");
        need(path, "path");
        write_biph1(m->s.m, path, tag ? tag : m->s.tag);
    });
}

bp_status bp_matrix_product(const bp_matrix *a, const bp_matrix *b, bp_matrix **out) {
    return guarded([&] {
        need(a, "a");
        need(b, "b");
        need(out, "out");
        const std::vector<const ScatteringMatrix *> stages = {&a->s, &b->s};
        *out = new bp_matrix{compose(stages)};
    });
}

int bp_matrix_side(const bp_matrix *m) { return m ? m->s.grid_out.n : 0; }

void bp_matrix_free(bp_matrix *m) { delete m; }

bp_status bp_state_sum_encoded(const double *object, int side, int n, bp_state **out) {
    return guarded([&] {
        need(object, "object");
        need(out, "out");
        if (side < 1) fail("object side must be positive");
        const ObjectImage obj = make_object(side, std::vector<double>(object, object + static_cast<size_t>(side) * side));
        SPDCParams p = SPDCParams::defaults();
        p.sigma_r = 0.0;
        *out = new bp_state{input_plane_state(obj, p, OpticalConfig::defaults(), unit_grid(n), 1.0)};
    });
}

bp_status bp_state_propagate(const bp_matrix *s, const bp_state *in, bp_state **out) {
    return guarded([&] {
        need(s, "matrix");
        need(in, "state");
        need(out, "out");
        *out = new bp_state{two_photon(s->s, in->psi)};
    });
}

int bp_state_side(const bp_state *st) { return st ? st->psi.grid.n : 0; }

namespace {

bp_status copy_image(const bp_state *st, double *out, size_t count, bool plus) {
    return guarded([&] {
        need(st, "state");
        need(out, "out");
        const RMatrix img = (plus ? gamma_plus(st->psi) : gamma_minus(st->psi)).centered();
        const size_t need_count = static_cast<size_t>(img.rows()) * img.cols();
        if (count < need_count) fail("output buffer holds " + std::to_string(count) + " values, need " +
                                     std::to_string(need_count));
        for (Eigen::Index y = 0; y < img.rows(); ++y)
            for (Eigen::Index x = 0; x < img.cols(); ++x) out[y * img.cols() + x] = img(y, x);
    });
}

}  // namespace

bp_status bp_state_gamma_plus(const bp_state *st, double *out, size_t count) {
    return copy_image(st, out, count, true);
}

bp_status bp_state_gamma_minus(const bp_state *st, double *out, size_t count) {
    return copy_image(st, out, count, false);
}

void bp_state_free(bp_state *st) { delete st; }

bp_status bp_fit_double_cosine(const double *theta, const double *values, size_t count, double out[7]) {
    return guarded([&] {
        need(theta, "theta");
        need(values, "values");
        need(out, "out");
        const DoubleCosineFit f =
            fit_double_cosine(std::vector<double>(theta, theta + count), std::vector<double>(values, values + count));
        const double v[7] = {f.a, f.theta_a, f.b, f.theta_b, f.c, f.theta_opt, f.rms_residual};
        std::copy(v, v + 7, out);
    });
}

bp_status bp_ncc(const double *a, const double *b, int side, double *out) {
    return guarded([&] {
        need(a, "a");
        need(b, "b");
        need(out, "out");
        if (side < 1) fail("side must be positive");
        const auto ma = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(a, side, side);
        const auto mb = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(b, side, side);
        *out = ncc(RMatrix(ma), RMatrix(mb));
    });
}

}  // extern "C"
