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


// Exercises the shared library through its C header only.

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "biphoton/biphoton.h"

namespace fs = std::filesystem;

TEST_CASE("version and presets") {
    CHECK(std::string(bp_version()) == "0.1.0");
    REQUIRE(bp_preset_count() == 10);
    CHECK(std::string(bp_preset_name(0)) == "fig2");
    CHECK(bp_preset_name(bp_preset_count()) == nullptr);
    CHECK(bp_preset_description(99) == nullptr);
}

TEST_CASE("null arguments and bad sizes report errors") {
    bp_matrix *m = nullptr;
    CHECK(bp_matrix_identity(4, nullptr) == BP_ERR_INVALID);
    CHECK(std::string(bp_last_error()).find("out") != std::string::npos);
    CHECK(bp_matrix_identity(1, &m) == BP_ERR_INVALID);
    CHECK(m == nullptr);
    CHECK(bp_matrix_identity(4, &m) == BP_OK);
    CHECK(std::string(bp_last_error()).empty());
    CHECK(bp_matrix_side(m) == 4);
    CHECK(bp_matrix_side(nullptr) == 0);
    bp_matrix_free(m);
    bp_matrix_free(nullptr);
}

TEST_CASE("config errors map to BP_ERR_CONFIG") {
    bp_scenario *sc = nullptr;
    CHECK(bp_scenario_parse("experiment = fig2\n[grid]\nwidth = 3\n", "inline", &sc) == BP_ERR_CONFIG);
    CHECK(std::string(bp_last_error()).find("inline:3") == 0);
    CHECK(bp_scenario_preset("nope", &sc) == BP_ERR_CONFIG);
    CHECK(bp_scenario_load("/nonexistent/cfg.txt", &sc) != BP_OK);

    REQUIRE(bp_scenario_preset("sm14-diff-encoding", &sc) == BP_OK);
    CHECK(std::string(bp_scenario_experiment(sc)) == "sm14-diff-encoding");
    CHECK(bp_scenario_set(sc, "grid", "n", "abc") == BP_ERR_CONFIG);
    CHECK(bp_scenario_set(sc, "grid", "n", "12") == BP_OK);
    CHECK(std::string(bp_scenario_dump(sc)).find("n = 12") != std::string::npos);
    bp_scenario_free(sc);
}

TEST_CASE("scenario run lists its files") {
    bp_scenario *sc = nullptr;
    REQUIRE(bp_scenario_preset("sm14-diff-encoding", &sc) == BP_OK);
    REQUIRE(bp_scenario_set(sc, "grid", "n", "16") == BP_OK);
    REQUIRE(bp_scenario_set_seed(sc, 7) == BP_OK);
    const fs::path dir = fs::temp_directory_path() / "biphoton_test_c_api";
    fs::remove_all(dir);
    bp_run *run = nullptr;
    REQUIRE(bp_scenario_run(sc, dir.string().c_str(), &run) == BP_OK);
    REQUIRE(bp_run_file_count(run) > 2);
    for (size_t k = 0; k < bp_run_file_count(run); ++k) CHECK(fs::exists(dir / bp_run_file(run, k)));
    CHECK(bp_run_file(run, bp_run_file_count(run)) == nullptr);
    bp_run_free(run);
    bp_scenario_free(sc);
}

TEST_CASE("sign solution restores a sum-encoded object") {
    const int side = 5, n = 8;
    std::vector<double> obj(side * side, 0.0);
    for (int k : {6, 7, 8, 11, 13, 16, 17, 18}) obj[k] = 1.0;

    bp_state *psi = nullptr;
    REQUIRE(bp_state_sum_encoded(obj.data(), side, n, &psi) == BP_OK);
    CHECK(bp_state_side(psi) == n);
    bp_matrix *s = nullptr, *s2 = nullptr;
    REQUIRE(bp_matrix_sign_solution(n, 3, &s) == BP_OK);
    std::vector<double> dense(2 * n * n * n * n);
    unsigned state = 12345;
    for (double &x : dense) x = ((state = state * 1103515245u + 12345u) >> 8) / double(1u << 24) - 0.5;
    REQUIRE(bp_matrix_from_data(n, dense.data(), &s2) == BP_OK);

    bp_state *out = nullptr, *scrambled = nullptr;
    REQUIRE(bp_state_propagate(s, psi, &out) == BP_OK);
    REQUIRE(bp_state_propagate(s2, psi, &scrambled) == BP_OK);

    std::vector<double> in_img(n * n), out_img(n * n), bad_img(n * n);
    REQUIRE(bp_state_gamma_plus(psi, in_img.data(), in_img.size()) == BP_OK);
    REQUIRE(bp_state_gamma_plus(out, out_img.data(), out_img.size()) == BP_OK);
    REQUIRE(bp_state_gamma_plus(scrambled, bad_img.data(), bad_img.size()) == BP_OK);
    double restored = 0, lost = 0;
    REQUIRE(bp_ncc(in_img.data(), out_img.data(), n, &restored) == BP_OK);
    REQUIRE(bp_ncc(in_img.data(), bad_img.data(), n, &lost) == BP_OK);
    CHECK(restored > 1 - 1e-10);
    CHECK(lost < 0.5);
    CHECK(bp_state_gamma_plus(out, out_img.data(), 10) == BP_ERR_INVALID);

    bp_state_free(psi);
    bp_state_free(out);
    bp_state_free(scrambled);
    bp_matrix_free(s);
    bp_matrix_free(s2);
}

TEST_CASE("thin medium handle") {
    bp_matrix *m = nullptr;
    CHECK(bp_matrix_thin_medium(8, 2.0, 3, &m) == BP_OK);
    CHECK(bp_matrix_side(m) == 8);
    bp_matrix_free(m);
    CHECK(bp_matrix_thin_medium(8, -1.0, 3, &m) == BP_ERR_INVALID);
}

TEST_CASE("matrix data, product and file round trip") {
    const int n = 2, d = 4;
    std::vector<double> data(2 * d * d, 0.0);
    for (int r = 0; r < d; ++r) data[2 * (r * d + (d - 1 - r)) + 1] = 1.0;  // i times an anti-diagonal
    bp_matrix *a = nullptr, *p = nullptr, *loaded = nullptr;
    REQUIRE(bp_matrix_from_data(n, data.data(), &a) == BP_OK);
    REQUIRE(bp_matrix_product(a, a, &p) == BP_OK);

    const fs::path file = fs::temp_directory_path() / "biphoton_c_api_matrix.biph";
    REQUIRE(bp_matrix_save(p, file.string().c_str(), "square") == BP_OK);
    REQUIRE(bp_matrix_load(file.string().c_str(), n, &loaded) == BP_OK);
    CHECK(bp_matrix_load(file.string().c_str(), 3, &loaded) == BP_ERR_INVALID);

    // (iJ)^2 = -I, so a unit object comes out unchanged in Gamma+.
    std::vector<double> obj(1, 1.0);
    bp_state *psi = nullptr, *out = nullptr;
    REQUIRE(bp_state_sum_encoded(obj.data(), 1, n, &psi) == BP_OK);
    REQUIRE(bp_state_propagate(loaded, psi, &out) == BP_OK);
    std::vector<double> g_in(d), g_out(d);
    bp_state_gamma_plus(psi, g_in.data(), d);
    bp_state_gamma_plus(out, g_out.data(), d);
    for (int k = 0; k < d; ++k) CHECK(g_out[k] == doctest::Approx(g_in[k]).epsilon(1e-12));

    data[1] = NAN;
    bp_matrix *bad = nullptr;
    CHECK(bp_matrix_from_data(n, data.data(), &bad) == BP_ERR_NUMERIC);

    bp_state_free(psi);
    bp_state_free(out);
    bp_matrix_free(a);
    bp_matrix_free(p);
    bp_matrix_free(loaded);
}

TEST_CASE("double cosine fit") {
    std::vector<double> th, v;
    for (int k = 0; k < 7; ++k) {
        th.push_back(2 * M_PI * k / 7);
        v.push_back(3 * std::cos(th.back() + 1.0) + 0.5 * std::cos(2 * th.back()) + 4);
    }
    double out[7];
    REQUIRE(bp_fit_double_cosine(th.data(), v.data(), th.size(), out) == BP_OK);
    CHECK(out[0] == doctest::Approx(3.0));
    CHECK(out[1] == doctest::Approx(1.0));
    CHECK(out[2] == doctest::Approx(0.5));
    CHECK(out[4] == doctest::Approx(4.0));
    CHECK(out[6] < 1e-12);
    CHECK(bp_fit_double_cosine(th.data(), v.data(), 3, out) == BP_ERR_INVALID);
}
