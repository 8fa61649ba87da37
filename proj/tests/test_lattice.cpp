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


#include <doctest.h>

#include "biphoton/lattice.hpp"
#include "biphoton/states.hpp"
#include "oracles.hpp"

using namespace biphoton;

TEST_CASE("make_grid dimensions and validation") {
    CHECK(make_grid(51, 19.6e-6, Boundary::linear).d() == 2601);
    CHECK(make_grid(2, 1.0, Boundary::circular).d() == 4);
    CHECK(make_grid(16, 1.0, Boundary::circular).d() == 256);
    CHECK_THROWS_AS(make_grid(1, 1.0, Boundary::circular), Error);
    CHECK_THROWS_AS(make_grid(8, 0.0, Boundary::circular), Error);
    CHECK_THROWS_AS(make_grid(8, -1.0, Boundary::linear), Error);
}

TEST_CASE("row-major flattening and centered offsets") {
    const Grid g = make_grid(5, 1.0, Boundary::circular);
    CHECK(g.index(3, 1) == 8);
    CHECK(g.x_of(8) == 3);
    CHECK(g.y_of(8) == 1);
    CHECK(g.offset(2) == 0);
    CHECK(g.offset(4) == 2);
    CHECK(g.offset(0) == -2);
    CHECK(wrap_offset(3, 4) == -1);
    CHECK(wrap_offset(-2, 4) == -2);
    CHECK(wrap_offset(2, 4) == -2);
}

TEST_CASE("dft2 of a delta at the origin is flat with modulus 1/n") {
    const Grid g = make_grid(8, 1.0, Boundary::circular);
    ComplexField f = zero_field(g);
    f.values[0] = 1.0;
    const ComplexField out = dft2(f, Direction::forward);
    for (Eigen::Index k = 0; k < out.values.size(); ++k) CHECK(std::abs(out.values[k]) == doctest::Approx(1.0 / 8).epsilon(1e-14));
}

TEST_CASE("dft2 round trip and Parseval") {
    for (int n : {2, 5, 8, 16}) {
        const Grid g = make_grid(n, 1.0, Boundary::circular);
        const ComplexField f{g, oracle::random_cvector(g.d(), 100 + n)};
        const ComplexField fw = dft2(f, Direction::forward);
        const ComplexField back = dft2(fw, Direction::inverse);
        CHECK((back.values - f.values).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(std::abs(fw.values.norm() - f.values.norm()) <= 1e-12 * f.values.norm());
    }
}

TEST_CASE("dft2 matches the quadratic-sum DFT") {
    for (int n : {3, 4, 8}) {
        const Grid g = make_grid(n, 1.0, Boundary::circular);
        const CVector x = oracle::random_cvector(g.d(), 7 * n);
        const ComplexField f{g, x};
        CHECK((dft2(f, Direction::forward).values - oracle::dft2(x, n, true)).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((dft2(f, Direction::inverse).values - oracle::dft2(x, n, false)).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((centered_dft2(x, n, Direction::forward) - oracle::centered_dft2(x, n, true)).cwiseAbs().maxCoeff() <=
              1e-12);
    }
}

TEST_CASE("dft2 rejects linear grids") {
    const Grid g = make_grid(4, 1.0, Boundary::linear);
    CHECK_THROWS_AS(dft2(zero_field(g), Direction::forward), Error);
}

TEST_CASE("centered DFT applied twice is the coordinate inversion") {
    for (int n : {4, 5}) {
        const CVector x = oracle::random_cvector(n * n, 3);
        const CVector twice = centered_dft2(centered_dft2(x, n, Direction::forward), n, Direction::forward);
        const int h = n / 2;
        double err = 0.0;
        for (int y = 0; y < n; ++y)
            for (int xx = 0; xx < n; ++xx) {
                const int px = oracle::pmod(2 * h - xx, n), py = oracle::pmod(2 * h - y, n);
                err = std::max(err, std::abs(twice[py * n + px] - x[y * n + xx]));
            }
        CHECK(err <= 1e-12);
    }
}

TEST_CASE("sum coordinate map index arithmetic") {
    const Grid c = make_grid(4, 1.0, Boundary::circular);
    const Grid l = make_grid(4, 1.0, Boundary::linear);
    const SumCoordinateMap cs = sum_coordinate_map(c, MapMode::circular, MapSign::sum);
    const SumCoordinateMap ls = sum_coordinate_map(l, MapMode::linear, MapSign::sum);
    const SumCoordinateMap cd = sum_coordinate_map(c, MapMode::circular, MapSign::difference);
    CHECK(cs.axis_bin(3, 2) == 1);
    CHECK(ls.axis_bin(3, 2) == 5);
    CHECK(ls.side() == 7);
    CHECK(cd.axis_bin(1, 3) == 2);
    CHECK(cs.side() == 4);
    CHECK_THROWS_AS(sum_coordinate_map(l, MapMode::circular, MapSign::sum), Error);
}

TEST_CASE("circular maps are bijections in j for every i and bin") {
    for (int n : {4, 5}) {
        const Grid g = make_grid(n, 1.0, Boundary::circular);
        for (MapSign sign : {MapSign::sum, MapSign::difference}) {
            const SumCoordinateMap m = sum_coordinate_map(g, MapMode::circular, sign);
            for (int i = 0; i < g.d(); ++i) {
                std::vector<int> hits(m.bins(), 0);
                for (int j = 0; j < g.d(); ++j) ++hits[m.bin(i, j)];
                for (int b = 0; b < m.bins(); ++b) REQUIRE(hits[b] == 1);
            }
        }
    }
}

TEST_CASE("linear maps cover every bin") {
    const Grid g = make_grid(4, 1.0, Boundary::linear);
    for (MapSign sign : {MapSign::sum, MapSign::difference}) {
        const SumCoordinateMap m = sum_coordinate_map(g, MapMode::linear, sign);
        std::vector<int> hits(m.bins(), 0);
        for (int i = 0; i < g.d(); ++i)
            for (int j = 0; j < g.d(); ++j) ++hits[m.bin(i, j)];
        for (int b = 0; b < m.bins(); ++b) CHECK(hits[b] > 0);
        CHECK(m.origin() == 3 * 7 + 3);
    }
}

TEST_CASE("normalize fields and states") {
    const Grid g = make_grid(2, 1.0, Boundary::circular);
    ComplexField f = zero_field(g);
    f.values[0] = 3.0;
    f.values[1] = 4.0;
    const ComplexField u = normalize(f);
    CHECK(u.values[0].real() == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(u.values[1].real() == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(std::abs(u.values[2]) == 0.0);
    CHECK((normalize(u).values - u.values).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK_THROWS_AS(normalize(zero_field(g)), Error);

    const Grid g16 = make_grid(16, 1.0, Boundary::circular);
    const TwoPhotonPure st = normalize(TwoPhotonPure{g16, oracle::random_cmatrix(256, 256, 5), 1.0});
    CHECK(std::abs(st.psi.norm() - 1.0) <= 1e-12);
}

TEST_CASE("flatten and unflatten round trip exactly") {
    const RMatrix img = oracle::random_rmatrix(7, 7, 11, -3.0, 3.0);
    const RMatrix back = unflatten(flatten(img), 7);
    CHECK(back == img);
    CHECK(flatten(img)[1 * 7 + 2] == img(1, 2));
}
