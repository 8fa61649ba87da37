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

#include "biphoton/media.hpp"
#include <Eigen/SVD>
#include <set>

#include "oracles.hpp"

using namespace biphoton;

namespace {

Grid circ(int n) { return make_grid(n, 1.0, Boundary::circular); }

// Column energy centroid relative to the column's own pixel, minimum image.
std::pair<double, double> centroid_offset(const RMatrix &energy, const Grid &g, int c) {
    double ex = 0.0, ey = 0.0, e = 0.0;
    for (int r = 0; r < g.d(); ++r) {
        const double w = energy(r, c);
        ex += w * g.diff_offset(g.x_of(r), g.x_of(c));
        ey += w * g.diff_offset(g.y_of(r), g.y_of(c));
        e += w;
    }
    return {ex / e, ey / e};
}

// Eigenvalue of a circulant matrix on the plane wave exp(+2 pi i q.r / n).
cplx plane_wave_eigenvalue(const CMatrix &m, const Grid &g, int qx, int qy) {
    CVector v(g.d());
    for (int r = 0; r < g.d(); ++r) v[r] = std::polar(1.0, 2.0 * M_PI * (qx * g.x_of(r) + qy * g.y_of(r)) / g.n);
    const CVector w = m * v;
    const cplx lambda = w[0] / v[0];
    CHECK((w - lambda * v).norm() <= 1e-10);
    return lambda;
}

double unitarity_error(const CMatrix &m) {
    return (m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("speckle is deterministic with unit mean intensity") {
    const Grid g = circ(51);
    SpeckleSpec spec;
    spec.seed = 42;
    const ComplexField a = speckle_field(g, spec), b = speckle_field(g, spec);
    CHECK(a.values == b.values);
    spec.seed = 43;
    CHECK((speckle_field(g, spec).values - a.values).norm() > 1.0);
    CHECK(a.values.squaredNorm() / g.d() == doctest::Approx(1.0).epsilon(1e-12));

    spec.corr_len = 25.5;
    CHECK_THROWS_AS(speckle_field(g, spec), Error);
    spec.corr_len = 0.5;
    CHECK_THROWS_AS(speckle_field(g, spec), Error);
    CHECK_THROWS_AS(speckle_field(make_grid(8, 1.0, Boundary::linear), SpeckleSpec{}), Error);
}

TEST_CASE("speckle intensity autocorrelation FWHM tracks the correlation length") {
    const int n = 64;
    const Grid g = circ(n);
    for (double ls : {3.0, 5.0}) {
        std::vector<double> cov(12, 0.0);
        double mean = 0.0, count = 0.0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            SpeckleSpec spec;
            spec.corr_len = ls;
            spec.seed = seed;
            const ComplexField f = speckle_field(g, spec);
            for (int r = 0; r < g.d(); ++r) {
                const double i0 = std::norm(f.values[r]);
                mean += i0;
                count += 1.0;
                for (int lag = 0; lag < 12; ++lag) {
                    const int rx = (g.x_of(r) + lag) % n, ry = (g.y_of(r) + lag) % n;
                    cov[lag] += 0.5 * i0 * (std::norm(f.values[g.index(rx, g.y_of(r))]) +
                                            std::norm(f.values[g.index(g.x_of(r), ry)]));
                }
            }
        }
        mean /= count;
        std::vector<double> c(12);
        for (int lag = 0; lag < 12; ++lag) c[lag] = cov[lag] / count - mean * mean;
        double half = 0.0;
        for (int lag = 1; lag < 12; ++lag) {
            if (c[lag] <= 0.5 * c[0]) {
                const double t = (c[lag - 1] - 0.5 * c[0]) / (c[lag - 1] - c[lag]);
                half = lag - 1 + t;
                break;
            }
        }
        CHECK(2.0 * half == doctest::Approx(ls).epsilon(1.0 / ls));
    }
}

TEST_CASE("thin medium is diagonal and the unit field gives the identity") {
    const Grid g = circ(12);
    SpeckleSpec spec;
    spec.seed = 5;
    const ScatteringMatrix s = thin_medium(g, spec);
    CHECK(s.rows() == 144);
    for (int c = 0; c < g.d(); ++c) {
        CHECK((s.m.col(c).array() != cplx(0.0)).count() == 1);
        CHECK(s.m(c, c) != cplx(0.0));
    }
    spec.unit_field = true;
    CHECK(thin_medium(g, spec).m == CMatrix::Identity(g.d(), g.d()));
}

TEST_CASE("thick medium columns are unit, centered and deterministic") {
    const Grid g = circ(32);
    SpeckleSpec spec;
    spec.corr_len = 3.0;
    spec.envelope_sigma = 8.0;
    RMatrix energy = RMatrix::Zero(g.d(), g.d());
    double mean_dev = 0.0;
    const int seeds = 16;
    for (int k = 0; k < seeds; ++k) {
        spec.seed = 1000 + k;
        const ScatteringMatrix s = thick_medium(g, spec);
        CHECK((s.m.colwise().norm().array() - 1.0).abs().maxCoeff() <= 1e-12);
        energy += s.m.cwiseAbs2();
        for (int c = 0; c < g.d(); ++c) {
            const auto [ox, oy] = centroid_offset(s.m.cwiseAbs2(), g, c);
            mean_dev += std::hypot(ox, oy);
        }
    }
    // A single realization scatters its centroid by the speckle grain; the
    // ensemble-averaged column energy must sit on the input pixel.
    CHECK(mean_dev / (seeds * g.d()) <= 1.0);
    double worst = 0.0;
    for (int c = 0; c < g.d(); ++c) {
        const auto [ox, oy] = centroid_offset(energy, g, c);
        worst = std::max(worst, std::hypot(ox, oy));
    }
    CHECK(worst <= 1.0);

    spec.seed = 77;
    CHECK(thick_medium(g, spec).m == thick_medium(g, spec).m);
    SpeckleSpec unset;
    CHECK_THROWS_AS(thick_medium(g, unset), Error);
}

TEST_CASE("narrow envelope reduces the thick medium to a diagonal") {
    const Grid g = circ(16);
    SpeckleSpec spec;
    spec.envelope_sigma = 0.2;
    spec.seed = 3;
    const ScatteringMatrix s = thick_medium(g, spec);
    for (int c = 0; c < g.d(); ++c) CHECK(std::abs(s.m(c, c)) >= 1.0 - 1e-8);
    const TrivialityVerdict v = is_trivial(s, 1e-8);
    CHECK(v.trivial);
    CHECK(v.alpha == doctest::Approx(-1.0));
}

TEST_CASE("sign solution of a positive field is the identity") {
    const Grid g = circ(8);
    ComplexField pos{g, CVector::Constant(g.d(), 0.7)};
    CHECK((sign_solution(pos).m - CMatrix::Identity(g.d(), g.d())).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(is_trivial(sign_solution(pos), 1e-9).trivial);
}

TEST_CASE("sign solution is a unitary circulant with a +-1 symbol") {
    const Grid g = circ(32);
    const ComplexField gf = random_sign_field(g, 11);
    const ScatteringMatrix s = sign_solution(gf);
    CHECK(unitarity_error(s.m) <= 1e-10);
    CHECK((s.m * s.m - CMatrix::Identity(g.d(), g.d())).cwiseAbs().maxCoeff() <= 1e-10);

    const Grid small = circ(8);
    const ComplexField gs = random_sign_field(small, 12);
    const ScatteringMatrix ss = sign_solution(gs);
    int plus = 0, minus = 0;
    for (int qy = 0; qy < 8; ++qy)
        for (int qx = 0; qx < 8; ++qx) {
            const cplx lambda = plane_wave_eigenvalue(ss.m, small, qx, qy);
            const double expect = gs.values[small.index(qx, qy)].real() > 0.0 ? 1.0 : -1.0;
            CHECK(std::abs(lambda - expect) <= 1e-12);
            CHECK(std::abs(lambda * lambda - 1.0) <= 1e-12);
            (expect > 0 ? plus : minus)++;
        }
    CHECK(plus > 0);
    CHECK(minus > 0);
    CHECK_FALSE(is_trivial(ss, 0.05).trivial);
    CHECK_FALSE(is_trivial(s, 0.05).trivial);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) CHECK_FALSE(is_trivial(sign_solution(random_sign_field(small, seed)), 0.05).trivial);
}

TEST_CASE("sign solution rejects zeros and complex input") {
    const Grid g = circ(4);
    ComplexField z{g, CVector::Ones(g.d())};
    z.values[5] = 0.0;
    CHECK_THROWS_AS(sign_solution(z), Error);
    z.values[5] = cplx(1.0, 0.5);
    CHECK_THROWS_AS(sign_solution(z), Error);
}

TEST_CASE("checkerboard sign pattern shifts by half the grid") {
    const int n = 8;
    const Grid g = circ(n);
    ComplexField cb = zero_field(g);
    for (int k = 0; k < g.d(); ++k) cb.values[k] = (g.x_of(k) + g.y_of(k)) % 2 == 0 ? 1.0 : -1.0;
    const ScatteringMatrix s = sign_solution(cb);
    for (int r = 0; r < g.d(); ++r) {
        const int target = g.index((g.x_of(r) + n / 2) % n, (g.y_of(r) + n / 2) % n);
        for (int rp = 0; rp < g.d(); ++rp) CHECK(std::abs(s.m(rp, r) - (rp == target ? 1.0 : 0.0)) <= 1e-12);
    }
}

TEST_CASE("embedded sign solution on a linear grid") {
    const Grid lin = make_grid(6, 1.0, Boundary::linear);
    const ComplexField g = random_sign_field(circ(12), 4);
    const ScatteringMatrix s = sign_solution_embedded(g, lin);
    CHECK(s.rows() == 36);
    CHECK(s.grid_in.boundary == Boundary::linear);
    // Cropping a unitary operator can only shrink norms.
    const Eigen::JacobiSVD<CMatrix> svd(s.m);
    CHECK(svd.singularValues().maxCoeff() <= 1.0 + 1e-10);
    CHECK_THROWS_AS(sign_solution_embedded(random_sign_field(circ(10), 4), lin), Error);
}

TEST_CASE("pcp solutions") {
    const int n = 8;
    const Grid g = circ(n);
    CHECK((pcp_solution(ComplexField{g, CVector::Ones(g.d())}).m - CMatrix::Identity(g.d(), g.d())).cwiseAbs().maxCoeff() <=
          1e-14);

    const ComplexField odd = random_odd_phase_symbol(g, 8);
    const ScatteringMatrix s = pcp_solution(odd);
    CHECK(unitarity_error(s.m) <= 1e-10);
    CHECK_FALSE(is_trivial(s, 0.05).trivial);
    for (int qy = 0; qy < n; ++qy)
        for (int qx = 0; qx < n; ++qx) CHECK(std::abs(plane_wave_eigenvalue(s.m, g, qx, qy) - odd.values[g.index(qx, qy)]) <= 1e-12);

    const int ax = 3, ay = -2;
    ComplexField shift = zero_field(g);
    for (int k = 0; k < g.d(); ++k)
        shift.values[k] = std::polar(1.0, -2.0 * M_PI * (g.x_of(k) * ax + g.y_of(k) * ay) / n);
    const ScatteringMatrix t = pcp_solution(shift);
    for (int r = 0; r < g.d(); ++r) {
        const int target = g.index(oracle::pmod(g.x_of(r) + ax, n), oracle::pmod(g.y_of(r) + ay, n));
        CHECK(std::abs(t.m(target, r) - 1.0) <= 1e-12);
    }

    ComplexField bad{g, CVector::Ones(g.d())};
    bad.values[g.index(1, 2)] = 2.0;
    try {
        pcp_solution(bad);
        FAIL("constraint violation not reported");
    } catch (const Error &e) {
        CHECK(std::string(e.what()).find("k = (") != std::string::npos);
    }
}

TEST_CASE("SLM diagonal") {
    const Grid g = circ(8);
    const MacroLayout lay = macro_layout(8, 2, 2);
    CHECK(lay.offset() == 2);
    CHECK(slm_diagonal(zero_mask(lay), g).m == CMatrix::Identity(64, 64));
    const PhaseMask mask = make_mask(lay, {0.5, 1.0, -1.0, 7.0});
    CHECK(mask.phases[2] == doctest::Approx(2.0 * M_PI - 1.0));
    CHECK(mask.phases[3] == doctest::Approx(7.0 - 2.0 * M_PI));
    const CVector diag = slm_phases(mask, g);
    CHECK(std::abs(diag[g.index(2, 2)] - std::polar(1.0, 0.5)) <= 1e-15);
    CHECK(std::abs(diag[g.index(5, 3)] - std::polar(1.0, 1.0)) <= 1e-15);
    CHECK(std::abs(diag[g.index(3, 4)] - std::polar(1.0, -1.0)) <= 1e-15);
    CHECK(diag[g.index(0, 0)] == cplx(1.0));
    CHECK(diag[g.index(6, 6)] == cplx(1.0));

    std::vector<double> shifted = mask.phases;
    for (double &p : shifted) p += M_PI;
    const CVector neg = slm_phases(make_mask(lay, shifted), g);
    for (int m = 0; m < lay.count(); ++m)
        for (int p : lay.pixels[m]) CHECK(std::abs(neg[p] + diag[p]) <= 1e-14);

    const MacroLayout big = macro_layout(51, 32);
    CHECK(big.block == 1);
    std::vector<double> ph(big.count());
    for (int k = 0; k < big.count(); ++k) ph[k] = 2.0 * M_PI * k / big.count();
    const CVector d51 = slm_phases(make_mask(big, ph), circ(51));
    std::set<std::pair<double, double>> distinct;
    for (int k = 0; k < d51.size(); ++k)
        if (d51[k] != cplx(1.0) || k == big.pixels[0][0]) distinct.insert({d51[k].real(), d51[k].imag()});
    CHECK(distinct.size() == 1024);

    MacroLayout overlap = lay;
    overlap.pixels[1].push_back(lay.pixels[0][0]);
    CHECK_THROWS_AS(slm_phases(PhaseMask{overlap, std::vector<double>(4, 0.0)}, g), Error);
    CHECK_THROWS_AS(macro_layout(8, 3, 3), Error);
}

TEST_CASE("Fourier lens matches the DFT, is unitary and squares to parity") {
    const Grid g4 = make_grid(4, 10e-6, Boundary::circular);
    const ScatteringMatrix f4 = fourier_lens(g4, 0.15, 804e-9);
    CHECK(f4.grid_out.pitch == doctest::Approx(804e-9 * 0.15 / (4 * 10e-6)));
    for (int c = 0; c < 16; ++c) {
        CVector e = CVector::Zero(16);
        e[c] = 1.0;
        CHECK((f4.m.col(c) - oracle::centered_dft2(e, 4, true)).cwiseAbs().maxCoeff() <= 1e-12);
    }
    const Grid g = circ(9);
    const ScatteringMatrix f = fourier_lens(g, 1.0, 1.0);
    CHECK(unitarity_error(f.m) <= 1e-10);
    const CVector x = oracle::random_cvector(g.d(), 2);
    CHECK(std::abs((f.m * x).norm() - x.norm()) <= 1e-10);
    CHECK((f.m * f.m - parity_matrix(g).m).cwiseAbs().maxCoeff() <= 1e-10);
    const Grid g8 = circ(8);
    const ScatteringMatrix f8 = fourier_lens(g8, 1.0, 1.0);
    CHECK((f8.m * f8.m - parity_matrix(g8).m).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK_THROWS_AS(fourier_lens(g, 0.0, 1.0), Error);
    CHECK_THROWS_AS(fourier_lens(g, 1.0, -1.0), Error);
}

TEST_CASE("compose order, associativity and lens algebra") {
    const Grid g = circ(4);
    auto wrap = [&](const CMatrix &m) { return ScatteringMatrix{g, g, m, "x"}; };
    const ScatteringMatrix a = wrap(oracle::random_cmatrix(16, 16, 1)), b = wrap(oracle::random_cmatrix(16, 16, 2)),
                           c = wrap(oracle::random_cmatrix(16, 16, 3));
    const ScatteringMatrix abc = compose(std::vector<ScatteringMatrix>{a, b, c});
    CHECK(abc.tag == "composed");
    const CMatrix left = (a.m * b.m) * c.m, right = a.m * (b.m * c.m);
    CHECK((abc.m - left).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((left - right).cwiseAbs().maxCoeff() <= 1e-12);
    const ScatteringMatrix ab = compose(std::vector<ScatteringMatrix>{a, b});
    CHECK((compose(std::vector<ScatteringMatrix>{ab, c}).m - compose(std::vector<ScatteringMatrix>{a, compose(std::vector<ScatteringMatrix>{b, c})}).m)
              .cwiseAbs()
              .maxCoeff() <= 1e-12);

    SpeckleSpec spec;
    spec.seed = 9;
    spec.corr_len = 1.5;
    const ScatteringMatrix s0 = thin_medium(g, spec), id = identity_matrix(g);
    CHECK(compose(std::vector<ScatteringMatrix>{id, s0, id}).m == s0.m);

    const Grid g8 = circ(8);
    const ScatteringMatrix lens = fourier_lens(g8, 1.0, 1.0);
    const ScatteringMatrix d = slm_diagonal(zero_mask(macro_layout(8, 4)), g8);
    const ScatteringMatrix chain = compose(std::vector<ScatteringMatrix>{lens, identity_matrix(g8), lens, lens, d, lens});
    CHECK((chain.m - CMatrix::Identity(64, 64)).cwiseAbs().maxCoeff() <= 1e-10);

    const ScatteringMatrix wrong{circ(3), circ(3), CMatrix::Identity(9, 9), "x"};
    CHECK_THROWS_AS(compose(std::vector<ScatteringMatrix>{a, wrong}), Error);
    CHECK_THROWS_AS(compose(std::vector<ScatteringMatrix>{}), Error);
}

TEST_CASE("triviality verdicts") {
    for (int n : {7, 8}) {
        const Grid g = circ(n);
        const TrivialityVerdict id = is_trivial(identity_matrix(g), 1e-9);
        CHECK(id.trivial);
        CHECK(id.alpha == doctest::Approx(-1.0));
        const TrivialityVerdict par = is_trivial(parity_matrix(g), 1e-9);
        CHECK(par.trivial);
        CHECK(par.alpha == doctest::Approx(1.0));
    }
    const Grid g = circ(8);
    SpeckleSpec spec;
    spec.seed = 2;
    CHECK(is_trivial(thin_medium(g, spec), 1e-9).trivial);
    CHECK_FALSE(is_trivial(fourier_lens(g, 1.0, 1.0), 0.05).trivial);
    CHECK_FALSE(is_trivial(ScatteringMatrix{g, g, CMatrix::Identity(64, 32), "x"}, 0.05).trivial);
}

TEST_CASE("kernel slices by direct summation") {
    const int n = 6;
    const Grid g = make_grid(n, 20e-6, Boundary::circular);
    auto oracle_slice = [&](const ScatteringMatrix &s, int cx, int cy, const KernelOptions &opt) {
        // H = S K S^T with K the weighted indicator of the fixed coordinate.
        CMatrix k = CMatrix::Zero(g.d(), g.d());
        const double a2 = g.pitch * g.pitch;
        for (int i = 0; i < g.d(); ++i)
            for (int j = 0; j < g.d(); ++j) {
                const int ix = g.x_of(i), iy = g.y_of(i), jx = g.x_of(j), jy = g.y_of(j);
                const int ux = oracle::pmod(ix + jx - n, n), uy = oracle::pmod(iy + jy - n, n);
                const int dx = oracle::pmod(ix - jx, n), dy = oracle::pmod(iy - jy, n);
                auto centered = [&](int v) { return v >= n - n / 2 ? v - n : v; };
                if (opt.mode == KernelMode::sum) {
                    if (ux != oracle::pmod(opt.M * cx, n) || uy != oracle::pmod(opt.M * cy, n)) continue;
                    const double r2 = (std::pow(centered(dx), 2) + std::pow(centered(dy), 2)) * a2;
                    k(i, j) = std::exp(-M_PI * M_PI * opt.sigma * opt.sigma * r2 /
                                       (4.0 * opt.lambda_p * opt.lambda_p * opt.f1 * opt.f1));
                } else {
                    if (dx != oracle::pmod(cx, n) || dy != oracle::pmod(cy, n)) continue;
                    const double u2 = (std::pow(centered(ux), 2) + std::pow(centered(uy), 2)) * a2;
                    k(i, j) = std::exp(-opt.sigma * opt.sigma * u2);
                }
            }
        return CMatrix(s.m * k * s.m.transpose());
    };

    const ScatteringMatrix rnd{g, g, oracle::random_cmatrix(g.d(), g.d(), 17), "x"};
    for (KernelMode mode : {KernelMode::sum, KernelMode::difference}) {
        KernelOptions opt;
        opt.mode = mode;
        opt.sigma = mode == KernelMode::sum ? 13e-6 : 4.7e3;
        for (auto [cx, cy] : {std::pair{0, 0}, std::pair{1, -2}, std::pair{3, 2}}) {
            const CMatrix h = kernel_slice(rnd, cx, cy, opt);
            CHECK((h - oracle_slice(rnd, cx, cy, opt)).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }

    KernelOptions sum0;
    sum0.M = 2;
    const CMatrix hi = kernel_slice(identity_matrix(g), 1, 0, sum0);
    CHECK((hi - oracle_slice(identity_matrix(g), 1, 0, sum0)).cwiseAbs().maxCoeff() <= 1e-14);

    // The sign solution restores the delta correlation for every fixed sum.
    const ScatteringMatrix sg = sign_solution(random_sign_field(g, 21));
    for (auto [cx, cy] : {std::pair{0, 0}, std::pair{2, 1}}) {
        const CMatrix h = kernel_slice(sg, cx, cy, KernelOptions{});
        const CMatrix delta = oracle_slice(identity_matrix(g), cx, cy, KernelOptions{});
        CHECK((h - delta).cwiseAbs().maxCoeff() <= 1e-9);
    }

    KernelOptions q;
    q.mode = KernelMode::difference;
    const ScatteringMatrix pcp = pcp_solution(random_odd_phase_symbol(g, 5));
    const CMatrix hq = kernel_slice(pcp, 1, 1, q);
    CHECK((hq - oracle_slice(identity_matrix(g), 1, 1, q)).cwiseAbs().maxCoeff() <= 1e-9);

    CHECK_THROWS_AS(kernel_slice(identity_matrix(circ(17)), 0, 0, KernelOptions{}), Error);
}
