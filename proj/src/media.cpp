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

#include "biphoton/media.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace biphoton {

namespace {

int pmod(int v, int n) {
    int r = v % n;
    return r < 0 ? r + n : r;
}

void require_circular(const Grid &g, const char *who) {
    if (g.boundary != Boundary::circular) fail(std::string(who) + ": requires a circular grid");
}

// Kernel h with unnormalized DFT equal to `symbol`: h = idft_unitary / n.
CVector circulant_kernel(const ComplexField &symbol) {
    ComplexField h = dft2(symbol, Direction::inverse);
    return h.values / static_cast<double>(symbol.grid.n);
}

CMatrix dft_matrix_1d(int n) {
    CMatrix f(n, n);
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (int u = 0; u < n; ++u) {
        for (int x = 0; x < n; ++x) {
            long long e = static_cast<long long>(u - n / 2) * (x - n / 2);
            int k = static_cast<int>(((e % n) + n) % n);
            double ang = -kTwoPi * k / n;
            f(u, x) = cplx(std::cos(ang), std::sin(ang)) * s;
        }
    }
    return f;
}

}  // namespace

ScatteringMatrix identity_matrix(const Grid &grid) {
    return ScatteringMatrix{grid, grid, CMatrix::Identity(grid.d(), grid.d()), "identity"};
}

ScatteringMatrix parity_matrix(const Grid &grid) {
    const int n = grid.n, c = grid.center();
    CMatrix m = CMatrix::Zero(grid.d(), grid.d());
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            int px = c - grid.offset(x), py = c - grid.offset(y);
            if (grid.boundary == Boundary::circular) {
                px = pmod(px, n);
                py = pmod(py, n);
            }
            if (px >= 0 && py >= 0 && px < n && py < n) m(grid.index(px, py), grid.index(x, y)) = 1.0;
        }
    }
    return ScatteringMatrix{grid, grid, m, "parity"};
}

ComplexField speckle_field(const Grid &grid, const SpeckleSpec &spec) {
    require_circular(grid, "speckle_field");
    const int n = grid.n;
    if (spec.unit_field) return ComplexField{grid, CVector::Ones(grid.d())};
    if (!(spec.corr_len >= 1.0)) fail("speckle_field: correlation length must be at least 1 pixel");
    if (spec.corr_len >= n / 2.0) fail("speckle_field: correlation length must be below n/2");
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexField noise = zero_field(grid);
    for (int k = 0; k < grid.d(); ++k) {
        const double re = normal(rng);
        const double im = normal(rng);
        noise.values[k] = cplx(re, im);
    }
    ComplexField spec_k = dft2(noise, Direction::forward);
    // Field correlation exp(-r^2 / (2 rho^2)) gives an intensity correlation
    // exp(-r^2 / rho^2), whose FWHM is 2 rho sqrt(ln 2).
    const double rho = spec.corr_len / (2.0 * std::sqrt(std::log(2.0)));
    for (int v = 0; v < n; ++v) {
        for (int u = 0; u < n; ++u) {
            const double kx = kTwoPi * wrap_offset(u, n) / n;
            const double ky = kTwoPi * wrap_offset(v, n) / n;
            spec_k.values[grid.index(u, v)] *= std::exp(-rho * rho * (kx * kx + ky * ky) / 4.0);
        }
    }
    ComplexField out = dft2(spec_k, Direction::inverse);
    const double mean_intensity = out.values.squaredNorm() / grid.d();
    out.values /= std::sqrt(mean_intensity);
    return out;
}

ScatteringMatrix thin_medium(const Grid &grid, const SpeckleSpec &spec) {
    ComplexField f = speckle_field(grid, spec);
    CMatrix m = CMatrix::Zero(grid.d(), grid.d());
    m.diagonal() = f.values;
    return ScatteringMatrix{grid, grid, m, "thin"};
}

ScatteringMatrix thick_medium(const Grid &grid, const SpeckleSpec &spec) {
    require_circular(grid, "thick_medium");
    if (!(spec.envelope_sigma > 0.0)) fail("thick_medium: envelope sigma_s must be set and positive");
    const int d = grid.d();
    CMatrix m(d, d);
    const double s2 = spec.envelope_sigma * spec.envelope_sigma;
    for (int c = 0; c < d; ++c) {
        SpeckleSpec col = spec;
        col.seed = mix_seed(spec.seed, static_cast<std::uint64_t>(c));
        ComplexField f = speckle_field(grid, col);
        const int cx = grid.x_of(c), cy = grid.y_of(c);
        for (int r = 0; r < d; ++r) {
            const int dx = grid.diff_offset(grid.x_of(r), cx), dy = grid.diff_offset(grid.y_of(r), cy);
            f.values[r] *= std::exp(-(dx * dx + dy * dy) / s2);
        }
        const double norm = f.values.norm();
        if (!(norm > 0.0)) fail_numeric("thick_medium: zero column");
        m.col(c) = f.values / norm;
    }
    return ScatteringMatrix{grid, grid, m, "thick"};
}

ScatteringMatrix circulant_from_symbol(const ComplexField &symbol, const std::string &tag) {
    const Grid &g = symbol.grid;
    require_circular(g, "circulant");
    const int n = g.n, d = g.d();
    CVector h = circulant_kernel(symbol);
    CMatrix m(d, d);
    for (int r = 0; r < d; ++r) {
        const int rx = g.x_of(r), ry = g.y_of(r);
        for (int rp = 0; rp < d; ++rp) {
            m(rp, r) = h[g.index(pmod(g.x_of(rp) - rx, n), pmod(g.y_of(rp) - ry, n))];
        }
    }
    return ScatteringMatrix{g, g, m, tag};
}

namespace {

ComplexField sign_symbol(const ComplexField &g) {
    require_circular(g.grid, "sign_solution");
    ComplexField sym = zero_field(g.grid);
    double scale = g.values.cwiseAbs().maxCoeff();
    for (int k = 0; k < g.grid.d(); ++k) {
        const cplx v = g.values[k];
        if (std::abs(v.imag()) > 1e-12 * scale) fail("sign_solution: g must be real-valued");
        if (v.real() == 0.0) {
            fail("sign_solution: g has an exact zero at index " + std::to_string(k) +
                 " (sign undefined; perturb g by a small epsilon)");
        }
        sym.values[k] = v.real() > 0.0 ? 1.0 : -1.0;
    }
    return sym;
}

}  // namespace

ScatteringMatrix sign_solution(const ComplexField &g) {
    return circulant_from_symbol(sign_symbol(g), "sign-solution");
}

ScatteringMatrix sign_solution_embedded(const ComplexField &g, const Grid &linear_grid) {
    const int n = linear_grid.n;
    if (g.grid.n != 2 * n) fail("sign_solution_embedded: g must live on the 2n circular grid");
    const ComplexField sym = sign_symbol(g);
    const CVector h = circulant_kernel(sym);
    const int P = 2 * n;
    const int d = linear_grid.d();
    CMatrix m(d, d);
    for (int r = 0; r < d; ++r) {
        const int rx = r % n, ry = r / n;
        for (int rp = 0; rp < d; ++rp) {
            const int dx = pmod(rp % n - rx, P), dy = pmod(rp / n - ry, P);
            m(rp, r) = h[static_cast<Eigen::Index>(dy) * P + dx];
        }
    }
    return ScatteringMatrix{linear_grid, linear_grid, m, "sign-solution"};
}

ScatteringMatrix pcp_solution(const ComplexField &f) {
    const Grid &g = f.grid;
    require_circular(g, "pcp_solution");
    const int n = g.n;
    double worst = 0.0;
    int worst_k = 0;
    for (int k = 0; k < g.d(); ++k) {
        const int mk = g.index(pmod(-g.x_of(k), n), pmod(-g.y_of(k), n));
        const double err = std::abs(f.values[k] * f.values[mk] - 1.0);
        if (err > worst) {
            worst = err;
            worst_k = k;
        }
    }
    if (worst > 1e-9) {
        std::ostringstream os;
        os << "pcp_solution: f(k) f(-k) = 1 violated, worst |f(k)f(-k) - 1| = " << worst << " at k = ("
           << g.x_of(worst_k) << ", " << g.y_of(worst_k) << ")";
        fail(os.str());
    }
    return circulant_from_symbol(f, "pcp-solution");
}

ComplexField random_sign_field(const Grid &grid, std::uint64_t seed) {
    require_circular(grid, "random_sign_field");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexField g = zero_field(grid);
    for (int k = 0; k < grid.d(); ++k) {
        double v = 0.0;
        while (v == 0.0) v = normal(rng);
        g.values[k] = v;
    }
    return g;
}

ComplexField random_odd_phase_symbol(const Grid &grid, std::uint64_t seed) {
    require_circular(grid, "random_odd_phase_symbol");
    const int n = grid.n;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-kPi, kPi);
    ComplexField f = zero_field(grid);
    std::vector<char> done(static_cast<size_t>(grid.d()), 0);
    for (int k = 0; k < grid.d(); ++k) {
        if (done[k]) continue;
        const int mk = grid.index(pmod(-grid.x_of(k), n), pmod(-grid.y_of(k), n));
        const double phi = uni(rng);
        if (mk == k) {
            // Self-conjugate frequencies need f(k)^2 = 1.
            f.values[k] = phi >= 0.0 ? 1.0 : -1.0;
        } else {
            f.values[k] = std::polar(1.0, phi);
            f.values[mk] = std::polar(1.0, -phi);
            done[mk] = 1;
        }
        done[k] = 1;
    }
    return f;
}

std::vector<int> MacroLayout::owner() const {
    std::vector<int> own(static_cast<size_t>(n) * n, -1);
    for (int m = 0; m < static_cast<int>(pixels.size()); ++m) {
        for (int p : pixels[m]) {
            if (p < 0 || p >= n * n) fail("MacroLayout: pixel index out of range");
            if (own[p] != -1) fail("MacroLayout: overlapping macropixels at pixel " + std::to_string(p));
            own[p] = m;
        }
    }
    return own;
}

MacroLayout macro_layout(int n, int macro_n, int block) {
    if (macro_n < 1 || block < 1) fail("macro_layout: macro_n and block must be positive");
    if (macro_n * block > n) fail("macro_layout: macropixel block does not fit on the grid");
    MacroLayout lay;
    lay.n = n;
    lay.macro_n = macro_n;
    lay.block = block;
    lay.pixels.resize(static_cast<size_t>(macro_n) * macro_n);
    const int off = lay.offset();
    for (int my = 0; my < macro_n; ++my) {
        for (int mx = 0; mx < macro_n; ++mx) {
            auto &list = lay.pixels[static_cast<size_t>(my) * macro_n + mx];
            for (int by = 0; by < block; ++by)
                for (int bx = 0; bx < block; ++bx)
                    list.push_back((off + my * block + by) * n + (off + mx * block + bx));
        }
    }
    return lay;
}

MacroLayout macro_layout(int n, int macro_n) {
    if (macro_n < 1 || macro_n > n) fail("macro_layout: macro_n must lie in [1, n]");
    return macro_layout(n, macro_n, n / macro_n);
}

PhaseMask zero_mask(const MacroLayout &layout) {
    return PhaseMask{layout, std::vector<double>(static_cast<size_t>(layout.count()), 0.0)};
}

PhaseMask make_mask(const MacroLayout &layout, std::vector<double> phases) {
    if (phases.size() != static_cast<size_t>(layout.count())) fail("make_mask: phase count mismatch");
    for (double &p : phases) {
        if (!std::isfinite(p)) fail_numeric("make_mask: non-finite phase");
        p = wrap_phase(p);
    }
    return PhaseMask{layout, std::move(phases)};
}

CVector slm_phases(const PhaseMask &mask, const Grid &grid) {
    if (mask.layout.n != grid.n) fail("slm_diagonal: mask layout does not match grid");
    if (mask.phases.size() != mask.layout.pixels.size()) fail("slm_diagonal: phase count mismatch");
    const std::vector<int> own = mask.layout.owner();
    CVector diag(grid.d());
    for (int p = 0; p < grid.d(); ++p) diag[p] = own[p] < 0 ? cplx(1.0) : std::polar(1.0, mask.phases[own[p]]);
    return diag;
}

ScatteringMatrix slm_diagonal(const PhaseMask &mask, const Grid &grid) {
    CMatrix m = CMatrix::Zero(grid.d(), grid.d());
    m.diagonal() = slm_phases(mask, grid);
    return ScatteringMatrix{grid, grid, m, "slm"};
}

ScatteringMatrix fourier_lens(const Grid &grid, double f, double lambda) {
    require_circular(grid, "fourier_lens");
    if (!(f > 0.0)) fail("fourier_lens: focal length must be positive");
    if (!(lambda > 0.0)) fail("fourier_lens: wavelength must be positive");
    const int n = grid.n;
    const CMatrix f1 = dft_matrix_1d(n);
    CMatrix m(grid.d(), grid.d());
    for (int uy = 0; uy < n; ++uy)
        for (int y = 0; y < n; ++y) m.block(uy * n, y * n, n, n) = f1(uy, y) * f1;
    Grid out = make_grid(n, lambda * f / (n * grid.pitch), Boundary::circular);
    return ScatteringMatrix{grid, out, m, "lens"};
}

ScatteringMatrix compose(const std::vector<const ScatteringMatrix *> &stages) {
    if (stages.empty()) fail("compose: no stages");
    CMatrix acc = stages.back()->m;
    for (int k = static_cast<int>(stages.size()) - 2; k >= 0; --k) {
        const ScatteringMatrix &s = *stages[k];
        if (s.m.cols() != acc.rows()) {
            fail("compose: stage " + std::to_string(k) + " has " + std::to_string(s.m.cols()) +
                 " columns but the next stage outputs " + std::to_string(acc.rows()));
        }
        acc = s.m * acc;
    }
    return ScatteringMatrix{stages.back()->grid_in, stages.front()->grid_out, std::move(acc), "composed"};
}

ScatteringMatrix compose(const std::vector<ScatteringMatrix> &stages) {
    std::vector<const ScatteringMatrix *> ptrs;
    for (const auto &s : stages) ptrs.push_back(&s);
    return compose(ptrs);
}

TrivialityVerdict is_trivial(const ScatteringMatrix &s, double tol) {
    TrivialityVerdict v;
    if (s.m.rows() != s.m.cols() || !(s.grid_in == s.grid_out) || s.grid_in.d() != s.m.cols()) {
        v.trivial = false;
        return v;
    }
    const Grid &g = s.grid_in;
    const int n = g.n, d = g.d();
    const bool circ = g.boundary == Boundary::circular;
    std::vector<int> peak(static_cast<size_t>(d), -1);
    double min_conc = 1.0;
    for (int c = 0; c < d; ++c) {
        const auto col = s.m.col(c);
        const double energy = col.squaredNorm();
        if (!(energy > 0.0)) continue;
        Eigen::Index r;
        const double top = col.cwiseAbs2().maxCoeff(&r);
        min_conc = std::min(min_conc, top / energy);
        peak[c] = static_cast<int>(r);
    }
    v.min_concentration = min_conc;
    if (min_conc < 1.0 - tol) return v;

    // Fit alpha from columns away from the ambiguous circular edge.
    double num = 0.0, den = 0.0;
    for (int c = 0; c < d; ++c) {
        if (peak[c] < 0) continue;
        const int ox[2] = {g.offset(g.x_of(c)), g.offset(g.y_of(c))};
        const int px[2] = {g.offset(g.x_of(peak[c])), g.offset(g.y_of(peak[c]))};
        for (int a = 0; a < 2; ++a) {
            if (circ && (2 * std::abs(ox[a]) >= n || 2 * std::abs(px[a]) >= n)) continue;
            num += static_cast<double>(px[a]) * ox[a];
            den += static_cast<double>(ox[a]) * ox[a];
        }
    }
    if (!(den > 0.0)) return v;
    double alpha = -num / den;
    if (std::abs(alpha) > 1.0 + 1e-9) return v;
    for (int c = 0; c < d; ++c) {
        if (peak[c] < 0) continue;
        const int ox[2] = {g.offset(g.x_of(c)), g.offset(g.y_of(c))};
        const int px[2] = {g.offset(g.x_of(peak[c])), g.offset(g.y_of(peak[c]))};
        for (int a = 0; a < 2; ++a) {
            double resid = px[a] + alpha * ox[a];
            if (circ) resid -= n * std::round(resid / n);
            if (std::abs(resid) > 0.75) return v;
        }
    }
    v.trivial = true;
    v.alpha = alpha;
    return v;
}

CMatrix kernel_slice(const ScatteringMatrix &s, int coord_x, int coord_y, const KernelOptions &opt) {
    const Grid &g = s.grid_in;
    if (g.boundary != Boundary::circular) fail("kernel_slice: requires a circular grid");
    if (g.n > 16) fail("kernel_slice: limited to n <= 16 (direct summation cost)");
    if (s.m.cols() != g.d()) fail("kernel_slice: matrix/grid mismatch");
    const int n = g.n, d = g.d();
    const int tx = wrap_offset(opt.M * coord_x, n), ty = wrap_offset(opt.M * coord_y, n);
    double coeff = 0.0;
    if (opt.sigma > 0.0) {
        if (opt.mode == KernelMode::sum) {
            coeff = kPi * kPi * opt.sigma * opt.sigma * g.pitch * g.pitch /
                    (4.0 * opt.lambda_p * opt.lambda_p * opt.f1 * opt.f1);
        } else {
            coeff = opt.sigma * opt.sigma * g.pitch * g.pitch;
        }
    }
    CMatrix h = CMatrix::Zero(s.m.rows(), s.m.rows());
    for (int i = 0; i < d; ++i) {
        const int ix = g.x_of(i), iy = g.y_of(i);
        for (int sp = 0; sp < d; ++sp) {
            const int sx = g.x_of(sp), sy = g.y_of(sp);
            double w;
            if (opt.mode == KernelMode::sum) {
                if (g.sum_offset(ix, sx) != tx || g.sum_offset(iy, sy) != ty) continue;
                const int dx = g.diff_offset(ix, sx), dy = g.diff_offset(iy, sy);
                w = std::exp(-coeff * (dx * dx + dy * dy));
            } else {
                if (g.diff_offset(ix, sx) != wrap_offset(coord_x, n) ||
                    g.diff_offset(iy, sy) != wrap_offset(coord_y, n))
                    continue;
                const int ux = g.sum_offset(ix, sx), uy = g.sum_offset(iy, sy);
                w = std::exp(-coeff * (ux * ux + uy * uy));
            }
            h.noalias() += w * s.m.col(i) * s.m.col(sp).transpose();
        }
    }
    return h;
}

}  // namespace biphoton
