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

#include "biphoton/states.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace biphoton {

namespace {

void require_grid_side(const ObjectImage &object, const Grid &grid, const char *who) {
    object.validate();
    if (object.side != grid.n) {
        fail(std::string(who) + ": object side " + std::to_string(object.side) + " does not match grid n " +
             std::to_string(grid.n));
    }
}

// Coefficient kappa of exp(-kappa |delta|^2) for the input-plane minus
// Gaussian, with delta measured in pixels of `grid`.
double input_minus_coeff(const SPDCParams &p, const OpticalConfig &cfg, const Grid &grid) {
    const double f1 = cfg.f[1];
    return kPi * kPi * p.sigma_r * p.sigma_r * grid.pitch * grid.pitch / (4.0 * p.lambda_p * p.lambda_p * f1 * f1);
}

double input_plus_coeff(const SPDCParams &p, const OpticalConfig &cfg, const Grid &grid) {
    const double f1 = cfg.f[1];
    return kPi * kPi * grid.pitch * grid.pitch / (4.0 * p.lambda_p * p.lambda_p * f1 * f1 * p.sigma_k * p.sigma_k);
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

TwoPhotonMixed finish_ensemble(const Grid &grid, CMatrix phi, const char *who) {
    const int d = grid.d();
    const double total = phi.squaredNorm() / d;
    if (!(total > 0.0)) fail(std::string(who) + ": ensemble has zero weight (zero object?)");
    TwoPhotonMixed rho;
    rho.grid = grid;
    rho.weights = RVector::Constant(d, 1.0 / d);
    rho.phi = phi / std::sqrt(total);
    rho.chi = CMatrix::Identity(d, d);
    return rho;
}

}  // namespace

double SPDCParams::sigma_r_from_crystal() const {
    if (!(L > 0.0) || !(lambda_p > 0.0)) fail("SPDCParams: L and lambda_p must be set to derive sigma_r");
    return std::sqrt(2.0 * L * lambda_p / (3.0 * kPi));
}

void SPDCParams::check_consistency(double rel) const {
    if (!(lambda_p > 0.0)) fail("SPDCParams: lambda_p must be positive");
    if (sigma_r < 0.0 || sigma_k < 0.0) fail("SPDCParams: widths must be nonnegative");
    if (L > 0.0 && std::isfinite(sigma_r) && sigma_r > 0.0) {
        double derived = sigma_r_from_crystal();
        if (std::abs(derived - sigma_r) > rel * sigma_r) {
            fail("SPDCParams: sigma_r = " + std::to_string(sigma_r) + " disagrees with sqrt(2 L lambda_p / 3pi) = " +
                 std::to_string(derived));
        }
    }
}

SPDCParams SPDCParams::defaults() { return SPDCParams{}; }

void OpticalConfig::validate() const {
    for (int k = 0; k < 6; ++k) {
        if (!(f[k] > 0.0)) fail("OpticalConfig: focal length f" + std::to_string(k) + " must be positive");
    }
    if (!(lambda > 0.0)) fail("OpticalConfig: lambda must be positive");
}

OpticalConfig OpticalConfig::defaults() { return OpticalConfig{}; }

double ObjectImage::at_offset(double dx, double dy) const {
    const long x = std::lround(dx) + side / 2;
    const long y = std::lround(dy) + side / 2;
    if (x < 0 || y < 0 || x >= side || y >= side) return 0.0;
    return values[static_cast<size_t>(y) * side + static_cast<size_t>(x)];
}

void ObjectImage::validate() const {
    if (side < 1 || values.size() != static_cast<size_t>(side) * side) fail("ObjectImage: size mismatch");
    for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0)) fail("ObjectImage: values must lie in [0, 1]");
    }
}

ObjectImage make_object(int side, std::vector<double> values) {
    ObjectImage o{side, std::move(values)};
    o.validate();
    return o;
}

ObjectImage digit_eight(int side) {
    if (side < 5) fail("digit_eight: side must be at least 5");
    ObjectImage o{side, std::vector<double>(static_cast<size_t>(side) * side, 0.0)};
    const int width = std::max(3, static_cast<int>(std::lround(0.5 * side)));
    const int height = std::max(5, static_cast<int>(std::lround(0.75 * side)));
    const int stroke = std::max(1, side / 10);
    const int x0 = (side - width) / 2;
    const int y0 = (side - height) / 2;
    const int ymid = y0 + (height - stroke) / 2;
    auto fill = [&](int xa, int ya, int w, int h) {
        for (int y = ya; y < ya + h; ++y)
            for (int x = xa; x < xa + w; ++x) o.values[static_cast<size_t>(y) * side + x] = 1.0;
    };
    fill(x0, y0, width, stroke);
    fill(x0, ymid, width, stroke);
    fill(x0, y0 + height - stroke, width, stroke);
    fill(x0, y0, stroke, height);
    fill(x0 + width - stroke, y0, stroke, height);
    return o;
}

ObjectImage point_object(int side, int dx, int dy) {
    ObjectImage o{side, std::vector<double>(static_cast<size_t>(side) * side, 0.0)};
    const int x = side / 2 + dx, y = side / 2 + dy;
    if (x < 0 || y < 0 || x >= side || y >= side) fail("point_object: offset outside image");
    o.values[static_cast<size_t>(y) * side + x] = 1.0;
    return o;
}

ObjectImage constant_object(int side, double value) {
    return make_object(side, std::vector<double>(static_cast<size_t>(side) * side, value));
}

TwoPhotonPure normalize(const TwoPhotonPure &state) {
    const double norm = state.psi.norm();
    if (!(norm > 0.0)) fail("normalize: all-zero state");
    if (!std::isfinite(norm)) fail_numeric("normalize: non-finite state");
    return TwoPhotonPure{state.grid, state.psi / norm, norm * norm};
}

double pump_plane_pitch(const Grid &object_grid, const OpticalConfig &cfg) {
    const double lambda_p = cfg.lambda / 2.0;
    return lambda_p * cfg.f[0] / (object_grid.n * object_grid.pitch);
}

ComplexField pump_from_object(const ObjectImage &object, const Grid &grid, double waist, const OpticalConfig &cfg) {
    require_grid_side(object, grid, "pump_from_object");
    if (!(waist > 0.0)) fail("pump_from_object: waist must be positive");
    cfg.validate();
    const int n = grid.n;
    CVector field(grid.d());
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            double g = 1.0;
            if (std::isfinite(waist)) {
                const double rx = grid.offset(x) * grid.pitch, ry = grid.offset(y) * grid.pitch;
                g = std::exp(-(rx * rx + ry * ry) / (waist * waist));
            }
            field[grid.index(x, y)] = g * object.at(x, y);
        }
    }
    if (!(field.norm() > 0.0)) fail("pump_from_object: zero object");
    Grid out_grid = make_grid(n, pump_plane_pitch(grid, cfg), grid.boundary);
    return normalize(ComplexField{out_grid, centered_dft2(field, n, Direction::forward)});
}

double minus_profile_momentum(const SPDCParams &p, double q) {
    if (p.profile == Profile::gaussian) {
        if (!std::isfinite(p.sigma_r)) return q == 0.0 ? 1.0 : 0.0;
        return std::exp(-p.sigma_r * p.sigma_r * q * q / 4.0);
    }
    if (!(p.L > 0.0) || !(p.lambda_p > 0.0)) fail("sinc profile requires L and lambda_p");
    return sinc(p.L * p.lambda_p * q * q / (4.0 * kPi));
}

std::vector<double> minus_kernel_table(const SPDCParams &p, const Grid &grid) {
    const int n = grid.n;
    const int side = 2 * n - 1;
    std::vector<double> table(static_cast<size_t>(side) * side, 0.0);
    if (p.profile == Profile::gaussian) {
        for (int dy = -(n - 1); dy <= n - 1; ++dy) {
            for (int dx = -(n - 1); dx <= n - 1; ++dx) {
                const double r2 = (dx * dx + dy * dy) * grid.pitch * grid.pitch;
                double v;
                if (!std::isfinite(p.sigma_r)) v = 1.0;
                else if (p.sigma_r == 0.0) v = (dx == 0 && dy == 0) ? 1.0 : 0.0;
                else v = std::exp(-r2 / (p.sigma_r * p.sigma_r));
                table[static_cast<size_t>(dy + n - 1) * side + (dx + n - 1)] = v;
            }
        }
        return table;
    }
    if (!(p.L > 0.0) || !(p.lambda_p > 0.0)) fail("crystal_state: sinc profile requires L and lambda_p");
    // Sample the momentum profile on a 2n periodic lattice so that every
    // offset in [-(n-1), n-1] is represented without aliasing onto another.
    const int P = 2 * n;
    const int h = P / 2;
    CVector spectrum(static_cast<Eigen::Index>(P) * P);
    for (int v = 0; v < P; ++v) {
        for (int u = 0; u < P; ++u) {
            const double kx = kTwoPi * (u - h) / (P * grid.pitch);
            const double ky = kTwoPi * (v - h) / (P * grid.pitch);
            spectrum[static_cast<Eigen::Index>(v) * P + u] = minus_profile_momentum(p, std::sqrt(kx * kx + ky * ky));
        }
    }
    CVector kernel = centered_dft2(spectrum, P, Direction::inverse);
    const double k0 = kernel[static_cast<Eigen::Index>(h) * P + h].real();
    if (!(std::abs(k0) > 0.0)) fail_numeric("crystal_state: degenerate sinc kernel");
    for (int dy = -(n - 1); dy <= n - 1; ++dy) {
        for (int dx = -(n - 1); dx <= n - 1; ++dx) {
            table[static_cast<size_t>(dy + n - 1) * side + (dx + n - 1)] =
                kernel[static_cast<Eigen::Index>(dy + h) * P + (dx + h)].real() / k0;
        }
    }
    return table;
}

TwoPhotonPure crystal_state(const ComplexField &pump, const SPDCParams &p) {
    const Grid &g = pump.grid;
    const int n = g.n, d = g.d();
    if (pump.values.size() != d) fail("crystal_state: pump length mismatch");
    const std::vector<double> kernel = minus_kernel_table(p, g);
    const int side = 2 * n - 1;
    const int c = g.center();
    CMatrix psi(d, d);
    for (int s = 0; s < d; ++s) {
        const int sx = g.x_of(s), sy = g.y_of(s);
        for (int i = 0; i < d; ++i) {
            const int ix = g.x_of(i), iy = g.y_of(i);
            const int px = c + g.sum_offset(ix, sx), py = c + g.sum_offset(iy, sy);
            cplx e = 0.0;
            if (px >= 0 && py >= 0 && px < n && py < n) e = pump.values[g.index(px, py)];
            const int dx = g.diff_offset(ix, sx), dy = g.diff_offset(iy, sy);
            psi(i, s) = e * kernel[static_cast<size_t>(dy + n - 1) * side + (dx + n - 1)];
        }
    }
    return normalize(TwoPhotonPure{g, psi, 1.0});
}

double input_minus_width(const SPDCParams &p, const OpticalConfig &cfg) {
    return 2.0 * p.lambda_p * cfg.f[1] / (kPi * p.sigma_r);
}

double input_plus_width(const SPDCParams &p, const OpticalConfig &cfg) {
    return 2.0 * p.lambda_p * cfg.f[1] * p.sigma_k / kPi;
}

TwoPhotonPure input_plane_state(const ObjectImage &object, const SPDCParams &p, const OpticalConfig &cfg,
                                const Grid &grid, double M) {
    object.validate();
    if (M == 0.0 || !std::isfinite(M)) fail("input_plane_state: magnification M must be nonzero and finite");
    const int d = grid.d();
    const double kappa = input_minus_coeff(p, cfg, grid);
    CMatrix psi(d, d);
    for (int s = 0; s < d; ++s) {
        const int sx = grid.x_of(s), sy = grid.y_of(s);
        for (int i = 0; i < d; ++i) {
            const int ix = grid.x_of(i), iy = grid.y_of(i);
            const double t = object.at_offset(grid.sum_offset(ix, sx) / M, grid.sum_offset(iy, sy) / M);
            double w = 1.0;
            if (kappa > 0.0) {
                const int dx = grid.diff_offset(ix, sx), dy = grid.diff_offset(iy, sy);
                w = std::exp(-kappa * (dx * dx + dy * dy));
            }
            psi(i, s) = t * w;
        }
    }
    if (!(psi.norm() > 0.0)) fail("input_plane_state: object does not overlap the sum lattice");
    return normalize(TwoPhotonPure{grid, psi, 1.0});
}

TwoPhotonPure input_plane_state(const ObjectImage &object, const SPDCParams &p, const OpticalConfig &cfg,
                                const Grid &grid) {
    return input_plane_state(object, p, cfg, grid, cfg.M());
}

TwoPhotonPure input_guide_state(const SPDCParams &p, const OpticalConfig &cfg, const Grid &grid) {
    if (!(p.sigma_k > 0.0)) fail("input_guide_state: sigma_k must be positive");
    const int d = grid.d();
    const double kp = input_plus_coeff(p, cfg, grid);
    const double km = input_minus_coeff(p, cfg, grid);
    CMatrix psi(d, d);
    for (int s = 0; s < d; ++s) {
        const int sx = grid.x_of(s), sy = grid.y_of(s);
        for (int i = 0; i < d; ++i) {
            const int ix = grid.x_of(i), iy = grid.y_of(i);
            const int ux = grid.sum_offset(ix, sx), uy = grid.sum_offset(iy, sy);
            const int dx = grid.diff_offset(ix, sx), dy = grid.diff_offset(iy, sy);
            psi(i, s) = std::exp(-kp * (ux * ux + uy * uy) - km * (dx * dx + dy * dy));
        }
    }
    return normalize(TwoPhotonPure{grid, psi, 1.0});
}

double guide_minus_width(const SPDCParams &p, double magnification) { return magnification * p.sigma_r; }

double guide_plus_width(const SPDCParams &p, double magnification) { return magnification / p.sigma_k; }

TwoPhotonPure guide_state(const SPDCParams &p, double magnification, const Grid &grid) {
    if (!(p.sigma_k > 0.0)) fail("guide_state: sigma_k must be positive");
    if (p.sigma_r < 0.0 || std::isnan(p.sigma_r)) fail("guide_state: sigma_r must be nonnegative");
    if (!(magnification > 0.0)) fail("guide_state: magnification must be positive");
    const int d = grid.d();
    const double a2 = grid.pitch * grid.pitch;
    const double kp = std::pow(p.sigma_k / magnification, 2) * a2;
    const double wm = magnification * p.sigma_r;
    const bool diagonal = p.sigma_r == 0.0;
    const double km = diagonal || !std::isfinite(wm) ? 0.0 : a2 / (wm * wm);
    CMatrix psi(d, d);
    for (int s = 0; s < d; ++s) {
        const int sx = grid.x_of(s), sy = grid.y_of(s);
        for (int i = 0; i < d; ++i) {
            const int ix = grid.x_of(i), iy = grid.y_of(i);
            const int dx = grid.diff_offset(ix, sx), dy = grid.diff_offset(iy, sy);
            if (diagonal && (dx != 0 || dy != 0)) {
                psi(i, s) = 0.0;
                continue;
            }
            const int ux = grid.sum_offset(ix, sx), uy = grid.sum_offset(iy, sy);
            psi(i, s) = std::exp(-kp * (ux * ux + uy * uy) - km * (dx * dx + dy * dy));
        }
    }
    return normalize(TwoPhotonPure{grid, psi, 1.0});
}

TwoPhotonPure difference_encoded_state(const ObjectImage &object, const SPDCParams &p, const Grid &grid) {
    require_grid_side(object, grid, "difference_encoded_state");
    const int d = grid.d();
    const double kp = p.sigma_k * p.sigma_k * grid.pitch * grid.pitch / 4.0;
    CMatrix psi(d, d);
    for (int s = 0; s < d; ++s) {
        const int sx = grid.x_of(s), sy = grid.y_of(s);
        for (int i = 0; i < d; ++i) {
            const int ix = grid.x_of(i), iy = grid.y_of(i);
            const double t = object.at_offset(grid.diff_offset(ix, sx), grid.diff_offset(iy, sy));
            double w = 1.0;
            if (kp > 0.0) {
                const int ux = grid.sum_offset(ix, sx), uy = grid.sum_offset(iy, sy);
                w = std::exp(-kp * (ux * ux + uy * uy));
            }
            psi(i, s) = t * w;
        }
    }
    if (!(psi.norm() > 0.0)) fail("difference_encoded_state: zero object");
    return normalize(TwoPhotonPure{grid, psi, 1.0});
}

TwoPhotonMixed separable_guide_ensemble(const SPDCParams &p, const OpticalConfig &cfg, const Grid &grid) {
    if (!(p.sigma_k > 0.0)) fail("separable_guide_ensemble: sigma_k must be positive");
    const int d = grid.d();
    const double kp = input_plus_coeff(p, cfg, grid);
    const double km = input_minus_coeff(p, cfg, grid);
    CMatrix phi(d, d);
    for (int R = 0; R < d; ++R) {
        const int rx = grid.x_of(R), ry = grid.y_of(R);
        for (int i = 0; i < d; ++i) {
            const int ix = grid.x_of(i), iy = grid.y_of(i);
            const int ux = grid.sum_offset(ix, rx), uy = grid.sum_offset(iy, ry);
            const int dx = grid.diff_offset(ix, rx), dy = grid.diff_offset(iy, ry);
            phi(i, R) = std::exp(-kp * (ux * ux + uy * uy) - km * (dx * dx + dy * dy));
        }
    }
    return finish_ensemble(grid, std::move(phi), "separable_guide_ensemble");
}

TwoPhotonMixed separable_object_ensemble(const ObjectImage &object, const SPDCParams &p, const OpticalConfig &cfg,
                                         const Grid &grid, double M) {
    object.validate();
    if (M == 0.0 || !std::isfinite(M)) fail("separable_object_ensemble: magnification M must be nonzero");
    const int d = grid.d();
    const double km = input_minus_coeff(p, cfg, grid);
    CMatrix phi(d, d);
    for (int R = 0; R < d; ++R) {
        const int rx = grid.x_of(R), ry = grid.y_of(R);
        for (int i = 0; i < d; ++i) {
            const int ix = grid.x_of(i), iy = grid.y_of(i);
            const double t = object.at_offset(grid.sum_offset(ix, rx) / M, grid.sum_offset(iy, ry) / M);
            double w = 1.0;
            if (km > 0.0) {
                const int dx = grid.diff_offset(ix, rx), dy = grid.diff_offset(iy, ry);
                w = std::exp(-km * (dx * dx + dy * dy));
            }
            phi(i, R) = t * w;
        }
    }
    return finish_ensemble(grid, std::move(phi), "separable_object_ensemble");
}

TwoPhotonMixed separable_object_ensemble(const ObjectImage &object, const SPDCParams &p, const OpticalConfig &cfg,
                                         const Grid &grid) {
    return separable_object_ensemble(object, p, cfg, grid, cfg.M());
}

TwoPhotonPure lens_transform(const TwoPhotonPure &state, Direction direction) {
    const int n = state.grid.n;
    CMatrix a = centered_dft2_columns(state.psi, n, direction);
    CMatrix at = a.transpose();
    CMatrix b = centered_dft2_columns(at, n, direction);
    return TwoPhotonPure{state.grid, b.transpose(), state.weight};
}

TwoPhotonMixed lens_transform(const TwoPhotonMixed &rho, Direction direction) {
    const int n = rho.grid.n;
    TwoPhotonMixed out;
    out.grid = rho.grid;
    out.weights = rho.weights;
    out.phi = centered_dft2_columns(rho.phi, n, direction);
    out.chi = centered_dft2_columns(rho.chi, n, direction);
    return out;
}

}  // namespace biphoton
