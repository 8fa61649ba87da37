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

#ifndef BIPHOTON_STATES_HPP
#define BIPHOTON_STATES_HPP

#include <string>
#include <vector>

#include "biphoton/lattice.hpp"

namespace biphoton {

enum class Profile { gaussian, sinc };

/// Down-conversion source parameters. Lengths in meters, sigma_k in 1/m.
struct SPDCParams {
    double lambda_p = 402e-9;
    double L = 0.0;  // crystal thickness; 0 means unset
    double sigma_r = 13e-6;
    double sigma_k = 4.7e3;
    Profile profile = Profile::gaussian;

    /// sqrt(2 L lambda_p / (3 pi)); requires L > 0.
    double sigma_r_from_crystal() const;
    /// Throws if both L and sigma_r are set and disagree by more than `rel`.
    void check_consistency(double rel = 1e-3) const;

    static SPDCParams defaults();
};

/// Focal lengths (meters) and magnifications of the optical train.
struct OpticalConfig {
    double f[6] = {200e-3, 35e-3, 150e-3, 150e-3, 150e-3, 150e-3};
    double lambda = 804e-9;
    double M_prime = 0.83;
    double M_dprime = 4.3;
    double M_tprime = 1.6;

    /// Encoding magnification 2 f1 / f0.
    double M() const { return 2.0 * f[1] / f[0]; }
    void validate() const;

    static OpticalConfig defaults();
};

/// Real transmission image with values in [0, 1]. The zero coordinate is the
/// pixel (side/2, side/2).
struct ObjectImage {
    int side = 0;
    std::vector<double> values;

    double at(int x, int y) const { return values[static_cast<size_t>(y) * side + x]; }
    /// Nearest-neighbour lookup at a pixel offset from the center; zero
    /// outside the image.
    double at_offset(double dx, double dy) const;
    void validate() const;
};

ObjectImage make_object(int side, std::vector<double> values);
/// Seven-segment style digit '8' scaled to the image side.
ObjectImage digit_eight(int side);
/// Single bright pixel at (dx, dy) from the center.
ObjectImage point_object(int side, int dx, int dy);
ObjectImage constant_object(int side, double value);

/// Pure two-photon state, psi(i, s) with idler rows and signal columns.
struct TwoPhotonPure {
    Grid grid;
    CMatrix psi;
    /// Squared norm before the last renormalization (1 for fresh states).
    double weight = 1.0;
};

TwoPhotonPure normalize(const TwoPhotonPure &state);

/// Separable ensemble sum_R p_R |phi_R><phi_R| x |chi_R><chi_R|. Column R of
/// `phi` and `chi` holds the two factors of component R.
struct TwoPhotonMixed {
    Grid grid;
    RVector weights;
    CMatrix phi;
    CMatrix chi;

    int size() const { return static_cast<int>(weights.size()); }
};

/// Pump field at the crystal: the centered DFT of gaussian(waist) * t.
/// A non-finite waist disables the Gaussian.
ComplexField pump_from_object(const ObjectImage &object, const Grid &grid, double waist, const OpticalConfig &cfg);

/// Pitch of the crystal-plane grid conjugate to an object grid.
double pump_plane_pitch(const Grid &object_grid, const OpticalConfig &cfg);

/// psi_c(i, s) = E_p(r_i + r_s) K(r_i - r_s) with a Gaussian or sinc minus
/// profile K.
TwoPhotonPure crystal_state(const ComplexField &pump, const SPDCParams &p);

/// Minus-coordinate profile in the conjugate (momentum) domain, as a
/// function of |q| in 1/m, normalized to 1 at q = 0.
double minus_profile_momentum(const SPDCParams &p, double q);

/// Position-space minus kernel sampled at pixel offsets, as used by
/// crystal_state. Returned as a (2n-1) x (2n-1) row-major table with the zero
/// offset at index (n-1, n-1).
std::vector<double> minus_kernel_table(const SPDCParams &p, const Grid &grid);

/// 1/e width of the minus-coordinate Gaussian of the input-plane state:
/// 2 lambda_p f1 / (pi sigma_r).
double input_minus_width(const SPDCParams &p, const OpticalConfig &cfg);
/// 1/e width of the sum-coordinate Gaussian of the input-plane guide.
double input_plus_width(const SPDCParams &p, const OpticalConfig &cfg);

/// psi_in(i, s) = t((r_i + r_s) / M) exp(-|r_i - r_s|^2 pi^2 sigma_r^2 / (4 lambda_p^2 f1^2)).
TwoPhotonPure input_plane_state(const ObjectImage &object, const SPDCParams &p, const OpticalConfig &cfg,
                                const Grid &grid, double M);
TwoPhotonPure input_plane_state(const ObjectImage &object, const SPDCParams &p, const OpticalConfig &cfg,
                                const Grid &grid);

/// The entangled guide in the input plane: a point object with the finite
/// sum-coordinate width set by sigma_k.
TwoPhotonPure input_guide_state(const SPDCParams &p, const OpticalConfig &cfg, const Grid &grid);

/// 1/e widths of the double-Gaussian state at a plane of magnification m.
double guide_minus_width(const SPDCParams &p, double magnification);
double guide_plus_width(const SPDCParams &p, double magnification);

/// Double-Gaussian state at a plane of magnification m:
/// exp(-(sigma_k/m)^2 |r_i + r_s|^2) exp(-|r_i - r_s|^2 / (m sigma_r)^2).
/// sigma_r == 0 gives the exactly diagonal limit.
TwoPhotonPure guide_state(const SPDCParams &p, double magnification, const Grid &grid);

/// psi(i, s) = t(r_i - r_s) exp(-|r_i + r_s|^2 sigma_k^2 / 4).
TwoPhotonPure difference_encoded_state(const ObjectImage &object, const SPDCParams &p, const Grid &grid);

/// rho_0: one component per grid point R with the two-Gaussian factor phi_R
/// and a Kronecker delta chi_R.
TwoPhotonMixed separable_guide_ensemble(const SPDCParams &p, const OpticalConfig &cfg, const Grid &grid);

/// rho_t: phi_R(r) = t((r + R)/M) exp(...), chi_R = delta at R.
TwoPhotonMixed separable_object_ensemble(const ObjectImage &object, const SPDCParams &p, const OpticalConfig &cfg,
                                         const Grid &grid, double M);
TwoPhotonMixed separable_object_ensemble(const ObjectImage &object, const SPDCParams &p, const OpticalConfig &cfg,
                                         const Grid &grid);

/// Applies the centered DFT (lens) to both photons of a pure state.
TwoPhotonPure lens_transform(const TwoPhotonPure &state, Direction direction = Direction::forward);
/// Applies the centered DFT to both factors of every ensemble component.
TwoPhotonMixed lens_transform(const TwoPhotonMixed &rho, Direction direction = Direction::forward);

}  // namespace biphoton

#endif
