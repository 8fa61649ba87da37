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

#ifndef BIPHOTON_MEDIA_HPP
#define BIPHOTON_MEDIA_HPP

#include <optional>
#include <string>
#include <vector>

#include "biphoton/lattice.hpp"

namespace biphoton {

/// Linear operator from fields on grid_in to fields on grid_out.
struct ScatteringMatrix {
    Grid grid_in;
    Grid grid_out;
    CMatrix m;
    std::string tag;

    Eigen::Index rows() const { return m.rows(); }
    Eigen::Index cols() const { return m.cols(); }
};

ScatteringMatrix identity_matrix(const Grid &grid);
/// Centered coordinate inversion r -> -r.
ScatteringMatrix parity_matrix(const Grid &grid);

struct SpeckleSpec {
    double corr_len = 3.0;        // l_s, pixels
    double envelope_sigma = 0.0;  // sigma_s, pixels (thick media only)
    std::uint64_t seed = 1;
    /// Replace the random field by the constant 1 (transparent medium).
    bool unit_field = false;
};

/// Seeded complex white noise low-passed in the DFT domain so that the
/// intensity autocorrelation has a FWHM of about corr_len pixels. Mean
/// intensity is normalized to 1.
ComplexField speckle_field(const Grid &grid, const SpeckleSpec &spec);

/// Diagonal medium with a speckle field on the diagonal.
ScatteringMatrix thin_medium(const Grid &grid, const SpeckleSpec &spec);

/// Column c is an independent speckle field times the Gaussian envelope
/// exp(-|r - r_c|^2 / sigma_s^2), normalized to unit energy.
ScatteringMatrix thick_medium(const Grid &grid, const SpeckleSpec &spec);

/// Circulant operator whose DFT symbol is sign(g); g is indexed by DFT
/// frequency (index 0 = zero frequency).
ScatteringMatrix sign_solution(const ComplexField &g);
/// Sign solution for a linear grid of side n built from g on the 2n circular
/// grid and cropped to the central n x n window (edge error documented in
/// the README).
ScatteringMatrix sign_solution_embedded(const ComplexField &g, const Grid &linear_grid);

/// Circulant operator with DFT symbol f; requires f(k) f(-k) = 1.
ScatteringMatrix pcp_solution(const ComplexField &f);

/// Circulant operator with an arbitrary DFT symbol (no constraint check).
ScatteringMatrix circulant_from_symbol(const ComplexField &symbol, const std::string &tag);

/// Seeded real field with both signs, no exact zeros.
ComplexField random_sign_field(const Grid &grid, std::uint64_t seed);
/// Seeded symbol exp(i phi(k)) with phi(-k) = -phi(k).
ComplexField random_odd_phase_symbol(const Grid &grid, std::uint64_t seed);

/// Centered square block of macropixels on an SLM grid.
struct MacroLayout {
    int n = 0;        // SLM grid side
    int macro_n = 0;  // macropixels per axis
    int block = 1;    // SLM pixels per macropixel along an axis
    /// pixels[m] lists the flattened grid pixels of macropixel m.
    std::vector<std::vector<int>> pixels;

    int count() const { return macro_n * macro_n; }
    int offset() const { return (n - macro_n * block) / 2; }
    /// Macropixel owning a grid pixel, or -1.
    std::vector<int> owner() const;
};

MacroLayout macro_layout(int n, int macro_n, int block);
/// Largest block that fits macro_n macropixels on an n grid.
MacroLayout macro_layout(int n, int macro_n);

struct PhaseMask {
    MacroLayout layout;
    std::vector<double> phases;  // wrapped to [0, 2pi)

    int macro_n() const { return layout.macro_n; }
};

PhaseMask zero_mask(const MacroLayout &layout);
PhaseMask make_mask(const MacroLayout &layout, std::vector<double> phases);

/// Per-pixel diagonal exp(i theta) of the SLM; unmapped pixels get 1.
CVector slm_phases(const PhaseMask &mask, const Grid &grid);
ScatteringMatrix slm_diagonal(const PhaseMask &mask, const Grid &grid);

/// Ideal 2f lens as the centered unitary DFT. Output pitch = lambda f / (n pitch).
ScatteringMatrix fourier_lens(const Grid &grid, double f, double lambda);

/// Product stages[0] * stages[1] * ... (the last stage acts first).
ScatteringMatrix compose(const std::vector<const ScatteringMatrix *> &stages);
ScatteringMatrix compose(const std::vector<ScatteringMatrix> &stages);

struct TrivialityVerdict {
    bool trivial = false;
    double alpha = 0.0;
    /// Smallest per-column fraction of energy held by the brightest pixel.
    double min_concentration = 0.0;
};

/// Tests whether S is (close to) delta(r' + alpha r) with one alpha in [-1, 1]
/// for all columns. The identity has alpha = -1, the parity alpha = +1.
TrivialityVerdict is_trivial(const ScatteringMatrix &s, double tol);

enum class KernelMode { sum, difference };

struct KernelOptions {
    KernelMode mode = KernelMode::sum;
    int M = 1;            // sum-coordinate magnification (integer on the lattice)
    double sigma = 0.0;   // sigma_r for the sum kernel, sigma_k for the difference kernel
    double lambda_p = 402e-9;
    double f1 = 35e-3;
};

/// Restoring kernel H (sum) or Q (difference) for one fixed coordinate value,
/// by direct summation. (coord_x, coord_y) is the fixed r+ (or r-) as a pixel
/// offset from the zero coordinate.
CMatrix kernel_slice(const ScatteringMatrix &s, int coord_x, int coord_y, const KernelOptions &opt);

}  // namespace biphoton

#endif
