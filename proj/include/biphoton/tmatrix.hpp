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

#ifndef BIPHOTON_TMATRIX_HPP
#define BIPHOTON_TMATRIX_HPP

#include <vector>

#include "biphoton/media.hpp"

namespace biphoton {

enum class TMBasis { hadamard, pixel };

/// Transmission matrix measured in the macropixel basis of a layout.
struct MeasuredTM {
    CMatrix m;  // d_out x macro_n^2
    TMBasis basis = TMBasis::hadamard;
    int phase_steps = 4;
    int macro_n = 0;
    /// |E_ref|^2 per output pixel, from the reference-only frame.
    RVector ref_intensity;
};

/// Sylvester-ordered Hadamard masks (entries +1/-1) of order macro_n^2;
/// masks[k][m] is the sign of macropixel m in mask k. Mask 0 is all ones.
std::vector<std::vector<int>> hadamard_masks(int macro_n);

/// Reference field that is 1 outside the active zone of the layout and 0
/// inside it.
ComplexField border_reference(const Grid &grid, const MacroLayout &layout);

/// Phase-shifting measurement. For each Hadamard mask h and offset
/// theta_j = 2 pi j / phase_steps the camera records
/// I = |S ref + e^{i theta} S h|^2; the first Fourier coefficient over theta
/// yields E_h conj(E_ref), which is divided by |E_ref| from a reference-only
/// frame. Rows where the reference is dark are left at zero.
MeasuredTM measure_tm(const ScatteringMatrix &truth, const ComplexField &reference, const MacroLayout &layout,
                      int phase_steps = 4);

/// Right-multiplies by H^{-1} = H^t / macro_n^2.
MeasuredTM hadamard_to_pixel(const MeasuredTM &tm);
/// Inverse basis change (right-multiplication by H).
MeasuredTM pixel_to_hadamard(const MeasuredTM &tm);

/// Sums the truth columns over each macropixel of the layout.
CMatrix aggregate_truth(const ScatteringMatrix &truth, const MacroLayout &layout);

/// Relative Frobenius error after removing one optimal phase per output row.
double tm_error(const CMatrix &measured, const CMatrix &reference);
double tm_error(const MeasuredTM &measured, const ScatteringMatrix &truth, const MacroLayout &layout);

}  // namespace biphoton

#endif
