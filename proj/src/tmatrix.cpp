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

#include "biphoton/tmatrix.hpp"

#include <bit>
#include <cmath>

namespace biphoton {

namespace {

RMatrix hadamard_matrix(int order) {
    RMatrix h(order, order);
    for (int r = 0; r < order; ++r)
        for (int c = 0; c < order; ++c)
            h(r, c) = (std::popcount(static_cast<unsigned>(r & c)) & 1) ? -1.0 : 1.0;
    return h;
}

void check_order(int macro_n) {
    if (macro_n < 1) fail("hadamard: macro_n must be positive");
    const unsigned order = static_cast<unsigned>(macro_n) * static_cast<unsigned>(macro_n);
    if (!std::has_single_bit(order)) fail("hadamard: macro_n^2 must be a power of two");
}

}  // namespace

std::vector<std::vector<int>> hadamard_masks(int macro_n) {
    check_order(macro_n);
    const int order = macro_n * macro_n;
    std::vector<std::vector<int>> masks(static_cast<size_t>(order), std::vector<int>(static_cast<size_t>(order)));
    for (int k = 0; k < order; ++k)
        for (int m = 0; m < order; ++m) masks[k][m] = (std::popcount(static_cast<unsigned>(k & m)) & 1) ? -1 : 1;
    return masks;
}

ComplexField border_reference(const Grid &grid, const MacroLayout &layout) {
    if (layout.n != grid.n) fail("border_reference: layout does not match grid");
    ComplexField ref{grid, CVector::Ones(grid.d())};
    for (const auto &px : layout.pixels)
        for (int p : px) ref.values[p] = 0.0;
    return ref;
}

MeasuredTM measure_tm(const ScatteringMatrix &truth, const ComplexField &reference, const MacroLayout &layout,
                      int phase_steps) {
    if (phase_steps < 3) fail("measure_tm: at least 3 phase steps are required");
    if (truth.m.cols() != reference.values.size()) fail("measure_tm: reference does not match the matrix input");
    if (layout.n * layout.n != truth.m.cols()) fail("measure_tm: layout does not match the matrix input");
    check_order(layout.macro_n);
    const int order = layout.count();
    const auto masks = hadamard_masks(layout.macro_n);
    const Eigen::Index d_out = truth.m.rows();

    const CVector e_ref = truth.m * reference.values;
    const RVector ref_int = e_ref.cwiseAbs2();  // reference-only frame
    if (!(ref_int.maxCoeff() > 0.0)) fail("measure_tm: the reference field reaches no output pixel");

    MeasuredTM tm;
    tm.basis = TMBasis::hadamard;
    tm.phase_steps = phase_steps;
    tm.macro_n = layout.macro_n;
    tm.ref_intensity = ref_int;
    tm.m = CMatrix::Zero(d_out, order);

    const double dark = 1e-24 * std::max(ref_int.maxCoeff(), 1e-300);
    CVector field(truth.m.cols());
    for (int k = 0; k < order; ++k) {
        field.setZero();
        for (int m = 0; m < order; ++m)
            for (int p : layout.pixels[m]) field[p] = static_cast<double>(masks[k][m]);
        const CVector e_h = truth.m * field;
        CVector coeff = CVector::Zero(d_out);
        for (int j = 0; j < phase_steps; ++j) {
            const double theta = kTwoPi * j / phase_steps;
            const cplx phase = std::polar(1.0, theta);
            const RVector intensity = (e_ref + phase * e_h).cwiseAbs2();
            // I = |r|^2 + |h|^2 + 2 Re(e^{i theta} h conj(r)); the e^{-i theta}
            // projection isolates h conj(r).
            coeff += intensity * std::conj(phase);
        }
        coeff /= static_cast<double>(phase_steps);
        for (Eigen::Index r = 0; r < d_out; ++r) {
            tm.m(r, k) = ref_int[r] > dark ? coeff[r] / std::sqrt(ref_int[r]) : cplx(0.0);
        }
    }
    return tm;
}

MeasuredTM hadamard_to_pixel(const MeasuredTM &tm) {
    if (tm.basis != TMBasis::hadamard) fail("hadamard_to_pixel: matrix is not in the Hadamard basis");
    const int order = static_cast<int>(tm.m.cols());
    MeasuredTM out = tm;
    out.m = tm.m * (hadamard_matrix(order).transpose() / static_cast<double>(order)).cast<cplx>();
    out.basis = TMBasis::pixel;
    return out;
}

MeasuredTM pixel_to_hadamard(const MeasuredTM &tm) {
    if (tm.basis != TMBasis::pixel) fail("pixel_to_hadamard: matrix is not in the pixel basis");
    const int order = static_cast<int>(tm.m.cols());
    MeasuredTM out = tm;
    out.m = tm.m * hadamard_matrix(order).cast<cplx>();
    out.basis = TMBasis::hadamard;
    return out;
}

CMatrix aggregate_truth(const ScatteringMatrix &truth, const MacroLayout &layout) {
    if (layout.n * layout.n != truth.m.cols()) fail("aggregate_truth: layout does not match the matrix input");
    CMatrix agg = CMatrix::Zero(truth.m.rows(), layout.count());
    for (int m = 0; m < layout.count(); ++m)
        for (int p : layout.pixels[m]) agg.col(m) += truth.m.col(p);
    return agg;
}

double tm_error(const CMatrix &measured, const CMatrix &reference) {
    if (measured.rows() != reference.rows() || measured.cols() != reference.cols()) {
        fail("tm_error: shape mismatch");
    }
    const double ref_norm = reference.norm();
    if (!(ref_norm > 0.0)) fail("tm_error: zero reference matrix");
    double err2 = 0.0;
    for (Eigen::Index r = 0; r < measured.rows(); ++r) {
        const cplx overlap = (measured.row(r).conjugate().cwiseProduct(reference.row(r))).sum();
        const cplx rot = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx(1.0);
        err2 += (measured.row(r) * rot - reference.row(r)).squaredNorm();
    }
    return std::sqrt(err2) / ref_norm;
}

double tm_error(const MeasuredTM &measured, const ScatteringMatrix &truth, const MacroLayout &layout) {
    if (measured.basis != TMBasis::pixel) fail("tm_error: measured matrix must be in the pixel basis");
    return tm_error(measured.m, aggregate_truth(truth, layout));
}

}  // namespace biphoton
