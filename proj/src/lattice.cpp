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

#include "biphoton/lattice.hpp"

#include <cmath>
#include <string>

namespace biphoton {

namespace {

using RowMajorC = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

int positive_mod(long long v, int n) {
    long long r = v % n;
    if (r < 0) r += n;
    return static_cast<int>(r);
}

// 1-D unitary DFT matrix. With `centered` the index origin sits at n/2 on
// both sides. Exponents are reduced modulo n in integer arithmetic so that
// the twiddles are exact table lookups.
CMatrix dft_matrix(int n, Direction direction, bool centered) {
    const double sgn = direction == Direction::forward ? -1.0 : 1.0;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    CVector table(n);
    for (int k = 0; k < n; ++k) {
        double ang = sgn * kTwoPi * static_cast<double>(k) / n;
        table[k] = cplx(std::cos(ang), std::sin(ang)) * scale;
    }
    const int h = centered ? n / 2 : 0;
    CMatrix f(n, n);
    for (int u = 0; u < n; ++u) {
        for (int x = 0; x < n; ++x) {
            long long e = static_cast<long long>(u - h) * (x - h);
            f(u, x) = table[positive_mod(e, n)];
        }
    }
    return f;
}

CVector apply_separable(const CMatrix &f, const CVector &values, int n) {
    Eigen::Map<const RowMajorC> v(values.data(), n, n);
    RowMajorC w = f * v * f.transpose();
    CVector out(values.size());
    Eigen::Map<RowMajorC>(out.data(), n, n) = w;
    return out;
}

}  // namespace

int wrap_offset(int v, int n) {
    const int h = n / 2;
    return positive_mod(static_cast<long long>(v) + h, n) - h;
}

int Grid::diff_offset(int a, int b) const {
    int v = a - b;
    return boundary == Boundary::circular ? wrap_offset(v, n) : v;
}

int Grid::sum_offset(int a, int b) const {
    if (boundary == Boundary::circular) return wrap_offset(a + b - 2 * center(), n);
    return a + b - (n - 1);
}

int Grid::offset(int a) const {
    int v = a - center();
    return boundary == Boundary::circular ? wrap_offset(v, n) : v;
}

Grid make_grid(int n, double pitch, Boundary boundary) {
    if (n < 2) fail("make_grid: n must be at least 2, got " + std::to_string(n));
    if (!(pitch > 0.0) || !std::isfinite(pitch)) fail("make_grid: pitch must be positive and finite");
    return Grid{n, pitch, boundary};
}

ComplexField zero_field(const Grid &grid) { return ComplexField{grid, CVector::Zero(grid.d())}; }

ComplexField dft2(const ComplexField &field, Direction direction) {
    if (field.grid.boundary != Boundary::circular) fail("dft2: linear-boundary grids are not periodic");
    const int n = field.grid.n;
    if (field.values.size() != field.grid.d()) fail("dft2: field length does not match grid");
    return ComplexField{field.grid, apply_separable(dft_matrix(n, direction, false), field.values, n)};
}

CVector centered_dft2(const CVector &values, int n, Direction direction) {
    if (values.size() != static_cast<Eigen::Index>(n) * n) fail("centered_dft2: length mismatch");
    return apply_separable(dft_matrix(n, direction, true), values, n);
}

CMatrix centered_dft2_columns(const CMatrix &columns, int n, Direction direction) {
    if (columns.rows() != static_cast<Eigen::Index>(n) * n) fail("centered_dft2_columns: row count mismatch");
    const CMatrix f = dft_matrix(n, direction, true);
    const CMatrix ft = f.transpose();
    CMatrix out(columns.rows(), columns.cols());
    RowMajorC tmp(n, n);
    for (Eigen::Index c = 0; c < columns.cols(); ++c) {
        Eigen::Map<const RowMajorC> v(columns.col(c).data(), n, n);
        tmp.noalias() = f * v;
        Eigen::Map<RowMajorC>(out.col(c).data(), n, n).noalias() = tmp * ft;
    }
    return out;
}

int SumCoordinateMap::axis_bin(int i, int j) const {
    if (mode == MapMode::circular) {
        return sign == MapSign::sum ? positive_mod(i + j, n) : positive_mod(i - j, n);
    }
    return sign == MapSign::sum ? i + j : i - j + (n - 1);
}

int SumCoordinateMap::bin(int pi, int pj) const {
    const int bx = axis_bin(pi % n, pj % n);
    const int by = axis_bin(pi / n, pj / n);
    return by * side() + bx;
}

int SumCoordinateMap::origin_axis() const {
    if (mode == MapMode::linear) return n - 1;
    return sign == MapSign::sum ? positive_mod(2 * (n / 2), n) : 0;
}

SumCoordinateMap sum_coordinate_map(const Grid &grid, MapMode mode, MapSign sign) {
    if (mode == MapMode::circular && grid.boundary != Boundary::circular) {
        fail("sum_coordinate_map: circular mode requires a circular grid");
    }
    if (mode == MapMode::linear && grid.boundary != Boundary::linear) {
        fail("sum_coordinate_map: linear mode requires a linear grid");
    }
    return SumCoordinateMap{grid.n, mode, sign};
}

ComplexField normalize(const ComplexField &field) {
    const double norm = field.values.norm();
    if (!(norm > 0.0)) fail("normalize: all-zero input");
    if (!std::isfinite(norm)) fail_numeric("normalize: non-finite input");
    return ComplexField{field.grid, field.values / norm};
}

std::vector<double> flatten(const RMatrix &img) {
    std::vector<double> out(static_cast<size_t>(img.size()));
    for (Eigen::Index y = 0; y < img.rows(); ++y)
        for (Eigen::Index x = 0; x < img.cols(); ++x) out[static_cast<size_t>(y * img.cols() + x)] = img(y, x);
    return out;
}

RMatrix unflatten(const std::vector<double> &values, int side) {
    if (values.size() != static_cast<size_t>(side) * side) fail("unflatten: length mismatch");
    RMatrix img(side, side);
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) img(y, x) = values[static_cast<size_t>(y) * side + x];
    return img;
}

}  // namespace biphoton
