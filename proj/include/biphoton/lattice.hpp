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

#ifndef BIPHOTON_LATTICE_HPP
#define BIPHOTON_LATTICE_HPP

#include <vector>

#include "biphoton/common.hpp"

namespace biphoton {

enum class Boundary { circular, linear };

/// Square n x n sampling of the transverse plane.
///
/// Pixels are flattened row-major: index = y * n + x. The pixel that holds the
/// zero coordinate is `center()` along each axis.
struct Grid {
    int n = 0;
    double pitch = 1.0;
    Boundary boundary = Boundary::circular;

    int d() const { return n * n; }
    int center() const { return n / 2; }
    int index(int x, int y) const { return y * n + x; }
    int x_of(int idx) const { return idx % n; }
    int y_of(int idx) const { return idx / n; }

    /// Signed offset between two axis indices. Circular grids use the
    /// minimum-image convention.
    int diff_offset(int a, int b) const;
    /// Pixel offset of the coordinate sum c(a) + c(b) along one axis.
    int sum_offset(int a, int b) const;
    /// Pixel offset of index a from the grid center along one axis.
    int offset(int a) const;

    bool operator==(const Grid &o) const { return n == o.n && pitch == o.pitch && boundary == o.boundary; }
};

Grid make_grid(int n, double pitch, Boundary boundary);

/// Wraps an integer offset into the centered range [-n/2, n - n/2).
int wrap_offset(int v, int n);

struct ComplexField {
    Grid grid;
    CVector values;

    cplx &at(int x, int y) { return values[grid.index(x, y)]; }
    cplx at(int x, int y) const { return values[grid.index(x, y)]; }
};

ComplexField zero_field(const Grid &grid);

enum class Direction { forward, inverse };

/// Unitary 2-D DFT with the frequency origin at index 0.
ComplexField dft2(const ComplexField &field, Direction direction);

/// Unitary 2-D DFT with both the coordinate and the frequency origin at the
/// grid center (the action of an ideal 2f lens). Works on any boundary mode;
/// the result pitch is left untouched.
CVector centered_dft2(const CVector &values, int n, Direction direction);

/// Applies the centered DFT to every column of a d x k matrix.
CMatrix centered_dft2_columns(const CMatrix &columns, int n, Direction direction);

enum class MapMode { circular, linear };
enum class MapSign { sum, difference };

/// Binning rule that sends an (idler, signal) pixel pair to a bin of the sum
/// (or difference) coordinate image.
struct SumCoordinateMap {
    int n = 0;
    MapMode mode = MapMode::circular;
    MapSign sign = MapSign::sum;

    int side() const { return mode == MapMode::circular ? n : 2 * n - 1; }
    int bins() const { return side() * side(); }
    /// Bin along one axis for indices (i, j).
    int axis_bin(int i, int j) const;
    /// Flat bin for flattened pixel indices.
    int bin(int pi, int pj) const;
    /// Axis bin that holds the zero coordinate.
    int origin_axis() const;
    int origin() const { return origin_axis() * side() + origin_axis(); }
};

SumCoordinateMap sum_coordinate_map(const Grid &grid, MapMode mode, MapSign sign);

/// Returns the field scaled to unit l2 norm.
ComplexField normalize(const ComplexField &field);

/// Row-major flattening helpers for square images.
std::vector<double> flatten(const RMatrix &img);
RMatrix unflatten(const std::vector<double> &values, int side);

}  // namespace biphoton

#endif
