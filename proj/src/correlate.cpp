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

#include "biphoton/correlate.hpp"

#include <cmath>

namespace biphoton {

namespace {

CorrelationImage project(const G2Matrix &g2, const SumCoordinateMap &map, MapSign expected) {
    if (map.sign != expected) fail("projection: map sign does not match the requested projection");
    const Grid &g = g2.grid;
    if (map.n != g.n) fail("projection: map/grid size mismatch");
    if (g2.values.rows() != g.d() || g2.values.cols() != g.d()) fail("projection: G2 size mismatch");
    CorrelationImage img = empty_image(map);
    const int n = g.n, side = map.side();
    // Separable binning: precompute the per-axis bins.
    std::vector<int> bx(static_cast<size_t>(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) bx[static_cast<size_t>(a) * n + b] = map.axis_bin(a, b);
    double *out = img.values.data();  // column-major: (y, x) at x * side + y
    for (int s = 0; s < g.d(); ++s) {
        const int sx = s % n, sy = s / n;
        const double *col = g2.values.col(s).data();
        for (int i = 0; i < g.d(); ++i) {
            const int ix = i % n, iy = i / n;
            const int binx = bx[static_cast<size_t>(ix) * n + sx];
            const int biny = bx[static_cast<size_t>(iy) * n + sy];
            out[static_cast<size_t>(binx) * side + biny] += col[i];
        }
    }
    return img;
}

}  // namespace

RMatrix CorrelationImage::centered() const {
    if (mode == MapMode::linear) return values;
    const int shift = side / 2 - origin;
    RMatrix out(side, side);
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            const int yy = ((y + shift) % side + side) % side;
            const int xx = ((x + shift) % side + side) % side;
            out(yy, xx) = values(y, x);
        }
    }
    return out;
}

G2Matrix g2_from_pure(const TwoPhotonPure &psi) { return G2Matrix{psi.grid, psi.psi.cwiseAbs2()}; }

CorrelationImage empty_image(const SumCoordinateMap &map) {
    CorrelationImage img;
    img.side = map.side();
    img.values = RMatrix::Zero(img.side, img.side);
    img.projection = map.sign;
    img.mode = map.mode;
    img.origin = map.origin_axis();
    img.scale_note = map.sign == MapSign::sum ? "bin = pixel offset of r_i + r_s (raw sum, not the half-sum)"
                                              : "bin = pixel offset of r_i - r_s";
    return img;
}

CorrelationImage project_sum(const G2Matrix &g2, const SumCoordinateMap &map) {
    return project(g2, map, MapSign::sum);
}

CorrelationImage project_diff(const G2Matrix &g2, const SumCoordinateMap &map) {
    return project(g2, map, MapSign::difference);
}

RMatrix center_resize(const RMatrix &img, int side) {
    const int in_side = static_cast<int>(img.rows());
    RMatrix out = RMatrix::Zero(side, side);
    const int shift = in_side / 2 - side / 2;
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            const int yy = y + shift, xx = x + shift;
            if (yy >= 0 && xx >= 0 && yy < in_side && xx < in_side) out(y, x) = img(yy, xx);
        }
    }
    return out;
}

double ncc(const RMatrix &a, const RMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) fail("ncc: image sizes differ");
    const RMatrix za = a.array() - a.mean();
    const RMatrix zb = b.array() - b.mean();
    const double na = za.norm(), nb = zb.norm();
    if (!(na > 0.0) || !(nb > 0.0)) fail_numeric("ncc: zero-variance input");
    return za.cwiseProduct(zb).sum() / (na * nb);
}

double fidelity_ncc(const CorrelationImage &img, const RMatrix &ref) {
    RMatrix a = img.centered();
    RMatrix b = center_resize(ref, img.side);
    const double ma = a.maxCoeff(), mb = b.maxCoeff();
    if (ma > 0.0) a /= ma;
    if (mb > 0.0) b /= mb;
    return ncc(a, b);
}

RMatrix intensity_image(const ObjectImage &object) {
    RMatrix img(object.side, object.side);
    for (int y = 0; y < object.side; ++y)
        for (int x = 0; x < object.side; ++x) img(y, x) = object.at(x, y) * object.at(x, y);
    return img;
}

namespace {

double half_width(const RMatrix &img, int py, int px, int dy, int dx, double half) {
    const int side = static_cast<int>(img.rows());
    double prev = img(py, px);
    int step = 1;
    while (true) {
        const int y = py + dy * step, x = px + dx * step;
        if (y < 0 || x < 0 || y >= side || x >= side) return step - 1;
        const double v = img(y, x);
        if (v < half) return (step - 1) + (prev - half) / (prev - v);
        prev = v;
        ++step;
    }
}

}  // namespace

PeakMetrics peak_metrics(const RMatrix &img) {
    PeakMetrics m;
    Eigen::Index py = 0, px = 0;
    m.peak_value = img.maxCoeff(&py, &px);
    const double half = m.peak_value / 2.0;
    if (m.peak_value > 0.0) {
        const double wx = half_width(img, static_cast<int>(py), static_cast<int>(px), 0, 1, half) +
                          half_width(img, static_cast<int>(py), static_cast<int>(px), 0, -1, half);
        const double wy = half_width(img, static_cast<int>(py), static_cast<int>(px), 1, 0, half) +
                          half_width(img, static_cast<int>(py), static_cast<int>(px), -1, 0, half);
        m.fwhm_px = 0.5 * (wx + wy);
    }
    const double mean = img.mean();
    if (mean > 0.0) {
        const double var = (img.array() - mean).square().mean();
        m.contrast = std::sqrt(var) / mean;
    }
    const int c = static_cast<int>(img.rows()) / 2;
    m.center_value = img(c, c);
    return m;
}

PeakMetrics peak_metrics(const CorrelationImage &img) {
    PeakMetrics m = peak_metrics(img.centered());
    m.center_value = img.values(img.origin, img.origin);
    return m;
}

}  // namespace biphoton
