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

#ifndef BIPHOTON_CORRELATE_HPP
#define BIPHOTON_CORRELATE_HPP

#include <string>

#include "biphoton/propagate.hpp"

namespace biphoton {

/// Sum- or difference-coordinate histogram. `values(y, x)` is indexed by the
/// raw bins of the SumCoordinateMap that produced it; `origin` is the bin of
/// the zero coordinate along each axis.
struct CorrelationImage {
    int side = 0;
    RMatrix values;
    MapSign projection = MapSign::sum;
    MapMode mode = MapMode::circular;
    int origin = 0;
    std::string scale_note;

    /// Copy rolled so that the zero coordinate sits at (side/2, side/2).
    RMatrix centered() const;
    double total() const { return values.sum(); }
};

G2Matrix g2_from_pure(const TwoPhotonPure &psi);

CorrelationImage project_sum(const G2Matrix &g2, const SumCoordinateMap &map);
CorrelationImage project_diff(const G2Matrix &g2, const SumCoordinateMap &map);

/// Builds an empty image with the geometry of `map`.
CorrelationImage empty_image(const SumCoordinateMap &map);

/// Center-aligned crop or zero-pad of a square image to `side`.
RMatrix center_resize(const RMatrix &img, int side);

/// Zero-mean normalized cross-correlation of two equally sized images.
double ncc(const RMatrix &a, const RMatrix &b);

/// NCC between the centered correlation image and a reference, both
/// max-normalized, after center-aligning the reference to the image side.
double fidelity_ncc(const CorrelationImage &img, const RMatrix &ref);

/// |t|^2 of an object as an image.
RMatrix intensity_image(const ObjectImage &object);

struct PeakMetrics {
    double center_value = 0.0;  // value at the zero coordinate
    double peak_value = 0.0;
    double fwhm_px = 0.0;
    double contrast = 0.0;  // std / mean over all bins
};

PeakMetrics peak_metrics(const CorrelationImage &img);
PeakMetrics peak_metrics(const RMatrix &centered_img);

}  // namespace biphoton

#endif
