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

#ifndef BIPHOTON_SYSTEM_HPP
#define BIPHOTON_SYSTEM_HPP

#include <string>

#include "biphoton/shape_opt.hpp"
#include "biphoton/states.hpp"

namespace biphoton {

enum class MediumKind { none, thin, random_phase, thick };

MediumKind parse_medium_kind(const std::string &name);
std::string medium_kind_name(MediumKind kind);

/// Lens-relayed bench: input plane -> lens (f_in) -> SLM -> lens -> lens ->
/// medium -> lens -> camera. All planes share one n x n circular lattice;
/// pitches follow from the lens law.
struct DeskParams {
    int n = 32;
    double slm_pitch = 100e-6;
    double f_in = 150e-3;   // lens between the input plane and the SLM
    double f_out = 150e-3;  // lenses after the SLM
    double encoding_magnification = 1.0;
    OpticalConfig optics = OpticalConfig::defaults();
    SPDCParams spdc = SPDCParams::defaults();
    MediumKind medium = MediumKind::thin;
    SpeckleSpec speckle;
};

struct DeskSystem {
    DeskParams params;
    Grid input;   // object plane in front of the SLM lens
    Grid slm;
    Grid medium_plane;
    Grid camera;
    ScatteringMatrix lens_in;  // input -> SLM
    ScatteringMatrix medium;   // on medium_plane
    ScatteringMatrix sm;       // SLM -> camera, with the medium
    ScatteringMatrix sm_free;  // SLM -> camera, medium removed

    /// Camera pixel at the zero coordinate.
    int target_pixel() const { return camera.index(camera.center(), camera.center()); }

    /// Full transformation S' = S_m D lens_in.
    ScatteringMatrix chain(const PhaseMask &mask, bool with_medium = true) const;

    TwoPhotonPure to_slm(const TwoPhotonPure &input_state) const;
    TwoPhotonMixed to_slm(const TwoPhotonMixed &input_state) const;

    /// Guide state at the SLM plane (magnification M'').
    TwoPhotonPure guide() const;
    /// Same with an exactly diagonal difference profile.
    TwoPhotonPure diagonal_guide() const;
    /// Separable guide ensemble rho_0 carried to the SLM plane.
    TwoPhotonMixed separable_guide() const;

    /// Sum-encoded object state in the input plane; exact = delta-correlated.
    TwoPhotonPure object_state(const ObjectImage &object, bool exact) const;
    /// Classical ensemble rho_t in the input plane.
    TwoPhotonMixed object_ensemble(const ObjectImage &object) const;

    /// Per-pixel SLM intensity of the guide state.
    RVector guide_slm_intensity() const;
};

DeskSystem build_desk(const DeskParams &params);

/// Sum-coordinate image of a pure state on the camera grid.
CorrelationImage gamma_plus(const TwoPhotonPure &out);
CorrelationImage gamma_plus(const G2Matrix &g2);
CorrelationImage gamma_minus(const TwoPhotonPure &out);

}  // namespace biphoton

#endif
