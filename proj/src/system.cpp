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

#include "biphoton/system.hpp"

namespace biphoton {

MediumKind parse_medium_kind(const std::string &name) {
    if (name == "none") return MediumKind::none;
    if (name == "thin") return MediumKind::thin;
    if (name == "random-phase") return MediumKind::random_phase;
    if (name == "thick") return MediumKind::thick;
    fail("unknown medium kind '" + name + "' (expected none, thin, random-phase or thick)");
}

std::string medium_kind_name(MediumKind kind) {
    switch (kind) {
        case MediumKind::none:
            return "none";
        case MediumKind::thin:
            return "thin";
        case MediumKind::random_phase:
            return "random-phase";
        case MediumKind::thick:
            return "thick";
    }
    return "unknown";
}

DeskSystem build_desk(const DeskParams &params) {
    if (params.n < 4) fail("desk: n must be at least 4");
    if (!(params.slm_pitch > 0.0 && params.f_in > 0.0 && params.f_out > 0.0)) {
        fail("desk: pitch and focal lengths must be positive");
    }
    params.optics.validate();
    const double lambda = params.optics.lambda;
    const int n = params.n;

    DeskSystem sys;
    sys.params = params;
    sys.slm = make_grid(n, params.slm_pitch, Boundary::circular);
    sys.input = make_grid(n, lambda * params.f_in / (n * params.slm_pitch), Boundary::circular);
    sys.medium_plane = sys.slm;
    sys.camera = make_grid(n, lambda * params.f_out / (n * params.slm_pitch), Boundary::circular);

    sys.lens_in = fourier_lens(sys.input, params.f_in, lambda);
    sys.lens_in.grid_out = sys.slm;

    switch (params.medium) {
        case MediumKind::none:
            sys.medium = identity_matrix(sys.medium_plane);
            break;
        case MediumKind::thin:
            sys.medium = thin_medium(sys.medium_plane, params.speckle);
            break;
        case MediumKind::random_phase: {
            ComplexField f = speckle_field(sys.medium_plane, params.speckle);
            for (auto &v : f.values) v = std::abs(v) > 0.0 ? v / std::abs(v) : cplx(1.0);
            sys.medium = ScatteringMatrix{sys.medium_plane, sys.medium_plane, f.values.asDiagonal(), "random-phase"};
            break;
        }
        case MediumKind::thick:
            sys.medium = thick_medium(sys.medium_plane, params.speckle);
            break;
    }

    // Two equal lenses image the SLM onto the medium with inversion; the last
    // lens maps the medium plane to the camera.
    const ScatteringMatrix relay = parity_matrix(sys.slm);
    ScatteringMatrix last = fourier_lens(sys.medium_plane, params.f_out, lambda);
    last.grid_out = sys.camera;
    sys.sm = compose({&last, &sys.medium, &relay});
    sys.sm_free = compose({&last, &relay});
    sys.sm.tag = "slm-to-camera";
    sys.sm_free.tag = "slm-to-camera-free";
    return sys;
}

ScatteringMatrix DeskSystem::chain(const PhaseMask &mask, bool with_medium) const {
    const ScatteringMatrix &s = with_medium ? sm : sm_free;
    const CVector dvec = slm_phases(mask, slm);
    ScatteringMatrix out;
    out.grid_in = input;
    out.grid_out = camera;
    out.m = s.m * (dvec.asDiagonal() * lens_in.m);
    out.tag = "chain";
    return out;
}

TwoPhotonPure DeskSystem::to_slm(const TwoPhotonPure &input_state) const {
    if (!(input_state.grid == input)) fail("desk: state is not on the input grid");
    TwoPhotonPure out = two_photon(lens_in, input_state);
    out.grid = slm;
    return out;
}

TwoPhotonMixed DeskSystem::to_slm(const TwoPhotonMixed &input_state) const {
    if (!(input_state.grid == input)) fail("desk: ensemble is not on the input grid");
    TwoPhotonMixed out = input_state;
    out.grid = slm;
    out.phi = lens_in.m * input_state.phi;
    out.chi = lens_in.m * input_state.chi;
    return out;
}

TwoPhotonPure DeskSystem::guide() const { return guide_state(params.spdc, params.optics.M_dprime, slm); }

TwoPhotonPure DeskSystem::diagonal_guide() const {
    SPDCParams p = params.spdc;
    p.sigma_r = 0.0;
    return guide_state(p, params.optics.M_dprime, slm);
}

TwoPhotonMixed DeskSystem::separable_guide() const {
    return to_slm(separable_guide_ensemble(params.spdc, params.optics, input));
}

TwoPhotonPure DeskSystem::object_state(const ObjectImage &object, bool exact) const {
    SPDCParams p = params.spdc;
    if (exact) p.sigma_r = 0.0;
    return input_plane_state(object, p, params.optics, input, params.encoding_magnification);
}

TwoPhotonMixed DeskSystem::object_ensemble(const ObjectImage &object) const {
    return separable_object_ensemble(object, params.spdc, params.optics, input, params.encoding_magnification);
}

RVector DeskSystem::guide_slm_intensity() const { return guide().psi.rowwise().squaredNorm(); }

namespace {

SumCoordinateMap map_for(const Grid &g, MapSign sign) {
    return sum_coordinate_map(g, g.boundary == Boundary::circular ? MapMode::circular : MapMode::linear, sign);
}

}  // namespace

CorrelationImage gamma_plus(const TwoPhotonPure &out) { return gamma_plus(g2_from_pure(out)); }

CorrelationImage gamma_plus(const G2Matrix &g2) { return project_sum(g2, map_for(g2.grid, MapSign::sum)); }

CorrelationImage gamma_minus(const TwoPhotonPure &out) {
    return project_diff(g2_from_pure(out), map_for(out.grid, MapSign::difference));
}

}  // namespace biphoton
