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

#ifndef BIPHOTON_PROPAGATE_HPP
#define BIPHOTON_PROPAGATE_HPP

#include <vector>

#include "biphoton/media.hpp"
#include "biphoton/states.hpp"

namespace biphoton {

/// Second-order correlation G2(i, s) over idler/signal pixels.
struct G2Matrix {
    Grid grid;
    RMatrix values;
};

/// E_out = S E_in.
ComplexField classical(const ScatteringMatrix &s, const ComplexField &e_in);

/// S Psi S^t with the plain transpose, without renormalization.
CMatrix two_photon_raw(const ScatteringMatrix &s, const CMatrix &psi);

/// Normalized S Psi S^t; `weight` holds the squared norm before
/// renormalization times the input weight.
TwoPhotonPure two_photon(const ScatteringMatrix &s, const TwoPhotonPure &psi);

/// G2(i, s) = sum_R p_R |(S phi_R)(i)|^2 |(S chi_R)(s)|^2.
G2Matrix mixed_g2(const ScatteringMatrix &s, const TwoPhotonMixed &rho);

/// Direct-intensity marginal I(r) = sum_s |psi(r, s)|^2, as an n x n image.
RMatrix singles_image(const TwoPhotonPure &psi);
RMatrix singles_image(const G2Matrix &g2);

}  // namespace biphoton

#endif
