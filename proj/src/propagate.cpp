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

#include "biphoton/propagate.hpp"

#include <string>

namespace biphoton {

namespace {

void check_dims(const ScatteringMatrix &s, Eigen::Index d_in, const char *who) {
    if (s.m.cols() != d_in) {
        fail(std::string(who) + ": matrix has " + std::to_string(s.m.cols()) + " columns, input has dimension " +
             std::to_string(d_in));
    }
}

RMatrix row_sums_as_image(const RVector &sums, int n) {
    RMatrix img(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) img(y, x) = sums[y * n + x];
    return img;
}

}  // namespace

ComplexField classical(const ScatteringMatrix &s, const ComplexField &e_in) {
    check_dims(s, e_in.values.size(), "classical");
    return ComplexField{s.grid_out, s.m * e_in.values};
}

CMatrix two_photon_raw(const ScatteringMatrix &s, const CMatrix &psi) {
    check_dims(s, psi.rows(), "two_photon");
    if (psi.rows() != psi.cols()) fail("two_photon: state matrix must be square");
    CMatrix tmp = s.m * psi;
    CMatrix out(s.m.rows(), s.m.rows());
    out.noalias() = tmp * s.m.transpose();
    return out;
}

TwoPhotonPure two_photon(const ScatteringMatrix &s, const TwoPhotonPure &psi) {
    CMatrix out = two_photon_raw(s, psi.psi);
    const double w = out.squaredNorm();
    if (!std::isfinite(w)) fail_numeric("two_photon: non-finite output");
    if (!(w > 0.0)) fail_numeric("two_photon: output state vanished");
    out /= std::sqrt(w);
    return TwoPhotonPure{s.grid_out, std::move(out), w * psi.weight};
}

G2Matrix mixed_g2(const ScatteringMatrix &s, const TwoPhotonMixed &rho) {
    if (rho.size() == 0) fail("mixed_g2: empty ensemble");
    check_dims(s, rho.phi.rows(), "mixed_g2");
    if (rho.phi.cols() != rho.size() || rho.chi.cols() != rho.size() || rho.chi.rows() != rho.phi.rows()) {
        fail("mixed_g2: inconsistent ensemble factors");
    }
    RMatrix a = (s.m * rho.phi).cwiseAbs2();
    RMatrix b = (s.m * rho.chi).cwiseAbs2();
    RMatrix g(s.m.rows(), s.m.rows());
    g.noalias() = a * rho.weights.asDiagonal() * b.transpose();
    return G2Matrix{s.grid_out, std::move(g)};
}

RMatrix singles_image(const TwoPhotonPure &psi) {
    return row_sums_as_image(psi.psi.cwiseAbs2().rowwise().sum(), psi.grid.n);
}

RMatrix singles_image(const G2Matrix &g2) { return row_sums_as_image(g2.values.rowwise().sum(), g2.grid.n); }

}  // namespace biphoton
