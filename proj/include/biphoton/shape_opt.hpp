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

#ifndef BIPHOTON_SHAPE_OPT_HPP
#define BIPHOTON_SHAPE_OPT_HPP

#include <memory>
#include <utility>
#include <vector>

#include "biphoton/correlate.hpp"
#include "biphoton/tmatrix.hpp"

namespace biphoton {

enum class Feedback { analytic, sampled };
enum class InitMode { zero, random };

/// Camera-in-the-loop emulation: each phase sample is a Poisson draw of the
/// coincidences collected in the target bin(s) during one exposure.
struct SampledFeedback {
    double pair_rate = 2e4;  // detected pairs per second
    double noise_rate = 0.0;  // uncorrelated singles per second
    double exposure_s = 3.0;
    double window_ns = 6.0;
};

struct OptConfig {
    int phase_samples = 7;
    /// Explicit sweep phases; overrides phase_samples when non-empty.
    std::vector<double> phases;
    int max_steps = 1500;
    /// Flat output bin of the sum-coordinate image; -1 selects the origin.
    int target_bin = -1;
    /// Sum the 3 x 3 block of bins around the target.
    bool target_3x3 = false;
    Feedback feedback = Feedback::analytic;
    SampledFeedback sampling;
    std::uint64_t seed = 1;
    double fraction = 0.5;
    int plateau_window = 200;
    double plateau_tol = 1e-4;
    InitMode init = InitMode::zero;

    std::vector<double> sweep_phases() const;
};

/// The six-value sweep {0, pi/3, ..., 5pi/3}.
std::vector<double> six_step_phases();

struct DoubleCosineFit {
    double a = 0, theta_a = 0, b = 0, theta_b = 0, c = 0;
    double theta_opt = 0;
    double rms_residual = 0;

    double operator()(double theta) const;
};

/// Least-squares fit of a cos(t + ta) + b cos(2t + tb) + c with a, b >= 0;
/// theta_opt maximizes the model on a 1e-3 rad grid.
DoubleCosineFit fit_double_cosine(const std::vector<double> &theta, const std::vector<double> &values);

struct StepRecord {
    int step = 0;
    double theta_opt = 0;
    double objective = 0;
    double best = 0;
    double measured = 0;  // fitted value at theta_opt
    DoubleCosineFit fit;
};

struct OptTrace {
    double initial_objective = 0;
    std::vector<StepRecord> steps;
    bool plateau = false;

    double best() const;
    std::string to_csv() const;
};

struct OptResult {
    PhaseMask mask;
    OptTrace trace;
};

/// Psi_out = (S_m D) Psi (S_m D)^t, unnormalized.
CMatrix propagate_slm_raw(const ScatteringMatrix &sm, const PhaseMask &mask, const CMatrix &psi_slm);
TwoPhotonPure propagate_slm(const ScatteringMatrix &sm, const PhaseMask &mask, const TwoPhotonPure &psi_slm);

/// Output pixel pairs (i, s) whose sum coordinate falls in the target set.
std::vector<std::pair<int, int>> target_pairs(const Grid &out_grid, int target_bin, bool block3x3);

/// Objective evaluated by brute force through propagate_slm.
double direct_objective(const ScatteringMatrix &sm, const PhaseMask &mask, const TwoPhotonPure &psi_slm,
                        int target_bin = -1, bool block3x3 = false);

/// Gamma(theta) = c0 + 2 Re(c1 e^{i theta}) + 2 Re(c2 e^{2 i theta}).
struct TrigCoefficients {
    double c0 = 0;
    cplx c1 = 0, c2 = 0;
    double operator()(double theta) const;
};

/// Incremental evaluator of the target objective as a function of a phase
/// offset applied to a subset of SLM pixels.
class PartitionObjective {
   public:
    virtual ~PartitionObjective() = default;
    virtual void set_mask(const PhaseMask &mask) = 0;
    virtual double value() = 0;
    /// Coefficients of the objective versus a phase offset on `pixels`.
    virtual TrigCoefficients coefficients(const std::vector<int> &pixels) = 0;
    /// Applies the offset used in the last call to coefficients().
    virtual void apply(double theta) = 0;
};

std::unique_ptr<PartitionObjective> make_objective(const ScatteringMatrix &sm, const TwoPhotonPure &psi_slm,
                                                   int target_bin = -1, bool block3x3 = false);
std::unique_ptr<PartitionObjective> make_objective(const ScatteringMatrix &sm, const TwoPhotonMixed &rho_slm,
                                                   int target_bin = -1, bool block3x3 = false);

/// Objective samples for each phase offset of the partition (macropixel
/// indices); the mask is left unchanged.
std::vector<std::pair<double, double>> sweep_partition(const ScatteringMatrix &sm, const TwoPhotonPure &psi_slm,
                                                       const PhaseMask &mask, const std::vector<int> &partition,
                                                       const std::vector<double> &phases, int target_bin = -1);

OptResult optimize(const ScatteringMatrix &sm, const TwoPhotonPure &psi_slm, const MacroLayout &layout,
                   const OptConfig &cfg);
OptResult optimize(const ScatteringMatrix &sm, const TwoPhotonMixed &rho_slm, const MacroLayout &layout,
                   const OptConfig &cfg);
/// Runs the loop on any objective.
OptResult optimize(PartitionObjective &objective, const MacroLayout &layout, const OptConfig &cfg);

struct IdentityMask {
    PhaseMask mask;
    std::vector<int> unlit;  // macropixels with a vanishing row entry
};

/// Phase conjugation of the row of S_m that feeds `target_pixel`.
IdentityMask identity_mask(const ScatteringMatrix &sm, const MacroLayout &layout, int target_pixel);
/// Same from a measured matrix in the macropixel (pixel) basis.
IdentityMask identity_mask(const MeasuredTM &tm, const MacroLayout &layout, int target_pixel);

/// Per-macropixel |sum of the S_m row entries| times the mean SLM-plane
/// illumination amplitude.
std::vector<double> macropixel_weights(const ScatteringMatrix &sm, const MacroLayout &layout, int target_pixel,
                                       const RVector &slm_intensity);

/// Macropixels whose illumination is at least `illum_frac` of the maximum and
/// whose row energy is at least `row_frac` of the mean.
std::vector<int> lit_macropixels(const ScatteringMatrix &sm, const MacroLayout &layout, int target_pixel,
                                 const RVector &slm_intensity, double illum_frac = 0.1, double row_frac = 0.1);

/// Per-macropixel mean of a per-pixel intensity.
std::vector<double> macropixel_mean(const MacroLayout &layout, const RVector &pixel_values);

struct SolutionDistance {
    std::vector<double> histogram;  // weighted, bins over (-pi, pi]
    double mu1 = 0, mu2 = 0;
    double weight1 = 0, weight2 = 0;
    double sigma1 = 0, sigma2 = 0;
    double separation = 0;  // circular distance between the two peaks
    bool degenerate = false;
};

SolutionDistance solution_distance(const PhaseMask &a, const PhaseMask &b, const std::vector<double> &weights,
                                   int bins = 72);

/// |weighted mean of exp(i (phi_a - phi_b))|; 1 for masks equal up to a
/// global phase.
double mask_correlation(const PhaseMask &a, const PhaseMask &b, const std::vector<double> &weights);

/// Weighted circular standard deviation of the wrapped phase difference.
double circular_std(const PhaseMask &a, const PhaseMask &b, const std::vector<double> &weights);

}  // namespace biphoton

#endif
