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

#include "biphoton/shape_opt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include <Eigen/QR>

namespace biphoton {

std::vector<double> OptConfig::sweep_phases() const {
    if (!phases.empty()) return phases;
    std::vector<double> out(static_cast<size_t>(std::max(phase_samples, 0)));
    for (int j = 0; j < phase_samples; ++j) out[j] = kTwoPi * j / phase_samples;
    return out;
}

std::vector<double> six_step_phases() {
    std::vector<double> out(6);
    for (int j = 0; j < 6; ++j) out[j] = kPi * j / 3.0;
    return out;
}

double DoubleCosineFit::operator()(double theta) const {
    return a * std::cos(theta + theta_a) + b * std::cos(2.0 * theta + theta_b) + c;
}

DoubleCosineFit fit_double_cosine(const std::vector<double> &theta, const std::vector<double> &values) {
    if (theta.size() != values.size()) fail("fit_double_cosine: theta and values differ in length");
    if (theta.size() < 5) fail("fit_double_cosine: at least 5 samples are required");
    const Eigen::Index m = static_cast<Eigen::Index>(theta.size());
    RMatrix design(m, 5);
    RVector rhs(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const double t = theta[k];
        if (!std::isfinite(t) || !std::isfinite(values[k])) fail_numeric("fit_double_cosine: non-finite sample");
        design(k, 0) = std::cos(t);
        design(k, 1) = std::sin(t);
        design(k, 2) = std::cos(2.0 * t);
        design(k, 3) = std::sin(2.0 * t);
        design(k, 4) = 1.0;
        rhs[k] = values[k];
    }
    Eigen::ColPivHouseholderQR<RMatrix> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < 5) fail("fit_double_cosine: rank-deficient design (repeated phases?)");
    const RVector x = qr.solve(rhs);

    // alpha cos t + beta sin t = a cos(t + ta) with alpha = a cos ta, beta = -a sin ta.
    DoubleCosineFit fit;
    fit.a = std::hypot(x[0], x[1]);
    fit.theta_a = fit.a > 0.0 ? wrap_signed_phase(std::atan2(-x[1], x[0])) : 0.0;
    fit.b = std::hypot(x[2], x[3]);
    fit.theta_b = fit.b > 0.0 ? wrap_signed_phase(std::atan2(-x[3], x[2])) : 0.0;
    fit.c = x[4];
    fit.rms_residual = std::sqrt((design * x - rhs).squaredNorm() / static_cast<double>(m));

    const int grid = static_cast<int>(std::ceil(kTwoPi / 1e-3));
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < grid; ++k) {
        const double t = k * 1e-3;
        const double v = fit(t);
        if (v > best) {
            best = v;
            fit.theta_opt = t;
        }
    }
    return fit;
}

double OptTrace::best() const {
    double b = initial_objective;
    for (const auto &s : steps) b = std::max(b, s.objective);
    return b;
}

std::string OptTrace::to_csv() const {
    std::string out = "step,theta_opt,objective,a,theta_a,b,theta_b,c\n";
    char buf[512];
    for (const auto &s : steps) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.step, s.theta_opt,
                      s.objective, s.fit.a, s.fit.theta_a, s.fit.b, s.fit.theta_b, s.fit.c);
        out += buf;
    }
    return out;
}

namespace {

void check_slm(const ScatteringMatrix &sm, const PhaseMask &mask, Eigen::Index psi_rows, Eigen::Index psi_cols) {
    const Eigen::Index d = sm.m.cols();
    if (psi_rows != d || psi_cols != d) fail("propagate_slm: state does not match the matrix input");
    if (mask.layout.n * mask.layout.n != d) fail("propagate_slm: mask layout does not match the SLM grid");
}

inline cplx cmul(cplx a, cplx b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace

CMatrix propagate_slm_raw(const ScatteringMatrix &sm, const PhaseMask &mask, const CMatrix &psi_slm) {
    check_slm(sm, mask, psi_slm.rows(), psi_slm.cols());
    const CVector dvec = slm_phases(mask, sm.grid_in);
    // D Psi D^t as a row and column scaling.
    const CMatrix scaled = dvec.asDiagonal() * psi_slm * dvec.asDiagonal();
    return two_photon_raw(sm, scaled);
}

TwoPhotonPure propagate_slm(const ScatteringMatrix &sm, const PhaseMask &mask, const TwoPhotonPure &psi_slm) {
    if (!(psi_slm.grid == sm.grid_in)) fail("propagate_slm: state grid does not match the matrix input grid");
    TwoPhotonPure in = psi_slm;
    check_slm(sm, mask, in.psi.rows(), in.psi.cols());
    const CVector dvec = slm_phases(mask, sm.grid_in);
    in.psi = dvec.asDiagonal() * psi_slm.psi * dvec.asDiagonal();
    return two_photon(sm, in);
}

std::vector<std::pair<int, int>> target_pairs(const Grid &out_grid, int target_bin, bool block3x3) {
    const MapMode mode = out_grid.boundary == Boundary::circular ? MapMode::circular : MapMode::linear;
    const SumCoordinateMap map = sum_coordinate_map(out_grid, mode, MapSign::sum);
    const int side = map.side();
    const int target = target_bin < 0 ? map.origin() : target_bin;
    if (target >= map.bins()) fail("target_pairs: target bin outside the correlation image");
    std::vector<char> wanted(static_cast<size_t>(map.bins()), 0);
    const int ty = target / side, tx = target % side;
    const int reach = block3x3 ? 1 : 0;
    for (int dy = -reach; dy <= reach; ++dy) {
        for (int dx = -reach; dx <= reach; ++dx) {
            int y = ty + dy, x = tx + dx;
            if (mode == MapMode::circular) {
                y = (y % side + side) % side;
                x = (x % side + side) % side;
            } else if (y < 0 || x < 0 || y >= side || x >= side) {
                continue;
            }
            wanted[static_cast<size_t>(y * side + x)] = 1;
        }
    }
    std::vector<std::pair<int, int>> pairs;
    const int d = out_grid.d();
    for (int i = 0; i < d; ++i)
        for (int s = 0; s < d; ++s)
            if (wanted[static_cast<size_t>(map.bin(i, s))]) pairs.emplace_back(i, s);
    return pairs;
}

double direct_objective(const ScatteringMatrix &sm, const PhaseMask &mask, const TwoPhotonPure &psi_slm,
                        int target_bin, bool block3x3) {
    const CMatrix out = propagate_slm_raw(sm, mask, psi_slm.psi);
    double total = 0.0;
    for (const auto &[i, s] : target_pairs(sm.grid_out, target_bin, block3x3)) total += std::norm(out(i, s));
    return total;
}

double TrigCoefficients::operator()(double theta) const {
    const cplx e = std::polar(1.0, theta);
    return c0 + 2.0 * (c1 * e).real() + 2.0 * (c2 * e * e).real();
}

namespace {

std::vector<int> pixels_of(const MacroLayout &layout, const std::vector<int> &macros) {
    std::vector<int> px;
    for (int m : macros) {
        if (m < 0 || m >= layout.count()) fail("partition: macropixel index out of range");
        px.insert(px.end(), layout.pixels[m].begin(), layout.pixels[m].end());
    }
    return px;
}

/// Pure-state engine. X = A Psi A^t with A = S_m D restricted to the target
/// pairs; with the partition offset e = exp(i theta) the entries become
/// X0 + e X1 + e^2 X2, so the objective is a trigonometric polynomial of
/// degree two.
class PureObjective final : public PartitionObjective {
   public:
    PureObjective(const ScatteringMatrix &sm, const CMatrix &psi, int target_bin, bool block3x3)
        : sm_(sm.m), grid_(sm.grid_in), pairs_(target_pairs(sm.grid_out, target_bin, block3x3)) {
        const Eigen::Index d = sm.m.cols();
        if (psi.rows() != d || psi.cols() != d) fail("objective: state does not match the matrix input");
        const double cut = 1e-14 * psi.cwiseAbs().maxCoeff();
        long nnz = 0;
        for (Eigen::Index p = 0; p < d; ++p)
            for (Eigen::Index q = 0; q < d; ++q) nnz += std::abs(psi(p, q)) > cut;
        dense_ = static_cast<double>(nnz) > 0.1 * static_cast<double>(d) * static_cast<double>(d);
        if (dense_) {
            psi_t_ = psi.transpose();
        } else {
            rows_.resize(static_cast<size_t>(d));
            for (Eigen::Index p = 0; p < d; ++p)
                for (Eigen::Index q = 0; q < d; ++q)
                    if (std::abs(psi(p, q)) > cut) rows_[p].emplace_back(static_cast<int>(q), psi(p, q));
        }
    }

    void set_mask(const PhaseMask &mask) override {
        if (mask.layout.n != grid_.n) fail("objective: mask layout does not match the SLM grid");
        const CVector dvec = slm_phases(mask, grid_);
        at_ = (sm_ * dvec.asDiagonal()).transpose();
        refresh();
    }

    double value() override {
        double total = 0.0;
        for (const auto &[i, s] : pairs_) total += std::norm((bt_.col(i).transpose() * at_.col(s)).value());
        return total;
    }

    TrigCoefficients coefficients(const std::vector<int> &pixels) override {
        if (pixels.empty()) fail("objective: empty partition");
        part_ = pixels;
        const Eigen::Index d = at_.rows(), d_out = at_.cols();
        chi_.setZero(d);
        for (int p : part_) chi_[p] = 1.0;
        if (dense_) {
            // B_P^t = Psi^t[:, P] A^t[P, :]
            const Eigen::Index np = static_cast<Eigen::Index>(part_.size());
            CMatrix psi_cols(d, np), at_rows(np, d_out);
            for (Eigen::Index k = 0; k < np; ++k) {
                psi_cols.col(k) = psi_t_.col(part_[k]);
                at_rows.row(k) = at_.row(part_[k]);
            }
            btp_.noalias() = psi_cols * at_rows;
        } else {
            btp_.setZero(d, d_out);
            for (Eigen::Index i = 0; i < d_out; ++i) {
                cplx *dst = btp_.col(i).data();
                const cplx *src = at_.col(i).data();
                for (int p : part_) {
                    const cplx a = src[p];
                    for (const auto &[q, v] : rows_[p]) dst[q] += cmul(v, a);
                }
            }
        }

        TrigCoefficients c;
        for (const auto &[i, s] : pairs_) {
            const auto v = at_.col(s).array();
            const auto w = bt_.col(i).array() * v;
            const auto wp = btp_.col(i).array() * v;
            const cplx s1 = w.sum(), s2 = (w * chi_.array()).sum();
            const cplx s3 = wp.sum(), s4 = (wp * chi_.array()).sum();
            const cplx x0 = s1 - s2 - s3 + s4;
            const cplx x1 = (s2 - s4) + (s3 - s4);
            const cplx x2 = s4;
            c.c0 += std::norm(x0) + std::norm(x1) + std::norm(x2);
            c.c1 += x1 * std::conj(x0) + x2 * std::conj(x1);
            c.c2 += x2 * std::conj(x0);
        }
        return c;
    }

    void apply(double theta) override {
        if (part_.empty()) fail("objective: apply() without a partition");
        const cplx e = std::polar(1.0, theta);
        for (int p : part_) at_.row(p) *= e;
        bt_ += (e - 1.0) * btp_;
        part_.clear();
        if (++applied_ % kRefresh == 0) refresh();
    }

   private:
    static constexpr int kRefresh = 64;

    void refresh() {
        if (dense_) {
            bt_.noalias() = psi_t_ * at_;
            return;
        }
        const Eigen::Index d = at_.rows(), d_out = at_.cols();
        bt_.setZero(d, d_out);
        for (Eigen::Index i = 0; i < d_out; ++i) {
            cplx *dst = bt_.col(i).data();
            const cplx *src = at_.col(i).data();
            for (Eigen::Index p = 0; p < d; ++p) {
                const cplx a = src[p];
                if (a == 0.0) continue;
                for (const auto &[q, v] : rows_[p]) dst[q] += cmul(v, a);
            }
        }
    }

    CMatrix sm_;
    Grid grid_;
    std::vector<std::pair<int, int>> pairs_;
    std::vector<std::vector<std::pair<int, cplx>>> rows_;
    CMatrix at_, bt_, btp_;  // (S_m D)^t, (S_m D Psi)^t, partition part
    Eigen::VectorXd chi_;    // partition indicator
    CMatrix psi_t_;  // dense path only
    bool dense_ = false;
    std::vector<int> part_;
    long applied_ = 0;
};

/// Separable-ensemble engine. Each term contributes
/// |(A phi)_i|^2 |(A chi)_s|^2, and each factor is quadratic in e^{i theta}.
class MixedObjective final : public PartitionObjective {
   public:
    MixedObjective(const ScatteringMatrix &sm, const TwoPhotonMixed &rho, int target_bin, bool block3x3)
        : sm_(sm.m), grid_(sm.grid_in), weights_(rho.weights), phi_(rho.phi), chi_(rho.chi) {
        const Eigen::Index d = sm.m.cols();
        if (phi_.rows() != d || chi_.rows() != d || phi_.cols() != weights_.size() ||
            chi_.cols() != weights_.size()) {
            fail("objective: ensemble does not match the matrix input");
        }
        for (const auto &[i, s] : target_pairs(sm.grid_out, target_bin, block3x3)) {
            rows_i_.push_back(i);
            rows_s_.push_back(s);
        }
    }

    void set_mask(const PhaseMask &mask) override {
        if (mask.layout.n != grid_.n) fail("objective: mask layout does not match the SLM grid");
        a_ = sm_ * slm_phases(mask, grid_).asDiagonal();
        u_ = a_ * phi_;
        w_ = a_ * chi_;
    }

    double value() override {
        double total = 0.0;
        for (size_t k = 0; k < rows_i_.size(); ++k) {
            total += (u_.row(rows_i_[k]).cwiseAbs2().cwiseProduct(w_.row(rows_s_[k]).cwiseAbs2()) *
                      weights_)(0, 0);
        }
        return total;
    }

    TrigCoefficients coefficients(const std::vector<int> &pixels) override {
        if (pixels.empty()) fail("objective: empty partition");
        part_ = pixels;
        const Eigen::Index np = static_cast<Eigen::Index>(part_.size());
        CMatrix ap(a_.rows(), np), phip(np, phi_.cols()), chip(np, chi_.cols());
        for (Eigen::Index k = 0; k < np; ++k) {
            ap.col(k) = a_.col(part_[k]);
            phip.row(k) = phi_.row(part_[k]);
            chip.row(k) = chi_.row(part_[k]);
        }
        up_.noalias() = ap * phip;
        wp_.noalias() = ap * chip;

        TrigCoefficients c;
        const Eigen::Index kk = weights_.size();
        for (size_t k = 0; k < rows_i_.size(); ++k) {
            const int i = rows_i_[k], s = rows_s_[k];
            for (Eigen::Index r = 0; r < kk; ++r) {
                const double p = weights_[r];
                if (p == 0.0) continue;
                const cplx up = up_(i, r), uq = u_(i, r) - up;
                const cplx wp = wp_(s, r), wq = w_(s, r) - wp;
                const double a0 = std::norm(uq) + std::norm(up), b0 = std::norm(wq) + std::norm(wp);
                const cplx a1 = up * std::conj(uq), b1 = wp * std::conj(wq);
                c.c0 += p * (a0 * b0 + 2.0 * (a1 * std::conj(b1)).real());
                c.c1 += p * (a1 * b0 + a0 * b1);
                c.c2 += p * (a1 * b1);
            }
        }
        return c;
    }

    void apply(double theta) override {
        if (part_.empty()) fail("objective: apply() without a partition");
        const cplx e = std::polar(1.0, theta);
        for (int p : part_) a_.col(p) *= e;
        u_ += (e - 1.0) * up_;
        w_ += (e - 1.0) * wp_;
        part_.clear();
        if (++applied_ % 64 == 0) {
            u_ = a_ * phi_;
            w_ = a_ * chi_;
        }
    }

   private:
    CMatrix sm_;
    Grid grid_;
    RVector weights_;
    CMatrix phi_, chi_;
    std::vector<int> rows_i_, rows_s_;
    CMatrix a_, u_, w_, up_, wp_;
    std::vector<int> part_;
    long applied_ = 0;
};

}  // namespace

std::unique_ptr<PartitionObjective> make_objective(const ScatteringMatrix &sm, const TwoPhotonPure &psi_slm,
                                                   int target_bin, bool block3x3) {
    if (!(psi_slm.grid == sm.grid_in)) fail("objective: state grid does not match the matrix input grid");
    return std::make_unique<PureObjective>(sm, psi_slm.psi, target_bin, block3x3);
}

std::unique_ptr<PartitionObjective> make_objective(const ScatteringMatrix &sm, const TwoPhotonMixed &rho_slm,
                                                   int target_bin, bool block3x3) {
    if (!(rho_slm.grid == sm.grid_in)) fail("objective: state grid does not match the matrix input grid");
    return std::make_unique<MixedObjective>(sm, rho_slm, target_bin, block3x3);
}

std::vector<std::pair<double, double>> sweep_partition(const ScatteringMatrix &sm, const TwoPhotonPure &psi_slm,
                                                       const PhaseMask &mask, const std::vector<int> &partition,
                                                       const std::vector<double> &phases, int target_bin) {
    if (partition.empty()) fail("sweep_partition: empty partition");
    auto obj = make_objective(sm, psi_slm, target_bin, false);
    obj->set_mask(mask);
    const TrigCoefficients c = obj->coefficients(pixels_of(mask.layout, partition));
    std::vector<std::pair<double, double>> out;
    out.reserve(phases.size());
    for (double t : phases) out.emplace_back(t, c(t));
    return out;
}

OptResult optimize(PartitionObjective &objective, const MacroLayout &layout, const OptConfig &cfg) {
    const std::vector<double> thetas = cfg.sweep_phases();
    if (thetas.size() < 5) fail("optimize: at least 5 phase samples are required");
    if (cfg.max_steps < 1) fail("optimize: max_steps must be at least 1");
    if (!(cfg.fraction > 0.0 && cfg.fraction <= 1.0)) fail("optimize: partition fraction must lie in (0, 1]");
    if (layout.count() < 1) fail("optimize: empty macropixel layout");
    if (cfg.feedback == Feedback::sampled &&
        !(cfg.sampling.pair_rate > 0.0 && cfg.sampling.exposure_s > 0.0 && cfg.sampling.noise_rate >= 0.0 &&
          cfg.sampling.window_ns >= 0.0)) {
        fail("optimize: invalid sampled-feedback parameters");
    }

    const int count = layout.count();
    OptResult res;
    res.mask = zero_mask(layout);
    if (cfg.init == InitMode::random) {
        std::mt19937_64 init_rng(mix_seed(cfg.seed, 2));
        std::uniform_real_distribution<double> uni(0.0, kTwoPi);
        for (double &ph : res.mask.phases) ph = uni(init_rng);
    }
    objective.set_mask(res.mask);
    res.trace.initial_objective = objective.value();

    std::mt19937_64 part_rng(mix_seed(cfg.seed, 1));
    std::mt19937_64 shot_rng(mix_seed(cfg.seed, 3));
    const int take = std::clamp(static_cast<int>(std::lround(cfg.fraction * count)), 1, count);
    std::vector<int> order(static_cast<size_t>(count));

    // Sampled feedback: counts = Poisson(genuine + accidental) - accidental.
    const double pairs_per_exposure = cfg.sampling.pair_rate * cfg.sampling.exposure_s;
    const double singles_rate = 2.0 * cfg.sampling.pair_rate + cfg.sampling.noise_rate;
    const double accidental_total =
        singles_rate * singles_rate * cfg.sampling.window_ns * 1e-9 * cfg.sampling.exposure_s;
    // Fraction of uniformly spread accidentals that falls on the target bins.
    const int bins_hit = cfg.target_3x3 ? 9 : 1;
    const double d_out = static_cast<double>(layout.n) * layout.n;
    const double accidental_target = accidental_total * bins_hit / d_out;

    double best = res.trace.initial_objective;
    std::vector<double> best_hist{best};
    std::vector<double> values(thetas.size());
    for (int step = 1; step <= cfg.max_steps; ++step) {
        std::iota(order.begin(), order.end(), 0);
        for (int k = 0; k < take; ++k) {
            std::uniform_int_distribution<int> pick(k, count - 1);
            std::swap(order[k], order[pick(part_rng)]);
        }
        std::vector<int> macros(order.begin(), order.begin() + take);
        std::sort(macros.begin(), macros.end());

        const TrigCoefficients coef = objective.coefficients(pixels_of(layout, macros));
        for (size_t j = 0; j < thetas.size(); ++j) {
            const double g = coef(thetas[j]);
            if (cfg.feedback == Feedback::analytic) {
                values[j] = g;
            } else {
                std::poisson_distribution<long long> shots(std::max(g, 0.0) * pairs_per_exposure +
                                                           accidental_target);
                values[j] = (static_cast<double>(shots(shot_rng)) - accidental_target) / pairs_per_exposure;
            }
        }
        StepRecord rec;
        rec.step = step;
        rec.fit = fit_double_cosine(thetas, values);
        rec.theta_opt = rec.fit.theta_opt;
        rec.measured = rec.fit(rec.theta_opt);
        objective.apply(rec.theta_opt);
        rec.objective = coef(rec.theta_opt);
        if (!std::isfinite(rec.objective)) fail_numeric("optimize: objective became non-finite");
        for (int m : macros) res.mask.phases[m] = wrap_phase(res.mask.phases[m] + rec.theta_opt);
        best = std::max(best, rec.objective);
        rec.best = best;
        res.trace.steps.push_back(rec);
        best_hist.push_back(best);

        const int w = cfg.plateau_window;
        if (w > 0 && step >= w) {
            const double before = best_hist[static_cast<size_t>(step - w)];
            if (best - before <= cfg.plateau_tol * std::abs(before)) {
                res.trace.plateau = true;
                break;
            }
        }
    }
    return res;
}

OptResult optimize(const ScatteringMatrix &sm, const TwoPhotonPure &psi_slm, const MacroLayout &layout,
                   const OptConfig &cfg) {
    auto obj = make_objective(sm, psi_slm, cfg.target_bin, cfg.target_3x3);
    return optimize(*obj, layout, cfg);
}

OptResult optimize(const ScatteringMatrix &sm, const TwoPhotonMixed &rho_slm, const MacroLayout &layout,
                   const OptConfig &cfg) {
    auto obj = make_objective(sm, rho_slm, cfg.target_bin, cfg.target_3x3);
    return optimize(*obj, layout, cfg);
}

namespace {

IdentityMask conjugate_row(const std::vector<cplx> &row, const MacroLayout &layout) {
    IdentityMask out;
    std::vector<double> phases(row.size(), 0.0);
    for (size_t m = 0; m < row.size(); ++m) {
        if (std::abs(row[m]) < 1e-12) {
            out.unlit.push_back(static_cast<int>(m));
        } else {
            phases[m] = -std::arg(row[m]);
        }
    }
    out.mask = make_mask(layout, std::move(phases));
    return out;
}

std::vector<cplx> macro_row(const ScatteringMatrix &sm, const MacroLayout &layout, int target_pixel) {
    if (layout.n * layout.n != sm.m.cols()) fail("identity_mask: layout does not match the matrix input");
    if (target_pixel < 0 || target_pixel >= sm.m.rows()) fail("identity_mask: target pixel out of range");
    std::vector<cplx> row(static_cast<size_t>(layout.count()), 0.0);
    for (int m = 0; m < layout.count(); ++m)
        for (int p : layout.pixels[m]) row[m] += sm.m(target_pixel, p);
    return row;
}

}  // namespace

IdentityMask identity_mask(const ScatteringMatrix &sm, const MacroLayout &layout, int target_pixel) {
    return conjugate_row(macro_row(sm, layout, target_pixel), layout);
}

IdentityMask identity_mask(const MeasuredTM &tm, const MacroLayout &layout, int target_pixel) {
    if (tm.basis != TMBasis::pixel) fail("identity_mask: measured matrix must be in the pixel basis");
    if (tm.m.cols() != layout.count()) fail("identity_mask: layout does not match the measured matrix");
    if (target_pixel < 0 || target_pixel >= tm.m.rows()) fail("identity_mask: target pixel out of range");
    std::vector<cplx> row(static_cast<size_t>(layout.count()));
    for (int m = 0; m < layout.count(); ++m) row[m] = tm.m(target_pixel, m);
    return conjugate_row(row, layout);
}

std::vector<double> macropixel_mean(const MacroLayout &layout, const RVector &pixel_values) {
    if (pixel_values.size() != static_cast<Eigen::Index>(layout.n) * layout.n) {
        fail("macropixel_mean: values do not match the layout grid");
    }
    std::vector<double> out(static_cast<size_t>(layout.count()), 0.0);
    for (int m = 0; m < layout.count(); ++m) {
        for (int p : layout.pixels[m]) out[m] += pixel_values[p];
        if (!layout.pixels[m].empty()) out[m] /= static_cast<double>(layout.pixels[m].size());
    }
    return out;
}

std::vector<double> macropixel_weights(const ScatteringMatrix &sm, const MacroLayout &layout, int target_pixel,
                                       const RVector &slm_intensity) {
    const auto row = macro_row(sm, layout, target_pixel);
    const auto illum = macropixel_mean(layout, slm_intensity);
    std::vector<double> w(row.size());
    for (size_t m = 0; m < row.size(); ++m) w[m] = std::abs(row[m]) * std::sqrt(std::max(illum[m], 0.0));
    return w;
}

std::vector<int> lit_macropixels(const ScatteringMatrix &sm, const MacroLayout &layout, int target_pixel,
                                 const RVector &slm_intensity, double illum_frac, double row_frac) {
    const auto row = macro_row(sm, layout, target_pixel);
    const auto illum = macropixel_mean(layout, slm_intensity);
    const double illum_max = *std::max_element(illum.begin(), illum.end());
    double row_mean = 0.0;
    for (const cplx &v : row) row_mean += std::norm(v);
    row_mean /= static_cast<double>(row.size());
    std::vector<int> lit;
    for (size_t m = 0; m < row.size(); ++m)
        if (illum[m] >= illum_frac * illum_max && std::norm(row[m]) >= row_frac * row_mean)
            lit.push_back(static_cast<int>(m));
    return lit;
}

namespace {

void check_pair(const PhaseMask &a, const PhaseMask &b, const std::vector<double> &weights) {
    if (a.phases.size() != b.phases.size() || a.layout.macro_n != b.layout.macro_n) {
        fail("mask comparison: masks are on different macropixel grids");
    }
    if (weights.size() != a.phases.size()) fail("mask comparison: weight count does not match the masks");
    for (double w : weights)
        if (!(w >= 0.0) || !std::isfinite(w)) fail("mask comparison: weights must be finite and nonnegative");
}

cplx weighted_phasor(const PhaseMask &a, const PhaseMask &b, const std::vector<double> &weights, double *wsum) {
    cplx acc = 0.0;
    double total = 0.0;
    for (size_t m = 0; m < weights.size(); ++m) {
        acc += weights[m] * std::polar(1.0, a.phases[m] - b.phases[m]);
        total += weights[m];
    }
    if (!(total > 0.0)) fail("mask comparison: all weights are zero");
    *wsum = total;
    return acc;
}

}  // namespace

double mask_correlation(const PhaseMask &a, const PhaseMask &b, const std::vector<double> &weights) {
    check_pair(a, b, weights);
    double total = 0.0;
    const cplx acc = weighted_phasor(a, b, weights, &total);
    return std::abs(acc) / total;
}

double circular_std(const PhaseMask &a, const PhaseMask &b, const std::vector<double> &weights) {
    check_pair(a, b, weights);
    double total = 0.0;
    const double r = std::abs(weighted_phasor(a, b, weights, &total)) / total;
    return std::sqrt(-2.0 * std::log(std::clamp(r, 1e-300, 1.0)));
}

SolutionDistance solution_distance(const PhaseMask &a, const PhaseMask &b, const std::vector<double> &weights,
                                   int bins) {
    check_pair(a, b, weights);
    if (bins < 2) fail("solution_distance: at least 2 histogram bins are required");
    SolutionDistance out;
    out.histogram.assign(static_cast<size_t>(bins), 0.0);

    std::vector<double> delta, w;
    double wsum = 0.0;
    for (size_t m = 0; m < weights.size(); ++m) {
        if (weights[m] <= 0.0) continue;
        const double dphi = wrap_signed_phase(a.phases[m] - b.phases[m]);
        delta.push_back(dphi);
        w.push_back(weights[m]);
        wsum += weights[m];
        // (-pi, pi] split into equal bins, bin 0 starting just above -pi.
        int k = static_cast<int>(std::ceil((dphi + kPi) / kTwoPi * bins)) - 1;
        out.histogram[static_cast<size_t>(std::clamp(k, 0, bins - 1))] += weights[m];
    }
    if (!(wsum > 0.0)) fail("solution_distance: all weights are zero");
    for (double &x : w) x /= wsum;

    // Two wrapped Gaussians; the doubled-angle mean gives the bimodal axis.
    cplx doubled = 0.0;
    for (size_t k = 0; k < delta.size(); ++k) doubled += w[k] * std::polar(1.0, 2.0 * delta[k]);
    double mu[2], sigma[2] = {0.5, 0.5}, pi[2] = {0.5, 0.5};
    mu[0] = wrap_signed_phase(std::arg(doubled) / 2.0);
    mu[1] = wrap_signed_phase(mu[0] + kPi);
    // Start the heavier peak as component 0.
    {
        double near0 = 0.0;
        for (size_t k = 0; k < delta.size(); ++k)
            if (std::cos(delta[k] - mu[0]) >= 0.0) near0 += w[k];
        if (near0 < 0.5) std::swap(mu[0], mu[1]);
    }
    constexpr double kMinSigma = 0.02, kMaxSigma = 2.0;
    std::vector<double> resp(delta.size());
    for (int iter = 0; iter < 500; ++iter) {
        for (size_t k = 0; k < delta.size(); ++k) {
            double like[2];
            for (int c = 0; c < 2; ++c) {
                const double r = wrap_signed_phase(delta[k] - mu[c]) / sigma[c];
                like[c] = pi[c] / sigma[c] * std::exp(-0.5 * r * r);
            }
            const double tot = like[0] + like[1];
            resp[k] = tot > 0.0 ? like[0] / tot : (std::abs(wrap_signed_phase(delta[k] - mu[0])) <=
                                                           std::abs(wrap_signed_phase(delta[k] - mu[1]))
                                                       ? 1.0
                                                       : 0.0);
        }
        double shift = 0.0;
        for (int c = 0; c < 2; ++c) {
            cplx acc = 0.0;
            double mass = 0.0;
            for (size_t k = 0; k < delta.size(); ++k) {
                const double r = c == 0 ? resp[k] : 1.0 - resp[k];
                acc += w[k] * r * std::polar(1.0, delta[k]);
                mass += w[k] * r;
            }
            pi[c] = mass;
            if (mass > 1e-12) {
                const double new_mu = std::arg(acc);
                shift = std::max(shift, std::abs(wrap_signed_phase(new_mu - mu[c])));
                mu[c] = new_mu;
                const double rbar = std::clamp(std::abs(acc) / mass, 1e-300, 1.0);
                sigma[c] = std::clamp(std::sqrt(-2.0 * std::log(rbar)), kMinSigma, kMaxSigma);
            }
        }
        if (shift < 1e-12 && iter > 5) break;
    }
    out.mu1 = mu[0];
    out.mu2 = mu[1];
    out.weight1 = pi[0];
    out.weight2 = pi[1];
    out.sigma1 = sigma[0];
    out.sigma2 = sigma[1];
    out.separation = std::abs(wrap_signed_phase(mu[0] - mu[1]));
    out.degenerate = std::min(pi[0], pi[1]) < 0.05 || out.separation < std::max(sigma[0], sigma[1]);
    return out;
}

}  // namespace biphoton
