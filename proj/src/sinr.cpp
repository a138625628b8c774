// SPDX-License-Identifier: Apache-2.0
//
// lsfp-sim: large-scale fading precoding for multi-cell massive MIMO downlink
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "lsfp/sinr.hpp"

#include <cmath>
#include <limits>

#include "lsfp/errors.hpp"

namespace lsfp
{

namespace
{

void check_dims(const LsfpCoefficients &alpha, const FadingTensor &beta,
                const SystemParams &params)
{
    if (alpha.cells != beta.cells || alpha.users != beta.users ||
        beta.cells != params.cells || beta.users != params.users)
        throw DomainError("coefficient/fading/parameter dimensions disagree");
}

// Pilot load of BS j for user index n: either the natural sum over cells of
// beta(j, n, s) or the caller-supplied measurement.
double load_of(const FadingTensor &beta, const std::optional<PilotLoad> &pl,
               int j, int n)
{
    return pl ? (*pl)(j, n) : beta.pilot_sum(j, n);
}

}  // namespace

SinrTerms sinr_scalar(const LsfpCoefficients &alpha, const FadingTensor &beta,
                      const SystemParams &params,
                      const std::optional<PilotLoad> &pilot_load)
{
    check_dims(alpha, beta, params);
    const int L = params.cells, K = params.users;
    const double rt = params.rho_r * params.tau;
    const double M = params.antennas;

    // rho_f * sum_j sum_n beta(j,k,l) (1 + rt*load) sum_v alpha(j,n,v)^2 is
    // separable: accumulate per-BS weights once.
    Eigen::MatrixXd bs_weight(L, K);  // (j, n): (1 + rt*load) * sum_v alpha^2
    for (int j = 0; j < L; j++)
        for (int n = 0; n < K; n++) {
            double sq = 0.0;
            for (int v = 0; v < L; v++)
                sq += alpha(j, n, v) * alpha(j, n, v);
            bs_weight(j, n) = (1.0 + rt * load_of(beta, pilot_load, j, n)) * sq;
        }
    Eigen::VectorXd bs_weight_sum = bs_weight.rowwise().sum();  // over users

    SinrTerms out;
    const int n_users = L * K;
    out.j0.resize(n_users);
    out.j1.resize(n_users);
    out.j2.resize(n_users);
    out.sinr.resize(n_users);

    for (int k = 0; k < K; k++)
        for (int l = 0; l < L; l++) {
            const int r = user_index(k, l, L);
            double j1 = 0.0, signal = 0.0, j2 = 0.0;
            for (int v = 0; v < L; v++) {
                double cross = 0.0;
                for (int j = 0; j < L; j++)
                    cross += beta(j, k, l) * alpha(j, k, v);
                if (v == l)
                    signal = cross;
                else
                    j1 += cross * cross;
            }
            for (int j = 0; j < L; j++)
                j2 += beta(j, k, l) * bs_weight_sum(j);

            out.j0(r) = params.rho_f * rt * signal * signal;
            out.j1(r) = params.rho_f * rt * j1;
            out.j2(r) = params.rho_f * j2;
            const double den = 1.0 / M + M * out.j1(r) + out.j2(r);
            out.sinr(r) = (out.j0(r) == 0.0) ? 0.0 : M * out.j0(r) / den;
        }
    out.min_sinr = out.sinr.minCoeff();
    return out;
}

Eigen::VectorXd bs_power(const LsfpCoefficients &alpha, const FadingTensor &beta,
                         const SystemParams &params,
                         const std::optional<PilotLoad> &pilot_load)
{
    check_dims(alpha, beta, params);
    const int L = params.cells, K = params.users;
    const double rt = params.rho_r * params.tau;

    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(L);
    for (int j = 0; j < L; j++)
        for (int k = 0; k < K; k++) {
            double sq = 0.0;
            for (int v = 0; v < L; v++)
                sq += alpha(j, k, v) * alpha(j, k, v);
            gamma(j) += (1.0 + rt * load_of(beta, pilot_load, j, k)) * sq;
        }
    return params.antennas * gamma;
}

LsfpCoefficients alpha_from_phi(const LsfpCoefficients &phi, const FadingTensor &beta,
                                const SystemParams &params,
                                const std::optional<PilotLoad> &pilot_load)
{
    check_dims(phi, beta, params);
    const double rt = params.rho_r * params.tau;
    LsfpCoefficients alpha(params.cells, params.users);
    for (int j = 0; j < params.cells; j++)
        for (int k = 0; k < params.users; k++) {
            const double gain = std::sqrt(rt) * beta(j, k, j) /
                                (1.0 + rt * load_of(beta, pilot_load, j, k));
            for (int v = 0; v < params.cells; v++)
                alpha(j, k, v) = gain * phi(j, k, v);
        }
    return alpha;
}

LsfpCoefficients phi_from_alpha(const LsfpCoefficients &alpha, const FadingTensor &beta,
                                const SystemParams &params,
                                const std::optional<PilotLoad> &pilot_load)
{
    check_dims(alpha, beta, params);
    const double rt = params.rho_r * params.tau;
    LsfpCoefficients phi(params.cells, params.users);
    for (int j = 0; j < params.cells; j++)
        for (int k = 0; k < params.users; k++) {
            const double gain = std::sqrt(rt) * beta(j, k, j) /
                                (1.0 + rt * load_of(beta, pilot_load, j, k));
            for (int v = 0; v < params.cells; v++)
                phi(j, k, v) = alpha(j, k, v) / gain;
        }
    return phi;
}

double rate(double sinr) { return std::log2(1.0 + sinr); }

StackedMatrices build_stacked(const FadingTensor &beta, const SystemParams &params,
                              double fold_budget,
                              const std::optional<PilotLoad> &pilot_load)
{
    if (beta.cells != params.cells || beta.users != params.users)
        throw DomainError("fading tensor does not match parameters");
    const int L = params.cells, K = params.users;

    StackedMatrices m;
    m.L_ = L;
    m.K_ = K;
    m.M_ = params.antennas;
    m.fold_budget_ = fold_budget > 0.0 ? fold_budget : static_cast<double>(L);

    // Rescale the gains to O(1); SINR, Gamma, and BS powers are invariant
    // under (beta, rho_f, rho_r) -> (beta/s, rho_f*s, rho_r*s).
    double scale = 0.0;
    for (double b : beta.raw()) {
        if (!(b > 0.0) || !std::isfinite(b))
            throw DomainError("fading tensor entries must be positive and finite");
        scale = std::max(scale, b);
    }
    m.beta_scale_ = scale;
    m.rho_f_ = params.rho_f * scale;
    m.rho_r_ = params.rho_r * scale;
    m.tau_ = params.tau;
    m.alpha_to_a_ = std::sqrt(params.antennas * m.rho_f_ * m.rho_r_ * m.tau_);

    m.b_blocks_.resize(K);
    for (int k = 0; k < K; k++) {
        m.b_blocks_[k].resize(L, L);
        for (int l = 0; l < L; l++)
            for (int j = 0; j < L; j++)
                m.b_blocks_[k](l, j) = beta(j, k, l) / scale;
    }

    const double rt = m.rho_r_ * m.tau_;
    m.c_factor_.resize(L, K);
    m.btilde_.resize(L, K);
    for (int j = 0; j < L; j++)
        for (int n = 0; n < K; n++) {
            const double load = (pilot_load ? (*pilot_load)(j, n)
                                            : beta.pilot_sum(j, n)) /
                                scale;
            m.c_factor_(j, n) = 1.0 / rt + load;
            m.btilde_(j, n) = m.c_factor_(j, n) / m.rho_f_;
        }

    m.b_condition_.resize(K);
    for (int k = 0; k < K; k++) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.b_blocks_[k]);
        const double smin = svd.singularValues().minCoeff();
        m.b_condition_[k] = (smin > 0.0)
                                ? svd.singularValues().maxCoeff() / smin
                                : std::numeric_limits<double>::infinity();
        if (m.b_condition_[k] > 1e12)
            m.ill_conditioned_ = true;
    }
    return m;
}

Eigen::MatrixXd StackedMatrices::dense_b() const
{
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(L_ * K_, L_ * K_);
    for (int k = 0; k < K_; k++)
        b.block(k * L_, k * L_, L_, L_) = b_blocks_[k];
    return b;
}

Eigen::VectorXd StackedMatrices::bhat_diag(int k, int l) const
{
    Eigen::VectorXd d(L_ * K_);
    for (int n = 0; n < K_; n++)
        for (int j = 0; j < L_; j++)
            d(n * L_ + j) = b_blocks_[k](l, j) * c_factor_(j, n);
    return d;
}

Eigen::VectorXd StackedMatrices::bsum_diag(int k, int l) const
{
    const double noise_share = 1.0 / (fold_budget_ * rho_f_);
    Eigen::VectorXd d(L_ * K_);
    for (int n = 0; n < K_; n++)
        for (int j = 0; j < L_; j++)
            d(n * L_ + j) = (noise_share + b_blocks_[k](l, j)) * c_factor_(j, n);
    return d;
}

Eigen::MatrixXd StackedMatrices::q_block(int k, int l, int n) const
{
    const double noise_share = 1.0 / (fold_budget_ * rho_f_);
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(L_, L_);
    for (int j = 0; j < L_; j++)
        q(j, j) = (noise_share + b_blocks_[k](l, j)) * c_factor_(j, n) / M_;
    if (n == k) {
        const Eigen::VectorXd b = b_vec(k, l);
        q += b * b.transpose();
    }
    return q;
}

double StackedMatrices::gamma_j(const Eigen::MatrixXd &a, int j) const
{
    double g = 0.0;
    for (int n = 0; n < K_; n++)
        g += btilde_(j, n) * a.row(n * L_ + j).squaredNorm();
    return g;
}

Eigen::VectorXd StackedMatrices::bs_powers(const Eigen::MatrixXd &a) const
{
    Eigen::VectorXd g(L_);
    for (int j = 0; j < L_; j++)
        g(j) = gamma_j(a, j);
    return g;
}

double StackedMatrices::sum_power(const Eigen::MatrixXd &a) const
{
    return bs_powers(a).sum();
}

Eigen::MatrixXd StackedMatrices::stack(const LsfpCoefficients &alpha) const
{
    if (alpha.cells != L_ || alpha.users != K_)
        throw DomainError("coefficient dimensions do not match the stack");
    Eigen::MatrixXd a(L_ * K_, L_);
    for (int k = 0; k < K_; k++)
        for (int j = 0; j < L_; j++)
            for (int v = 0; v < L_; v++)
                a(k * L_ + j, v) = alpha_to_a_ * alpha(j, k, v);
    return a;
}

LsfpCoefficients StackedMatrices::unstack(const Eigen::MatrixXd &a) const
{
    LsfpCoefficients alpha(L_, K_);
    for (int k = 0; k < K_; k++)
        for (int j = 0; j < L_; j++)
            for (int v = 0; v < L_; v++)
                alpha(j, k, v) = a(k * L_ + j, v) / alpha_to_a_;
    return alpha;
}

Eigen::VectorXd sinr_matrix(const Eigen::MatrixXd &a, const StackedMatrices &mats,
                            ConstraintMode mode)
{
    const int L = mats.cells(), K = mats.users();
    if (a.rows() != L * K || a.cols() != L)
        throw DomainError("stacked A has wrong dimensions");
    const double M = mats.antennas();

    // Row squared norms feed every user's trace term.
    const Eigen::VectorXd row_sq = a.rowwise().squaredNorm();

    Eigen::VectorXd sinr(L * K);
    for (int k = 0; k < K; k++) {
        const Eigen::MatrixXd ba = mats.b_block(k) * a.middleRows(k * L, L);
        for (int l = 0; l < L; l++) {
            const int r = user_index(k, l, L);
            const double signal = ba(l, l) * ba(l, l);
            double directed = ba.row(l).squaredNorm() - signal;

            const Eigen::VectorXd w = (mode == ConstraintMode::per_bs)
                                          ? mats.bhat_diag(k, l)
                                          : mats.bsum_diag(k, l);
            const double trace = w.dot(row_sq);
            double den = directed + trace / M;
            if (mode == ConstraintMode::per_bs)
                den += 1.0 / M;
            sinr(r) = (signal == 0.0) ? 0.0 : signal / den;
        }
    }
    return sinr;
}

Eigen::VectorXd relative_signal_power(const Eigen::MatrixXd &a,
                                      const StackedMatrices &mats)
{
    const int L = mats.cells(), K = mats.users();
    if (a.rows() != L * K || a.cols() != L)
        throw DomainError("stacked A has wrong dimensions");
    const double M = mats.antennas();
    const Eigen::VectorXd row_sq = a.rowwise().squaredNorm();

    Eigen::VectorXd gamma(L * K);
    for (int k = 0; k < K; k++) {
        const Eigen::MatrixXd ba = mats.b_block(k) * a.middleRows(k * L, L);
        for (int l = 0; l < L; l++) {
            const int r = user_index(k, l, L);
            const double signal = ba(l, l) * ba(l, l);
            // tr(A^T Q A) = folded trace term + full received row power.
            const double den =
                mats.bsum_diag(k, l).dot(row_sq) / M + ba.row(l).squaredNorm();
            gamma(r) = (signal == 0.0) ? 0.0 : signal / den;
        }
    }
    return gamma;
}

Eigen::MatrixXd assemble_a(const BeamformerPowerSet &set)
{
    const int L = set.cells, K = set.users;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(L * K, L);
    for (int k = 0; k < K; k++)
        for (int l = 0; l < L; l++) {
            const int r = user_index(k, l, L);
            a.block(k * L, l, L, 1) = set.v.col(r) * std::sqrt(set.p(r));
        }
    return a;
}

BeamformerPowerSet factor_a(const Eigen::MatrixXd &a, int cells, int users)
{
    if (a.rows() != cells * users || a.cols() != cells)
        throw DomainError("stacked A has wrong dimensions");
    BeamformerPowerSet set(cells, users);
    for (int k = 0; k < users; k++)
        for (int l = 0; l < cells; l++) {
            const int r = user_index(k, l, cells);
            Eigen::VectorXd col = a.block(k * cells, l, cells, 1);
            const double norm = col.norm();
            set.p(r) = norm * norm;
            if (norm > 0.0) {
                // Sign convention: largest-magnitude component positive.
                int imax = 0;
                col.cwiseAbs().maxCoeff(&imax);
                set.v.col(r) = col / (col(imax) < 0.0 ? -norm : norm);
            } else {
                set.v.col(r) = Eigen::VectorXd::Unit(cells, l);
            }
        }
    return set;
}

}  // namespace lsfp
