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

#include "lsfp/duality.hpp"

#include <cmath>

#include "lsfp/errors.hpp"

namespace lsfp
{

namespace
{

// Per-BS accumulation shared by all user groups: g(r) = sum over (n, j) of
// p(n, j) * bhat-channel(r, n, j), i.e. sum_n B^[n]' p_n evaluated at BS r.
Eigen::VectorXd received_power_profile(const Eigen::VectorXd &p,
                                       const StackedMatrices &mats)
{
    const int L = mats.cells(), K = mats.users();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(L);
    for (int n = 0; n < K; n++)
        g += mats.b_block(n).transpose() * p.segment(n * L, L);
    return g;
}

Eigen::MatrixXd interference_from_profile(int k, const Eigen::VectorXd &p,
                                          const Eigen::VectorXd &profile,
                                          const StackedMatrices &mats)
{
    const int L = mats.cells();
    const double noise_share = 1.0 / (mats.fold_budget() * mats.rho_f());
    const double p_total = p.sum();

    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(L, L);
    for (int r = 0; r < L; r++)
        x(r, r) = mats.pilot_factor()(r, k) *
                  (noise_share * p_total + profile(r)) / mats.antennas();
    // Rank-one pieces appear only for the own user group.
    const Eigen::MatrixXd &bk = mats.b_block(k);
    x += bk.transpose() * p.segment(k * L, L).asDiagonal() * bk;
    return x;
}

}  // namespace

Eigen::MatrixXd uplink_interference_matrix(int k, const Eigen::VectorXd &p_uplink,
                                           const StackedMatrices &mats)
{
    if (p_uplink.size() != mats.user_count())
        throw DomainError("uplink power vector has wrong length");
    return interference_from_profile(k, p_uplink,
                                     received_power_profile(p_uplink, mats), mats);
}

Eigen::VectorXd iterative_power_search(const StackedMatrices &mats,
                                       const DualityConfig &cfg,
                                       double *spread_out)
{
    if (cfg.ips_iterations < 1)
        throw DomainError("fixed point needs at least one iteration");
    const int L = mats.cells(), K = mats.users();
    const int n_users = L * K;

    Eigen::VectorXd p = Eigen::VectorXd::Ones(n_users);
    Eigen::VectorXd quad(n_users);  // b^[kl]' X_k^-1 b^[kl]

    const int total = cfg.ips_iterations * (cfg.refine ? 2 : 1);
    for (int it = 0; it < total; it++) {
        const Eigen::VectorXd profile = received_power_profile(p, mats);
        for (int k = 0; k < K; k++) {
            const Eigen::MatrixXd x = interference_from_profile(k, p, profile, mats);
            Eigen::LLT<Eigen::MatrixXd> llt(x);
            if (llt.info() != Eigen::Success)
                throw SolverFailure("uplink interference matrix is not positive definite");
            // All of group k at once: (B_k X^-1 B_k')_{ll}.
            const Eigen::MatrixXd sol =
                mats.b_block(k) * llt.solve(mats.b_block(k).transpose());
            for (int l = 0; l < L; l++)
                quad(user_index(k, l, L)) = sol(l, l);
        }
        Eigen::VectorXd p_new = quad.cwiseInverse();
        p = p_new * (static_cast<double>(n_users) / p_new.sum());
    }

    if (spread_out != nullptr) {
        // Balance values p * quad should be equal at the fixed point; quad
        // here is one step stale, so refresh it against the final p.
        const Eigen::VectorXd profile = received_power_profile(p, mats);
        Eigen::VectorXd balance(n_users);
        for (int k = 0; k < K; k++) {
            const Eigen::MatrixXd x = interference_from_profile(k, p, profile, mats);
            Eigen::LLT<Eigen::MatrixXd> llt(x);
            const Eigen::MatrixXd sol =
                mats.b_block(k) * llt.solve(mats.b_block(k).transpose());
            for (int l = 0; l < L; l++) {
                const int r = user_index(k, l, L);
                balance(r) = p(r) * sol(l, l);
            }
        }
        *spread_out =
            (balance.maxCoeff() - balance.minCoeff()) / balance.mean();
    }
    return p;
}

Eigen::VectorXd beamformer_from_interference(const Eigen::MatrixXd &x_mat,
                                             const Eigen::VectorXd &b)
{
    Eigen::LLT<Eigen::MatrixXd> llt(x_mat);
    if (llt.info() != Eigen::Success)
        throw SolverFailure("interference matrix is not positive definite");
    Eigen::VectorXd w = llt.solve(b);
    const double norm = w.norm();
    if (!(norm > 0.0))
        throw DegenerateBeamformerError("beamformer collapsed to zero");
    w /= norm;
    if (b.dot(w) < 0.0)
        w = -w;
    return w;
}

BeamformerPowerSet uplink_beamformers(const Eigen::VectorXd &p_uplink,
                                      const StackedMatrices &mats)
{
    const int L = mats.cells(), K = mats.users();
    if (p_uplink.size() != L * K || (p_uplink.array() <= 0.0).any())
        throw DomainError("uplink powers must be positive with KL entries");

    BeamformerPowerSet set(L, K);
    const Eigen::VectorXd profile = received_power_profile(p_uplink, mats);
    for (int k = 0; k < K; k++) {
        const Eigen::MatrixXd x =
            interference_from_profile(k, p_uplink, profile, mats);
        for (int l = 0; l < L; l++) {
            const int r = user_index(k, l, L);
            set.v.col(r) = beamformer_from_interference(x, mats.b_vec(k, l));
            set.p(r) = p_uplink(r);
        }
    }
    return set;
}

DualityResult algorithm3(const FadingTensor &beta, const SystemParams &params,
                         const DualityConfig &cfg,
                         const std::optional<PilotLoad> &pilot_load)
{
    const int L = params.cells, K = params.users;
    const double budget = cfg.z_budget > 0.0 ? cfg.z_budget : static_cast<double>(L);

    const StackedMatrices mats = build_stacked(beta, params, budget, pilot_load);

    DualityResult res;
    double spread = 0.0;
    res.p_uplink = iterative_power_search(mats, cfg, &spread);
    res.set = uplink_beamformers(res.p_uplink, mats);

    const Eigen::VectorXd qos =
        Eigen::VectorXd::Constant(L * K, 1.0 / std::sqrt(double(L * K)));
    const PowerBalanceSystem down = build_downlink_system(res.set, mats, qos);
    const PowerBalance bal =
        maxmin_power_given_beamformers(down, budget, cfg.eigen_tol);
    res.set.p = bal.p;
    res.a = assemble_a(res.set);
    res.alpha = mats.unstack(res.a);

    const PowerBalanceSystem up = build_uplink_system(res.set, mats, qos);
    const PerronResult up_eig = perron_eigenpair(up.iteration_matrix(), cfg.eigen_tol);

    const SinrTerms terms = sinr_scalar(res.alpha, beta, params, pilot_load);
    res.report.sinr = terms.sinr;
    res.report.min_sinr = terms.min_sinr;
    res.report.bs_power = bs_power(res.alpha, beta, params, pilot_load);
    res.report.sum_power = res.report.bs_power.sum();
    res.report.iterations = cfg.ips_iterations * (cfg.refine ? 2 : 1);
    res.report.ips_residual = spread;
    // Balanced per-user relative signal power on both sides of the duality.
    res.report.balance_downlink = bal.balance / std::sqrt(double(L * K));
    res.report.balance_uplink = 1.0 / (up_eig.value * std::sqrt(double(L * K)));
    res.report.winning_z = budget;
    return res;
}

}  // namespace lsfp
