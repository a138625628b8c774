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

#include "lsfp/eigen_power.hpp"

#include <cmath>

#include "lsfp/errors.hpp"

namespace lsfp
{

PerronResult perron_eigenpair(const Eigen::MatrixXd &m, double tol, int max_iter,
                              const Eigen::VectorXd *start)
{
    if (m.rows() != m.cols() || m.rows() == 0)
        throw DomainError("Perron eigenpair needs a square matrix");
    if ((m.array() <= 0.0).any())
        throw DomainError("Perron eigenpair needs an entrywise positive matrix");

    const int n = static_cast<int>(m.rows());
    PerronResult res;
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / n);
    if (start != nullptr) {
        if (start->size() != n || (start->array() <= 0.0).any())
            throw DomainError("start vector must be positive with matching size");
        x = *start / start->lpNorm<1>();
    }

    for (int it = 1; it <= max_iter; it++) {
        Eigen::VectorXd y = m * x;
        const double lambda = y.lpNorm<1>();  // y > 0 for positive m, x >= 0
        y /= lambda;
        const double resid = (m * y - lambda * y).lpNorm<Eigen::Infinity>();
        x = y;
        if (resid <= tol * lambda) {
            res.value = lambda;
            res.vector = x;
            res.iterations = it;
            res.residual = resid / lambda;
            return res;
        }
        res.residual = resid / lambda;
    }
    throw ConvergenceError("power iteration did not converge", res.residual);
}

namespace
{

// F entry: projection of beamformer (n, j) through the n-th diagonal block
// of Q^[kl] (downlink) or Q with the index pattern transposed (uplink).
PowerBalanceSystem build_system(const BeamformerPowerSet &set,
                                const StackedMatrices &mats,
                                const Eigen::VectorXd &qos, LinkDirection dir)
{
    const int L = mats.cells(), K = mats.users();
    const int n_users = L * K;
    if (set.cells != L || set.users != K)
        throw DomainError("beamformer set does not match the stack");
    if (qos.size() != n_users || (qos.array() <= 0.0).any())
        throw DomainError("QoS vector must be positive with KL entries");

    PowerBalanceSystem sys;
    sys.direction = dir;
    sys.u = qos;
    sys.d.resize(n_users);
    sys.f.resize(n_users, n_users);
    sys.power_weight.resize(n_users);

    for (int k = 0; k < K; k++)
        for (int l = 0; l < L; l++) {
            const int r = user_index(k, l, L);
            const Eigen::VectorXd bv = mats.b_vec(k, l);
            const double proj = bv.dot(set.v.col(r));
            if (std::abs(proj) < 1e-14 * bv.norm())
                throw DegenerateBeamformerError(
                    "beamformer has zero projection on its own channel");
            sys.d(r) = proj * proj;

            double w = 0.0;
            for (int j = 0; j < L; j++)
                w += mats.btilde()(j, k) * set.v(j, r) * set.v(j, r);
            sys.power_weight(r) = w;
        }

    // Downlink couples user (k,l) to transmission (n,j) through Q^[kln];
    // the virtual uplink swaps the roles and uses Q^[njk].
    if (dir == LinkDirection::downlink) {
        for (int k = 0; k < K; k++)
            for (int l = 0; l < L; l++) {
                const int row = user_index(k, l, L);
                for (int n = 0; n < K; n++) {
                    const Eigen::MatrixXd q = mats.q_block(k, l, n);
                    for (int j = 0; j < L; j++) {
                        const int col = user_index(n, j, L);
                        sys.f(row, col) = set.v.col(col).dot(q * set.v.col(col));
                    }
                }
            }
    } else {
        const double noise_share = 1.0 / (mats.fold_budget() * mats.rho_f());
        const double m_antennas = mats.antennas();
        for (int k = 0; k < K; k++)
            for (int l = 0; l < L; l++) {
                const int row = user_index(k, l, L);
                const Eigen::VectorXd w = set.v.col(row);
                // Diagonal-plus-rank-one structure of Q^[njk]: both pieces
                // reduce to one L x L matvec per block n.
                Eigen::VectorXd cwk(L);
                for (int r = 0; r < L; r++)
                    cwk(r) = w(r) * w(r) * mats.pilot_factor()(r, k);
                const double scw = cwk.sum();
                for (int n = 0; n < K; n++) {
                    const Eigen::VectorXd diag_part = mats.b_block(n) * cwk;
                    if (n == k) {
                        const Eigen::VectorXd proj = mats.b_block(n) * w;
                        for (int j = 0; j < L; j++)
                            sys.f(row, user_index(n, j, L)) =
                                (noise_share * scw + diag_part(j)) / m_antennas +
                                proj(j) * proj(j);
                    } else {
                        for (int j = 0; j < L; j++)
                            sys.f(row, user_index(n, j, L)) =
                                (noise_share * scw + diag_part(j)) / m_antennas;
                    }
                }
            }
    }
    return sys;
}

}  // namespace

PowerBalanceSystem build_downlink_system(const BeamformerPowerSet &beamformers,
                                         const StackedMatrices &mats,
                                         const Eigen::VectorXd &qos)
{
    return build_system(beamformers, mats, qos, LinkDirection::downlink);
}

PowerBalanceSystem build_uplink_system(const BeamformerPowerSet &beamformers,
                                       const StackedMatrices &mats,
                                       const Eigen::VectorXd &qos)
{
    return build_system(beamformers, mats, qos, LinkDirection::uplink);
}

Eigen::VectorXd balance_gamma(const PowerBalanceSystem &sys, const Eigen::VectorXd &p)
{
    const Eigen::VectorXd fp = sys.f * p;
    return (sys.d.array() * p.array() / fp.array()).matrix();
}

PowerBalance maxmin_power_given_beamformers(const PowerBalanceSystem &sys,
                                            double budget, double eigen_tol)
{
    if (budget <= 0.0)
        throw DomainError("sum-power budget must be positive");
    const PerronResult eig = perron_eigenpair(sys.iteration_matrix(), eigen_tol);

    PowerBalance out;
    out.balance = 1.0 / eig.value;
    out.iterations = eig.iterations;
    out.p = eig.vector * (budget / sys.power_weight.dot(eig.vector));
    return out;
}

}  // namespace lsfp
