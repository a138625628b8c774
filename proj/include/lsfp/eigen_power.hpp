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

#ifndef LSFP_EIGEN_POWER_HPP
#define LSFP_EIGEN_POWER_HPP

#include <Eigen/Dense>

#include "lsfp/sinr.hpp"
#include "lsfp/types.hpp"

namespace lsfp
{

enum class LinkDirection
{
    downlink,
    uplink
};

// Balanced power-allocation system for fixed beamformers: the max-min
// relative signal power obeys D^-1 U F p = (1/Gamma) p at the optimum, so
// the balanced allocation is the Perron eigenvector of D^-1 U F.
struct PowerBalanceSystem
{
    Eigen::VectorXd d;  // KL, diag: squared projection |b^[kl]' v^[kl]|^2
    Eigen::VectorXd u;  // KL, QoS weights
    Eigen::MatrixXd f;  // KL x KL, positive coupling matrix
    // Sum-power weight of each user's unit power: v' diag(btilde) v.
    Eigen::VectorXd power_weight;
    LinkDirection direction = LinkDirection::downlink;

    Eigen::MatrixXd iteration_matrix() const
    {
        return u.cwiseQuotient(d).asDiagonal() * f;
    }
};

struct PerronResult
{
    double value = 0.0;        // spectral radius
    Eigen::VectorXd vector;    // positive, ||x||_1 = 1
    int iterations = 0;
    double residual = 0.0;     // ||Mx - lambda x||_inf / lambda
};

// Dominant eigenpair of an entrywise-positive matrix by power iteration.
// Throws DomainError on non-positive entries and ConvergenceError when the
// iteration budget runs out. An optional positive start vector replaces the
// uniform default; the limit does not depend on it.
PerronResult perron_eigenpair(const Eigen::MatrixXd &m, double tol = 1e-12,
                              int max_iter = 100000,
                              const Eigen::VectorXd *start = nullptr);

PowerBalanceSystem build_downlink_system(const BeamformerPowerSet &beamformers,
                                         const StackedMatrices &mats,
                                         const Eigen::VectorXd &qos);

PowerBalanceSystem build_uplink_system(const BeamformerPowerSet &beamformers,
                                       const StackedMatrices &mats,
                                       const Eigen::VectorXd &qos);

// Per-user relative signal power at allocation p (for either direction).
Eigen::VectorXd balance_gamma(const PowerBalanceSystem &sys, const Eigen::VectorXd &p);

struct PowerBalance
{
    Eigen::VectorXd p;        // KL, scaled so the sum-power budget binds
    double balance = 0.0;     // 1/lambda: max of min Gamma^[kl]/u^[kl]
    int iterations = 0;
};

// Max-min power allocation for fixed beamformers under a sum-power budget.
PowerBalance maxmin_power_given_beamformers(const PowerBalanceSystem &sys,
                                            double budget, double eigen_tol = 1e-12);

}  // namespace lsfp

#endif
