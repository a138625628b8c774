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

#ifndef LSFP_DUALITY_HPP
#define LSFP_DUALITY_HPP

#include <Eigen/Dense>
#include <optional>

#include "lsfp/eigen_power.hpp"
#include "lsfp/sinr.hpp"
#include "lsfp/types.hpp"

namespace lsfp
{

struct DualityConfig
{
    int ips_iterations = 200;
    double z_budget = 0.0;   // <= 0 selects Z = L
    double eigen_tol = 1e-12;
    // One extra pass of the power fixed point after beamformer computation;
    // an extension beyond the single-pass algorithm, off by default.
    bool refine = false;
};

// Interference-plus-noise covariance seen by user group k in the virtual
// uplink: sum over (n, j) of Q^[njk] * p_u(n, j).
Eigen::MatrixXd uplink_interference_matrix(int k, const Eigen::VectorXd &p_uplink,
                                           const StackedMatrices &mats);

// Fixed-point iteration for the balanced uplink powers; returns p_u > 0 with
// sum KL. spread_out, when given, receives the relative spread of the
// per-user balance values at the last iterate.
Eigen::VectorXd iterative_power_search(const StackedMatrices &mats,
                                       const DualityConfig &cfg,
                                       double *spread_out = nullptr);

// Closed-form optimal uplink receive beamformers for fixed uplink powers:
// w^[kl] proportional to X_k^-1 b^[kl], unit norm, positive projection.
BeamformerPowerSet uplink_beamformers(const Eigen::VectorXd &p_uplink,
                                      const StackedMatrices &mats);

// Single solve of one row: x = X^-1 b normalized with b' x > 0.
Eigen::VectorXd beamformer_from_interference(const Eigen::MatrixXd &x_mat,
                                             const Eigen::VectorXd &b);

struct DualityResult
{
    BeamformerPowerSet set;       // downlink beamformers and powers
    Eigen::MatrixXd a;            // stacked precoder
    LsfpCoefficients alpha;
    Eigen::VectorXd p_uplink;
    SolveReport report;
};

// Uplink-downlink duality solve under the sum-power budget: uplink powers by
// fixed point, closed-form uplink beamformers, reuse as downlink
// beamformers, downlink powers from the Perron eigenvector.
DualityResult algorithm3(const FadingTensor &beta, const SystemParams &params,
                         const DualityConfig &cfg = {},
                         const std::optional<PilotLoad> &pilot_load = std::nullopt);

}  // namespace lsfp

#endif
