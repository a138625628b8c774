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

#ifndef LSFP_PRECODERS_HPP
#define LSFP_PRECODERS_HPP

#include <optional>
#include <vector>

#include "lsfp/duality.hpp"
#include "lsfp/geometry.hpp"
#include "lsfp/sinr.hpp"
#include "lsfp/types.hpp"

namespace lsfp
{

struct PrecoderResult
{
    LsfpCoefficients alpha;
    SolveReport report;
};

// Single-cell precoding without cooperation: alpha(j, k, v) = c_j when
// j == v, zero otherwise, with c_j filling each BS power budget exactly.
LsfpCoefficients no_lsfp(const FadingTensor &beta, const SystemParams &params,
                         const std::optional<PilotLoad> &pilot_load = std::nullopt);

// Zero-forcing choice: A^[k] proportional to the inverse of the channel
// block B^[k], nulling every directed-interference cross term; one global
// scale sets max_j gamma_j = 1. Throws IllConditionedError past cond 1e12.
LsfpCoefficients zf_lsfp(const FadingTensor &beta, const SystemParams &params,
                         const std::optional<PilotLoad> &pilot_load = std::nullopt);

// Power allocation only (diagonal precoders): canonical beamformers with
// max-min powers from the Perron balance. Sum mode scales to the budget;
// per-BS mode rescales the sum solution by the largest BS power.
PrecoderResult pa_only(const FadingTensor &beta, const SystemParams &params,
                       ConstraintMode mode, double z_budget = 0.0,
                       const std::optional<PilotLoad> &pilot_load = std::nullopt);

// Duality solve under sum budget Z, then powers divided by max_j gamma_j so
// that every per-BS constraint holds with the worst one binding.
PrecoderResult algorithm4(const FadingTensor &beta, const SystemParams &params,
                          double z_budget, const DualityConfig &cfg = {},
                          const std::optional<PilotLoad> &pilot_load = std::nullopt);

// Line search over the sum budget: algorithm4 on the grid Z = 1:step:L
// (both endpoints included); keeps the best min-SINR.
PrecoderResult algorithm5(const FadingTensor &beta, const SystemParams &params,
                          double z_step = 0.5, const DualityConfig &cfg = {},
                          const std::optional<PilotLoad> &pilot_load = std::nullopt);

enum class InnerSolver
{
    algorithm1,
    algorithm4,
    algorithm5
};

struct DecentralizedConfig
{
    InnerSolver inner = InnerSolver::algorithm5;
    double z_step = 0.5;             // grid step of an inner algorithm5
    DualityConfig duality;           // knobs of the inner duality solves
    double bisection_tol_rel = 1e-3; // only used when inner is algorithm1
    int threads = 1;                 // per-BS local solves are independent
};

// BS j plus its six nearest BSs under the torus metric, ties broken by
// index; returned sorted ascending.
std::vector<int> neighborhood(const NetworkGeometry &geom, int bs);

// Decentralized precoding: every BS solves its neighborhood sub-network with
// full-network pilot loads, keeps only its own row of each local precoding
// block, and transmits nothing toward cells outside the neighborhood. The
// report evaluates the assembled coefficients on the full network.
PrecoderResult algorithm6(const FadingTensor &beta, const SystemParams &params,
                          const NetworkGeometry &geom,
                          const DecentralizedConfig &cfg = {});

}  // namespace lsfp

#endif
