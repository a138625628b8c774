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

#ifndef LSFP_FEASIBILITY_HPP
#define LSFP_FEASIBILITY_HPP

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "lsfp/sinr.hpp"
#include "lsfp/types.hpp"

namespace lsfp
{

// Decide whether some precoder meets SINR target S for every user under the
// selected power constraints. After normalizing signal signs (column sign
// flips change nothing else), each SINR constraint is a second-order cone:
// linear signal entry >= sqrt(S) * norm of the affine interference-plus-
// noise vector. Solved as a max-slack program via a log-barrier method.
struct FeasibilityProblem
{
    double target_sinr = 0.0;
    ConstraintMode mode = ConstraintMode::per_bs;
    double z_budget = 0.0;  // sum mode; <= 0 selects Z = L
    double slack_tol = 1e-8;
    // Decide as soon as any strictly positive slack appears (fast), or run
    // the max-slack program to its optimum so the witness approaches the
    // equal-SINR point (used once at the end of a bisection).
    bool polish_witness = false;
    const StackedMatrices *mats = nullptr;
};

enum class FeasStatus
{
    feasible,
    infeasible,
    indeterminate
};

struct FeasibilityResult
{
    FeasStatus status = FeasStatus::indeterminate;
    Eigen::MatrixXd witness;   // stacked A; meaningful when feasible
    double slack = 0.0;        // certified lower bound on the optimal slack
    double slack_upper = 0.0;  // certified upper bound
    int newton_steps = 0;
};

FeasibilityResult feasibility_check(const FeasibilityProblem &prob,
                                    const Eigen::MatrixXd *warm_start = nullptr);

struct BisectionConfig
{
    // Absolute SINR gap target as a fraction of the initial feasible value.
    double tol_rel = 1e-3;
    int max_iter = 60;
    double slack_tol = 1e-8;  // floor; widened to match the open bracket
    int ips_iterations = 200;  // initializer (duality solve) budget
    // Runs with more than this fraction of undecided oracle calls abort.
    double max_indeterminate_fraction = 0.05;
};

struct BisectionResult
{
    LsfpCoefficients alpha;
    Eigen::MatrixXd a;
    SolveReport report;
    std::vector<std::pair<double, bool>> trace;  // (target, was feasible)
};

// Quasi-concave max-min SINR solve by bisection with the convex feasibility
// oracle. The initial feasible point comes from the duality machinery
// (rescaled for per-BS constraints); the infeasible end by doubling.
BisectionResult bisection_maxmin(ConstraintMode mode, const FadingTensor &beta,
                                 const SystemParams &params,
                                 const BisectionConfig &cfg = {},
                                 double z_budget = 0.0,
                                 const std::optional<PilotLoad> &pilot_load = std::nullopt);

}  // namespace lsfp

#endif
