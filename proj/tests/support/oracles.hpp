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

#ifndef LSFP_TEST_ORACLES_HPP
#define LSFP_TEST_ORACLES_HPP

#include <algorithm>
#include <cmath>

#include "lsfp/random.hpp"
#include "lsfp/sinr.hpp"
#include "lsfp/types.hpp"

namespace lsfp::test
{

// Brute-force max-min SINR at L = 2, K = 1: the precoder has two columns
// v^[00] sqrt(p0), v^[01] sqrt(p1), fully parameterized by two angles and a
// power share once the binding power scale is factored out. Half the samples
// come from a uniform grid, half from random draws.
inline double tiny_maxmin_search(const FadingTensor &beta, const SystemParams &params,
                                 ConstraintMode mode, double z_budget,
                                 int samples, uint64_t seed)
{
    const StackedMatrices mats = build_stacked(beta, params);
    Rng rng(seed);

    auto evaluate = [&](double th0, double th1, double share) {
        Eigen::MatrixXd a(2, 2);
        a.col(0) = Eigen::Vector2d(std::cos(th0), std::sin(th0)) * std::sqrt(share);
        a.col(1) =
            Eigen::Vector2d(std::cos(th1), std::sin(th1)) * std::sqrt(1.0 - share);
        const double used = (mode == ConstraintMode::per_bs)
                                ? mats.bs_powers(a).maxCoeff()
                                : mats.sum_power(a) / z_budget;
        a /= std::sqrt(used);  // ray maximum: SINR grows until power binds
        return sinr_matrix(a, mats, ConstraintMode::per_bs).minCoeff();
    };

    double best = 0.0;
    Eigen::Vector3d arg(0.0, 0.0, 0.5);
    auto consider = [&](double th0, double th1, double share) {
        const double val = evaluate(th0, th1, share);
        if (val > best) {
            best = val;
            arg = {th0, th1, share};
        }
    };

    const int grid = static_cast<int>(std::cbrt(0.4 * samples));
    for (int i0 = 0; i0 < grid; i0++)
        for (int i1 = 0; i1 < grid; i1++)
            for (int i2 = 0; i2 < grid; i2++)
                consider(M_PI * (i0 + 0.5) / grid, M_PI * (i1 + 0.5) / grid,
                         (i2 + 0.5) / grid);

    const int n_random = static_cast<int>(0.4 * samples);
    for (int i = 0; i < n_random; i++)
        consider(rng.uniform(0.0, M_PI), rng.uniform(0.0, M_PI), rng.uniform());

    // Spend the remaining budget shrinking a random ball around the best
    // point found so far.
    int left = samples - grid * grid * grid - n_random;
    double radius = 0.25;
    while (left > 0) {
        const int batch = std::max(1, left / 6);
        for (int i = 0; i < batch && left > 0; i++, left--) {
            const double th0 = arg(0) + radius * M_PI * rng.gaussian();
            const double th1 = arg(1) + radius * M_PI * rng.gaussian();
            const double share =
                std::clamp(arg(2) + radius * rng.gaussian(), 1e-9, 1.0 - 1e-9);
            consider(th0, th1, share);
        }
        radius *= 0.5;
    }
    return best;
}

}  // namespace lsfp::test

#endif
