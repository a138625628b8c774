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

#ifndef LSFP_TEST_HELPERS_HPP
#define LSFP_TEST_HELPERS_HPP

#include <Eigen/Dense>
#include <cmath>

#include "lsfp/channel.hpp"
#include "lsfp/geometry.hpp"
#include "lsfp/random.hpp"
#include "lsfp/sinr.hpp"
#include "lsfp/types.hpp"

namespace lsfp::test
{

// Log-uniform gains spanning a few decades; quick substitute for a full
// geometry draw in solver-level tests.
inline FadingTensor random_beta(int cells, int users, Rng &rng,
                                double lo_exp = -3.0, double hi_exp = 0.0)
{
    FadingTensor beta(cells, users);
    for (int j = 0; j < cells; j++)
        for (int k = 0; k < users; k++)
            for (int l = 0; l < cells; l++) {
                double e = rng.uniform(lo_exp, hi_exp);
                // Serving links kept strongest so draws resemble a network.
                if (j == l)
                    e = rng.uniform(-0.5, 0.5);
                beta(j, k, l) = std::pow(10.0, e);
            }
    return beta;
}

inline SystemParams toy_params(int cells, int users, int antennas = 64,
                               double rho_f = 10.0, double rho_r = 5.0,
                               double tau = 0.0)
{
    SystemParams p;
    p.cells = cells;
    p.users = users;
    p.antennas = antennas;
    p.rho_f = rho_f;
    p.rho_r = rho_r;
    p.tau = tau > 0.0 ? tau : users;
    return p;
}

// Random coefficients scaled so that max_j gamma_j equals the given level.
inline LsfpCoefficients random_alpha(const FadingTensor &beta,
                                     const SystemParams &params, Rng &rng,
                                     double power_level = 0.8)
{
    LsfpCoefficients alpha(params.cells, params.users);
    for (auto &x : alpha.raw())
        x = rng.gaussian();
    const Eigen::VectorXd gamma = bs_power(alpha, beta, params);
    const double c = std::sqrt(power_level / gamma.maxCoeff());
    for (auto &x : alpha.raw())
        x *= c;
    return alpha;
}

// Full physical draw at the defaults of the simulation setup.
struct NetworkDraw
{
    NetworkGeometry geom;
    UserDrop drop;
    FadingTensor beta;
    SystemParams params;
};

inline NetworkDraw default_draw(int cells, int users, int antennas, uint64_t seed)
{
    NetworkDraw d;
    d.geom = build_hex_torus(cells, 1.0, 0.0625);
    Rng rng(seed);
    d.drop = drop_users(d.geom, users, rng);
    LinkBudget budget;
    d.beta = sample_fading(d.geom, d.drop, budget, rng);
    const NormalizedSnr snr = normalized_snr(budget);
    d.params = toy_params(cells, users, antennas, snr.rho_f, snr.rho_r);
    return d;
}

}  // namespace lsfp::test

#endif
