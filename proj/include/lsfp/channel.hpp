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

#ifndef LSFP_CHANNEL_HPP
#define LSFP_CHANNEL_HPP

#include <string>

#include "lsfp/geometry.hpp"
#include "lsfp/random.hpp"
#include "lsfp/types.hpp"

namespace lsfp
{

// Physical link budget; converted once into the normalized rho_f, rho_r used
// by every SINR formula.
struct LinkBudget
{
    double bandwidth_hz = 20e6;
    double bs_noise_figure_db = 4.0;
    double ue_noise_figure_db = 9.0;
    double bs_tx_power_dbm = 48.0;
    double ue_tx_power_dbm = 23.0;
    double shadow_sigma_db = 8.0;
};

enum class LinkSide
{
    bs,
    ue
};

// Urban-macro distance law: gain in dB for a distance in km. Throws
// DomainError for d <= 0.
double pathloss_db(double distance_km);

// Thermal noise power in dBm at the given side's noise figure:
// 290 K * Boltzmann * bandwidth * NF.
double noise_power_dbm(const LinkBudget &budget, LinkSide side);

struct NormalizedSnr
{
    double rho_f;  // BS transmit power over user-side noise, linear
    double rho_r;  // user transmit power over BS-side noise, linear
};

NormalizedSnr normalized_snr(const LinkBudget &budget);

// Draws the full L x K x L gain tensor: path loss at the wrapped distance
// plus i.i.d. log-normal shadowing per link. Deterministic given the seed.
FadingTensor sample_fading(const NetworkGeometry &geom, const UserDrop &drop,
                           const LinkBudget &budget, Rng &rng);

// CSV persistence with header "j,k,l,beta"; used to replay a fixed channel
// across algorithms.
void save_fading_csv(const FadingTensor &beta, const std::string &path);
FadingTensor load_fading_csv(const std::string &path);

}  // namespace lsfp

#endif
