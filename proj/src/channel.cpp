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

#include "lsfp/channel.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "lsfp/errors.hpp"

namespace lsfp
{

namespace
{
constexpr double kBoltzmann = 1.381e-23;  // J/K
constexpr double kNoiseTempK = 290.0;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
}  // namespace

double pathloss_db(double distance_km)
{
    if (distance_km <= 0.0)
        throw DomainError("path loss needs a positive distance");
    return -139.5 - 35.0 * std::log10(distance_km);
}

double noise_power_dbm(const LinkBudget &budget, LinkSide side)
{
    const double nf_db = (side == LinkSide::bs) ? budget.bs_noise_figure_db
                                                : budget.ue_noise_figure_db;
    const double watts =
        kNoiseTempK * kBoltzmann * budget.bandwidth_hz * db_to_linear(nf_db);
    return 10.0 * std::log10(watts * 1000.0);
}

NormalizedSnr normalized_snr(const LinkBudget &budget)
{
    // Each link is normalized by the noise at its own receiver: the forward
    // link is heard by users, the reverse link by BSs.
    NormalizedSnr snr;
    snr.rho_f = db_to_linear(budget.bs_tx_power_dbm - noise_power_dbm(budget, LinkSide::ue));
    snr.rho_r = db_to_linear(budget.ue_tx_power_dbm - noise_power_dbm(budget, LinkSide::bs));
    return snr;
}

FadingTensor sample_fading(const NetworkGeometry &geom, const UserDrop &drop,
                           const LinkBudget &budget, Rng &rng)
{
    const int L = geom.cell_count;
    const int K = drop.users;
    if (drop.cells != L)
        throw DomainError("user drop does not match the geometry");

    FadingTensor beta(L, K);
    for (int j = 0; j < L; j++)
        for (int k = 0; k < K; k++)
            for (int l = 0; l < L; l++) {
                const double d = wrapped_distance(
                    geom, geom.bs_positions[j],
                    drop.positions[user_index(k, l, L)]);
                const double shadow = budget.shadow_sigma_db * rng.gaussian();
                beta(j, k, l) = db_to_linear(pathloss_db(d) + shadow);
            }
    return beta;
}

void save_fading_csv(const FadingTensor &beta, const std::string &path)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot open " + path + " for writing");
    out << "j,k,l,beta\n";
    out.precision(17);
    for (int j = 0; j < beta.cells; j++)
        for (int k = 0; k < beta.users; k++)
            for (int l = 0; l < beta.cells; l++)
                out << j << ',' << k << ',' << l << ',' << beta(j, k, l) << '\n';
}

FadingTensor load_fading_csv(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open " + path);

    std::string line;
    if (!std::getline(in, line) || line.rfind("j,k,l,beta", 0) != 0)
        throw ConfigError(path + ": expected header j,k,l,beta");

    std::map<std::tuple<int, int, int>, double> entries;
    int max_j = -1, max_k = -1;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ss(line);
        int j, k, l;
        double b;
        char c;
        if (!(ss >> j >> c >> k >> c >> l >> c >> b))
            throw ConfigError(path + ": malformed row '" + line + "'");
        entries[{j, k, l}] = b;
        max_j = std::max(max_j, std::max(j, l));
        max_k = std::max(max_k, k);
    }

    const int L = max_j + 1, K = max_k + 1;
    if (L <= 0 || K <= 0 || entries.size() != static_cast<size_t>(L) * K * L)
        throw ConfigError(path + ": incomplete fading tensor");

    FadingTensor beta(L, K);
    for (const auto &[idx, b] : entries)
        beta(std::get<0>(idx), std::get<1>(idx), std::get<2>(idx)) = b;
    return beta;
}

}  // namespace lsfp
