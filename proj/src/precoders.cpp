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

#include "lsfp/precoders.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "lsfp/errors.hpp"
#include "lsfp/feasibility.hpp"

namespace lsfp
{

namespace
{

SolveReport evaluate(const LsfpCoefficients &alpha, const FadingTensor &beta,
                     const SystemParams &params,
                     const std::optional<PilotLoad> &pilot_load)
{
    SolveReport rep;
    const SinrTerms terms = sinr_scalar(alpha, beta, params, pilot_load);
    rep.sinr = terms.sinr;
    rep.min_sinr = terms.min_sinr;
    rep.bs_power = bs_power(alpha, beta, params, pilot_load);
    rep.sum_power = rep.bs_power.sum();
    return rep;
}

double load_of(const FadingTensor &beta, const std::optional<PilotLoad> &pl,
               int j, int n)
{
    return pl ? (*pl)(j, n) : beta.pilot_sum(j, n);
}

}  // namespace

LsfpCoefficients no_lsfp(const FadingTensor &beta, const SystemParams &params,
                         const std::optional<PilotLoad> &pilot_load)
{
    const int L = params.cells, K = params.users;
    const double rt = params.rho_r * params.tau;
    LsfpCoefficients alpha(L, K);
    for (int j = 0; j < L; j++) {
        double denom = 0.0;
        for (int k = 0; k < K; k++)
            denom += 1.0 + rt * load_of(beta, pilot_load, j, k);
        const double c = 1.0 / std::sqrt(params.antennas * denom);
        for (int k = 0; k < K; k++)
            alpha(j, k, j) = c;
    }
    return alpha;
}

LsfpCoefficients zf_lsfp(const FadingTensor &beta, const SystemParams &params,
                         const std::optional<PilotLoad> &pilot_load)
{
    const StackedMatrices mats = build_stacked(beta, params, 0.0, pilot_load);
    const int L = params.cells, K = params.users;

    for (int k = 0; k < K; k++)
        if (mats.b_condition()[k] > 1e12)
            throw IllConditionedError("channel block " + std::to_string(k) +
                                          " is too ill-conditioned for zero forcing",
                                      mats.b_condition()[k]);

    Eigen::MatrixXd a(L * K, L);
    for (int k = 0; k < K; k++)
        a.middleRows(k * L, L) =
            mats.b_block(k).partialPivLu().solve(Eigen::MatrixXd::Identity(L, L));

    const double worst = mats.bs_powers(a).maxCoeff();
    a /= std::sqrt(worst);
    return mats.unstack(a);
}

PrecoderResult pa_only(const FadingTensor &beta, const SystemParams &params,
                       ConstraintMode mode, double z_budget,
                       const std::optional<PilotLoad> &pilot_load)
{
    const int L = params.cells, K = params.users;
    const double z = z_budget > 0.0 ? z_budget : static_cast<double>(L);
    const StackedMatrices mats = build_stacked(beta, params, z, pilot_load);

    BeamformerPowerSet set(L, K);
    for (int k = 0; k < K; k++)
        for (int l = 0; l < L; l++) {
            set.v.col(user_index(k, l, L)) = Eigen::VectorXd::Unit(L, l);
            set.p(user_index(k, l, L)) = 1.0;
        }

    const Eigen::VectorXd qos =
        Eigen::VectorXd::Constant(L * K, 1.0 / std::sqrt(double(L * K)));
    const PowerBalanceSystem sys = build_downlink_system(set, mats, qos);
    const PowerBalance bal = maxmin_power_given_beamformers(sys, z);
    set.p = bal.p;

    Eigen::MatrixXd a = assemble_a(set);
    if (mode == ConstraintMode::per_bs) {
        const double worst = mats.bs_powers(a).maxCoeff();
        a /= std::sqrt(worst);
    }

    PrecoderResult res;
    res.alpha = mats.unstack(a);
    res.report = evaluate(res.alpha, beta, params, pilot_load);
    res.report.iterations = bal.iterations;
    res.report.balance_downlink = bal.balance / std::sqrt(double(L * K));
    res.report.winning_z = z;
    return res;
}

PrecoderResult algorithm4(const FadingTensor &beta, const SystemParams &params,
                          double z_budget, const DualityConfig &cfg,
                          const std::optional<PilotLoad> &pilot_load)
{
    if (z_budget < 1.0 || z_budget > params.cells)
        throw DomainError("sum budget must lie in [1, L]");

    DualityConfig dcfg = cfg;
    dcfg.z_budget = z_budget;
    DualityResult sum = algorithm3(beta, params, dcfg, pilot_load);

    // Keep the beamformers, divide all powers by the largest BS power.
    const double worst = sum.report.bs_power.maxCoeff();
    const Eigen::MatrixXd a = sum.a / std::sqrt(worst);
    const StackedMatrices mats = build_stacked(beta, params, z_budget, pilot_load);

    PrecoderResult res;
    res.alpha = mats.unstack(a);
    res.report = evaluate(res.alpha, beta, params, pilot_load);
    res.report.iterations = sum.report.iterations;
    res.report.ips_residual = sum.report.ips_residual;
    res.report.balance_downlink = sum.report.balance_downlink;
    res.report.balance_uplink = sum.report.balance_uplink;
    res.report.winning_z = z_budget;
    return res;
}

PrecoderResult algorithm5(const FadingTensor &beta, const SystemParams &params,
                          double z_step, const DualityConfig &cfg,
                          const std::optional<PilotLoad> &pilot_load)
{
    if (z_step <= 0.0)
        throw DomainError("budget step must be positive");
    const double l_end = static_cast<double>(params.cells);

    std::vector<double> grid;
    for (double zv = 1.0; zv < l_end - 1e-12; zv += z_step)
        grid.push_back(zv);
    grid.push_back(l_end);

    PrecoderResult best;
    best.report.min_sinr = -1.0;
    std::vector<std::pair<double, double>> sweep;
    for (double zv : grid) {
        PrecoderResult cur = algorithm4(beta, params, zv, cfg, pilot_load);
        sweep.emplace_back(zv, cur.report.min_sinr);
        if (cur.report.min_sinr > best.report.min_sinr) {
            best = std::move(cur);
            best.report.winning_z = zv;
        }
    }
    best.report.z_sweep = std::move(sweep);
    return best;
}

std::vector<int> neighborhood(const NetworkGeometry &geom, int bs)
{
    if (bs < 0 || bs >= geom.cell_count)
        throw DomainError("BS index out of range");

    std::vector<std::pair<double, int>> order;
    for (int j = 0; j < geom.cell_count; j++) {
        if (j == bs)
            continue;
        order.emplace_back(
            wrapped_distance(geom, geom.bs_positions[bs], geom.bs_positions[j]), j);
    }
    std::sort(order.begin(), order.end());

    std::vector<int> cells{bs};
    for (int i = 0; i < 6 && i < static_cast<int>(order.size()); i++)
        cells.push_back(order[i].second);
    std::sort(cells.begin(), cells.end());
    return cells;
}

PrecoderResult algorithm6(const FadingTensor &beta, const SystemParams &params,
                          const NetworkGeometry &geom,
                          const DecentralizedConfig &cfg)
{
    const int L = params.cells, K = params.users;
    if (geom.cell_count != L)
        throw DomainError("geometry does not match the fading tensor");

    LsfpCoefficients alpha(L, K);
    auto solve_bs = [&](int j) {
        const std::vector<int> cells = neighborhood(geom, j);
        const int n_local = static_cast<int>(cells.size());
        const int self = static_cast<int>(
            std::find(cells.begin(), cells.end(), j) - cells.begin());

        FadingTensor beta_local(n_local, K);
        for (int a2 = 0; a2 < n_local; a2++)
            for (int k = 0; k < K; k++)
                for (int b2 = 0; b2 < n_local; b2++)
                    beta_local(a2, k, b2) = beta(cells[a2], k, cells[b2]);

        // Each BS knows its own total received pilot power, so the local
        // problem carries the full-network pilot loads; the kept row then
        // satisfies the same power constraint globally and locally.
        PilotLoad load(n_local, K);
        for (int a2 = 0; a2 < n_local; a2++)
            for (int k = 0; k < K; k++)
                load(a2, k) = beta.pilot_sum(cells[a2], k);

        SystemParams local = params;
        local.cells = n_local;

        LsfpCoefficients alpha_local;
        switch (cfg.inner) {
        case InnerSolver::algorithm4:
            alpha_local =
                algorithm4(beta_local, local, n_local, cfg.duality, load).alpha;
            break;
        case InnerSolver::algorithm5:
            alpha_local =
                algorithm5(beta_local, local, cfg.z_step, cfg.duality, load).alpha;
            break;
        case InnerSolver::algorithm1: {
            BisectionConfig bcfg;
            bcfg.tol_rel = cfg.bisection_tol_rel;
            bcfg.ips_iterations = cfg.duality.ips_iterations;
            alpha_local = bisection_maxmin(ConstraintMode::per_bs, beta_local,
                                           local, bcfg, 0.0, load)
                              .alpha;
            break;
        }
        }

        for (int k = 0; k < K; k++)
            for (int b2 = 0; b2 < n_local; b2++)
                alpha(j, k, cells[b2]) = alpha_local(self, k, b2);
    };

    const int n_threads = std::max(1, std::min(cfg.threads, L));
    if (n_threads == 1) {
        for (int j = 0; j < L; j++)
            solve_bs(j);
    } else {
        // Disjoint output rows per BS; no synchronization needed.
        std::atomic<int> next{0};
        auto worker = [&]() {
            for (int j = next.fetch_add(1); j < L; j = next.fetch_add(1))
                solve_bs(j);
        };
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; i++)
            pool.emplace_back(worker);
        for (auto &th : pool)
            th.join();
    }

    PrecoderResult res;
    res.alpha = std::move(alpha);
    res.report = evaluate(res.alpha, beta, params, std::nullopt);
    return res;
}

}  // namespace lsfp
