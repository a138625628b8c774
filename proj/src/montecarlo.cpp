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

#include "lsfp/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lsfp/errors.hpp"
#include "lsfp/feasibility.hpp"
#include "lsfp/precoders.hpp"

namespace lsfp
{

const std::vector<std::string> &known_algorithms()
{
    static const std::vector<std::string> ids = {
        "none", "zf", "pa", "alg1", "alg2", "alg3", "alg4", "alg5", "alg6"};
    return ids;
}

namespace
{

struct DropOutcome
{
    // Per requested algorithm: per-user SINRs, or empty on failure.
    std::vector<Eigen::VectorXd> sinr;
    std::vector<bool> failed;
};

Eigen::VectorXd dispatch(const std::string &id, const FadingTensor &beta,
                         const SystemParams &params, const NetworkGeometry &geom,
                         const TrialConfig &cfg)
{
    const double z = cfg.z_budget > 0.0 ? cfg.z_budget
                                        : static_cast<double>(params.cells);
    DualityConfig dcfg;
    dcfg.ips_iterations = cfg.ips_iterations;
    dcfg.z_budget = z;

    if (id == "none")
        return sinr_scalar(no_lsfp(beta, params), beta, params).sinr;
    if (id == "zf")
        return sinr_scalar(zf_lsfp(beta, params), beta, params).sinr;
    if (id == "pa")
        return pa_only(beta, params, ConstraintMode::sum, z).report.sinr;
    if (id == "alg1" || id == "alg2") {
        BisectionConfig bcfg;
        bcfg.tol_rel = cfg.bisection_tol_rel;
        bcfg.ips_iterations = cfg.ips_iterations;
        const ConstraintMode mode =
            (id == "alg1") ? ConstraintMode::per_bs : ConstraintMode::sum;
        return bisection_maxmin(mode, beta, params, bcfg, z).report.sinr;
    }
    if (id == "alg3")
        return algorithm3(beta, params, dcfg).report.sinr;
    if (id == "alg4")
        return algorithm4(beta, params, z, dcfg).report.sinr;
    if (id == "alg5")
        return algorithm5(beta, params, cfg.z_step, dcfg).report.sinr;
    if (id == "alg6") {
        DecentralizedConfig dec;
        dec.z_step = cfg.z_step;
        dec.duality = dcfg;
        return algorithm6(beta, params, geom, dec).report.sinr;
    }
    throw ConfigError("unknown algorithm '" + id + "'");
}

void validate(const TrialConfig &cfg)
{
    if (cfg.drops < 1)
        throw ConfigError("need at least one drop");
    if (cfg.algorithms.empty())
        throw ConfigError("no algorithms requested");
    const auto &known = known_algorithms();
    for (const auto &id : cfg.algorithms)
        if (std::find(known.begin(), known.end(), id) == known.end())
            throw ConfigError("unknown algorithm '" + id + "'");
    if (cfg.z_budget > cfg.cells)
        throw ConfigError("sum budget cannot exceed the cell count");
}

}  // namespace

RateDataset run_trials(const TrialConfig &cfg)
{
    validate(cfg);

    const NetworkGeometry geom =
        build_hex_torus(cfg.cells, cfg.cell_radius, cfg.exclusion_radius);

    SystemParams params;
    params.cells = cfg.cells;
    params.users = cfg.users;
    params.antennas = cfg.antennas;
    params.tau = cfg.tau > 0.0 ? cfg.tau : static_cast<double>(cfg.users);
    const NormalizedSnr snr = normalized_snr(cfg.budget);
    params.rho_f = snr.rho_f;
    params.rho_r = snr.rho_r;

    std::vector<FadingTensor> replay;
    if (!cfg.replay_beta_path.empty()) {
        replay = load_beta_series(cfg.replay_beta_path);
        if (static_cast<int>(replay.size()) < cfg.drops)
            throw ConfigError("replay file holds fewer drops than requested");
    }

    std::vector<FadingTensor> betas(cfg.drops);
    std::vector<DropOutcome> outcomes(cfg.drops);

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int d = next.fetch_add(1);
            if (d >= cfg.drops)
                return;
            Rng rng(derive_seed(cfg.seed, static_cast<uint64_t>(d)));
            if (replay.empty()) {
                const UserDrop drop = drop_users(geom, cfg.users, rng);
                betas[d] = sample_fading(geom, drop, cfg.budget, rng);
            } else {
                betas[d] = replay[d];
            }
            DropOutcome &oc = outcomes[d];
            oc.sinr.resize(cfg.algorithms.size());
            oc.failed.assign(cfg.algorithms.size(), false);
            for (size_t ai = 0; ai < cfg.algorithms.size(); ai++) {
                try {
                    oc.sinr[ai] =
                        dispatch(cfg.algorithms[ai], betas[d], params, geom, cfg);
                } catch (const std::exception &) {
                    oc.failed[ai] = true;
                }
            }
        }
    };

    int n_threads = cfg.threads > 0
                        ? cfg.threads
                        : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min(n_threads, cfg.drops));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; i++)
            pool.emplace_back(worker);
        for (auto &th : pool)
            th.join();
    }

    if (!cfg.dump_beta_path.empty())
        save_beta_series(betas, cfg.dump_beta_path);

    RateDataset data;
    data.algorithms = cfg.algorithms;
    data.drops = cfg.drops;
    data.users_per_drop = cfg.cells * cfg.users;
    data.rows.reserve(static_cast<size_t>(cfg.drops) * cfg.algorithms.size() *
                      data.users_per_drop);
    for (int d = 0; d < cfg.drops; d++)
        for (size_t ai = 0; ai < cfg.algorithms.size(); ai++) {
            if (outcomes[d].failed[ai]) {
                data.failures.emplace_back(d, static_cast<int>(ai));
                continue;
            }
            const Eigen::VectorXd &s = outcomes[d].sinr[ai];
            for (int k = 0; k < cfg.users; k++)
                for (int l = 0; l < cfg.cells; l++) {
                    const double si = s(user_index(k, l, cfg.cells));
                    data.rows.push_back({d, static_cast<int>(ai), k, l, si,
                                         rate(si)});
                }
        }
    return data;
}

double outage_rate(std::vector<double> rates, double quantile)
{
    if (rates.empty())
        throw DomainError("outage rate of an empty sample");
    if (quantile < 0.0 || quantile > 1.0)
        throw DomainError("quantile must lie in [0, 1]");
    std::sort(rates.begin(), rates.end());
    const auto n = static_cast<double>(rates.size());
    const long idx =
        std::max(0L, static_cast<long>(std::ceil(quantile * n)) - 1L);
    return rates[static_cast<size_t>(idx)];
}

std::vector<AlgorithmSummary> summarize(const RateDataset &dataset)
{
    const size_t n_alg = dataset.algorithms.size();
    std::vector<std::vector<double>> all_rates(n_alg);
    // Minimum rate over the users of one drop (only for drops that ran).
    std::vector<std::map<int, double>> min_by_drop(n_alg);

    for (const auto &row : dataset.rows) {
        all_rates[row.algorithm].push_back(row.rate);
        auto [it, fresh] = min_by_drop[row.algorithm].try_emplace(row.drop, row.rate);
        if (!fresh)
            it->second = std::min(it->second, row.rate);
    }

    std::vector<int> failures(n_alg, 0);
    for (const auto &[drop, ai] : dataset.failures) {
        (void)drop;
        failures[ai]++;
    }

    std::vector<AlgorithmSummary> out(n_alg);
    for (size_t ai = 0; ai < n_alg; ai++) {
        AlgorithmSummary &s = out[ai];
        s.algorithm = dataset.algorithms[ai];
        s.drops = dataset.drops;
        s.failures = failures[ai];
        if (!all_rates[ai].empty()) {
            s.r_out_5pct = outage_rate(all_rates[ai], 0.05);
            s.median_rate = outage_rate(all_rates[ai], 0.5);
        }
        std::vector<double> mins;
        mins.reserve(min_by_drop[ai].size());
        for (const auto &[drop, m] : min_by_drop[ai]) {
            (void)drop;
            mins.push_back(m);
        }
        std::sort(mins.begin(), mins.end());
        for (size_t i = 0; i < mins.size(); i++)
            s.min_rate_cdf.emplace_back(mins[i],
                                        static_cast<double>(i + 1) / mins.size());
    }
    return out;
}

void save_rates_csv(const RateDataset &dataset, const std::string &path)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot open " + path + " for writing");
    out << "drop,algorithm,k,l,sinr,rate\n";
    out.precision(17);
    for (const auto &row : dataset.rows)
        out << row.drop << ',' << dataset.algorithms[row.algorithm] << ','
            << row.k << ',' << row.l << ',' << row.sinr << ',' << row.rate
            << '\n';
}

void save_summary_json(const std::vector<AlgorithmSummary> &summaries,
                       const std::string &path)
{
    nlohmann::json doc = nlohmann::json::array();
    for (const auto &s : summaries) {
        nlohmann::json cdf = nlohmann::json::array();
        for (const auto &[r, p] : s.min_rate_cdf)
            cdf.push_back({r, p});
        doc.push_back({{"algorithm", s.algorithm},
                       {"drops", s.drops},
                       {"failures", s.failures},
                       {"r_out_5pct", s.r_out_5pct},
                       {"median_rate", s.median_rate},
                       {"min_rate_cdf", cdf}});
    }
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot open " + path + " for writing");
    out << doc.dump(2) << '\n';
}

void save_beta_series(const std::vector<FadingTensor> &series,
                      const std::string &path)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot open " + path + " for writing");
    out << "drop,j,k,l,beta\n";
    out.precision(17);
    for (size_t d = 0; d < series.size(); d++) {
        const FadingTensor &b = series[d];
        for (int j = 0; j < b.cells; j++)
            for (int k = 0; k < b.users; k++)
                for (int l = 0; l < b.cells; l++)
                    out << d << ',' << j << ',' << k << ',' << l << ','
                        << b(j, k, l) << '\n';
    }
}

std::vector<FadingTensor> load_beta_series(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("drop,j,k,l,beta", 0) != 0)
        throw ConfigError(path + ": expected header drop,j,k,l,beta");

    std::map<int, std::map<std::tuple<int, int, int>, double>> by_drop;
    int max_j = -1, max_k = -1;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ss(line);
        int d, j, k, l;
        double b;
        char c;
        if (!(ss >> d >> c >> j >> c >> k >> c >> l >> c >> b))
            throw ConfigError(path + ": malformed row '" + line + "'");
        by_drop[d][{j, k, l}] = b;
        max_j = std::max(max_j, std::max(j, l));
        max_k = std::max(max_k, k);
    }

    const int L = max_j + 1, K = max_k + 1;
    std::vector<FadingTensor> series;
    series.reserve(by_drop.size());
    for (const auto &[d, entries] : by_drop) {
        if (d != static_cast<int>(series.size()))
            throw ConfigError(path + ": drops are not contiguous from 0");
        if (entries.size() != static_cast<size_t>(L) * K * L)
            throw ConfigError(path + ": incomplete tensor for drop " +
                              std::to_string(d));
        FadingTensor b(L, K);
        for (const auto &[idx, val] : entries)
            b(std::get<0>(idx), std::get<1>(idx), std::get<2>(idx)) = val;
        series.push_back(std::move(b));
    }
    return series;
}

int exit_code_for(const std::vector<AlgorithmSummary> &summaries)
{
    for (const auto &s : summaries)
        if (s.drops > 0 && s.failures > 0.05 * s.drops)
            return 3;
    return 0;
}

}  // namespace lsfp
