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

#ifndef LSFP_MONTECARLO_HPP
#define LSFP_MONTECARLO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "lsfp/channel.hpp"
#include "lsfp/types.hpp"

namespace lsfp
{

struct TrialConfig
{
    int cells = 7;
    int users = 10;
    int antennas = 64;
    double cell_radius = 1.0;       // km
    double exclusion_radius = 0.0625;
    double tau = 0.0;               // <= 0 selects tau = users
    LinkBudget budget;
    int drops = 200;
    uint64_t seed = 1;
    std::vector<std::string> algorithms = {"none", "zf", "pa", "alg3", "alg5"};
    double z_budget = 0.0;          // <= 0 selects Z = L
    double z_step = 0.5;
    int ips_iterations = 200;
    double bisection_tol_rel = 1e-3;
    int threads = 0;                // <= 0 selects hardware concurrency
    std::string dump_beta_path;
    std::string replay_beta_path;
};

// Known algorithm identifiers, in CLI order.
const std::vector<std::string> &known_algorithms();

struct RateDataset
{
    std::vector<std::string> algorithms;
    struct Row
    {
        int drop;
        int algorithm;  // index into algorithms
        int k, l;
        double sinr;
        double rate;
    };
    std::vector<Row> rows;
    std::vector<std::pair<int, int>> failures;  // (drop, algorithm index)
    int drops = 0;
    int users_per_drop = 0;  // K*L
};

// Runs every requested algorithm on the same channel draw, drop by drop;
// positions and shadowing are redrawn each drop from per-drop substreams, so
// results do not depend on execution order or thread count.
RateDataset run_trials(const TrialConfig &cfg);

// Empirical lower q-quantile: ascending order statistic at ceil(q*n) - 1,
// clamped to the minimum for q = 0.
double outage_rate(std::vector<double> rates, double quantile = 0.05);

struct AlgorithmSummary
{
    std::string algorithm;
    int drops = 0;
    int failures = 0;
    double r_out_5pct = 0.0;
    double median_rate = 0.0;
    // Empirical CDF of the per-drop minimum rate: (rate, probability) pairs.
    std::vector<std::pair<double, double>> min_rate_cdf;
};

std::vector<AlgorithmSummary> summarize(const RateDataset &dataset);

void save_rates_csv(const RateDataset &dataset, const std::string &path);
void save_summary_json(const std::vector<AlgorithmSummary> &summaries,
                       const std::string &path);

// Multi-drop fading persistence (columns drop,j,k,l,beta).
void save_beta_series(const std::vector<FadingTensor> &series, const std::string &path);
std::vector<FadingTensor> load_beta_series(const std::string &path);

// 0 on success, 3 when any algorithm failed on more than 5% of drops.
int exit_code_for(const std::vector<AlgorithmSummary> &summaries);

}  // namespace lsfp

#endif
