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

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lsfp/errors.hpp"
#include "lsfp/montecarlo.hpp"

namespace
{

std::string join(const std::vector<std::string> &parts)
{
    std::ostringstream out;
    for (size_t i = 0; i < parts.size(); i++)
        out << (i ? "," : "") << parts[i];
    return out.str();
}

std::string trim(const std::string &s)
{
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

// Flat key=value config file; each entry becomes a --key=value token placed
// before the explicit flags so that the command line wins.
std::vector<std::string> expand_config(const std::vector<std::string> &args)
{
    std::string path;
    for (size_t i = 0; i < args.size(); i++) {
        if (args[i] == "--config" && i + 1 < args.size())
            path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            path = args[i].substr(9);
    }
    if (path.empty())
        return args;

    std::ifstream in(path);
    if (!in)
        throw lsfp::ConfigError("cannot open config file " + path);
    std::vector<std::string> tokens;
    for (std::string line; std::getline(in, line);) {
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw lsfp::ConfigError("config line is not key=value: " + line);
        tokens.push_back("--" + trim(line.substr(0, eq)) + "=" +
                         trim(line.substr(eq + 1)));
    }

    std::vector<std::string> out;
    bool inserted = false;
    for (size_t i = 0; i < args.size(); i++) {
        if (args[i] == "--config") {
            i++;  // drop the path argument as well
            continue;
        }
        if (args[i].rfind("--config=", 0) == 0)
            continue;
        out.push_back(args[i]);
        if (!inserted && args[i] == "run") {
            out.insert(out.end(), tokens.begin(), tokens.end());
            inserted = true;
        }
    }
    if (!inserted)
        out.insert(out.begin(), tokens.begin(), tokens.end());
    return out;
}

}  // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Max-min SINR precoding simulator for multi-cell massive MIMO downlink"};
    app.require_subcommand(1);

    CLI::App *run = app.add_subcommand("run", "Run Monte Carlo trials");
    std::string config_path;
    run->add_option("--config", config_path,
                    "Flat key=value file mirroring the flags below");

    lsfp::TrialConfig cfg;
    std::string algorithms = join(cfg.algorithms);
    std::string out_rates, out_summary;

    run->add_option("--cells", cfg.cells, "Cell count (7 or 19)")
        ->capture_default_str();
    run->add_option("--users", cfg.users, "Users per cell")->capture_default_str();
    run->add_option("--antennas", cfg.antennas, "Antennas per BS")
        ->capture_default_str();
    run->add_option("--drops", cfg.drops, "Monte Carlo drops")->capture_default_str();
    run->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    run->add_option("--algorithms", algorithms,
                    "Comma-separated ids: " + join(lsfp::known_algorithms()))
        ->capture_default_str();
    run->add_option("--z-budget", cfg.z_budget,
                    "Sum-power budget Z (default L)");
    run->add_option("--z-step", cfg.z_step, "Budget grid step of alg5")
        ->capture_default_str();
    run->add_option("--cell-radius", cfg.cell_radius, "Cell radius, km")
        ->capture_default_str();
    run->add_option("--exclusion-radius", cfg.exclusion_radius,
                    "User exclusion disk around each BS, km")
        ->capture_default_str();
    run->add_option("--shadow-sigma", cfg.budget.shadow_sigma_db,
                    "Shadow fading std, dB")
        ->capture_default_str();
    run->add_option("--tau", cfg.tau, "Training length (default: users)");
    run->add_option("--bandwidth", cfg.budget.bandwidth_hz, "Bandwidth, Hz")
        ->capture_default_str();
    run->add_option("--bs-power", cfg.budget.bs_tx_power_dbm, "BS power, dBm")
        ->capture_default_str();
    run->add_option("--ue-power", cfg.budget.ue_tx_power_dbm, "UE power, dBm")
        ->capture_default_str();
    run->add_option("--bs-noise-figure", cfg.budget.bs_noise_figure_db,
                    "BS noise figure, dB")
        ->capture_default_str();
    run->add_option("--ue-noise-figure", cfg.budget.ue_noise_figure_db,
                    "UE noise figure, dB")
        ->capture_default_str();
    run->add_option("--ips-iterations", cfg.ips_iterations,
                    "Iterations of the uplink power fixed point")
        ->capture_default_str();
    run->add_option("--bisection-tol", cfg.bisection_tol_rel,
                    "Relative SINR gap target of alg1/alg2")
        ->capture_default_str();
    run->add_option("--threads", cfg.threads, "Worker threads (default: hardware)");
    run->add_option("--out-rates", out_rates, "Per-user rate CSV output");
    run->add_option("--out-summary", out_summary, "Per-algorithm JSON summary output");
    run->add_option("--dump-beta", cfg.dump_beta_path,
                    "Write the drawn fading tensors to CSV");
    run->add_option("--replay-beta", cfg.replay_beta_path,
                    "Replay fading tensors from a previous dump");

    for (auto *opt : run->get_options())
        opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config(args);
        // CLI11 consumes the argument list in reverse.
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const lsfp::ConfigError &e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    }

    try {
        std::istringstream split(algorithms);
        cfg.algorithms.clear();
        for (std::string tok; std::getline(split, tok, ',');)
            if (!tok.empty())
                cfg.algorithms.push_back(tok);

        const lsfp::RateDataset data = lsfp::run_trials(cfg);
        const auto summaries = lsfp::summarize(data);

        if (!out_rates.empty())
            lsfp::save_rates_csv(data, out_rates);
        if (!out_summary.empty())
            lsfp::save_summary_json(summaries, out_summary);

        for (const auto &s : summaries)
            std::cout << s.algorithm << ": R_out(5%) = " << s.r_out_5pct
                      << " bits/channel use, median = " << s.median_rate
                      << ", failures = " << s.failures << "/" << s.drops << '\n';
        return lsfp::exit_code_for(summaries);
    } catch (const lsfp::ConfigError &e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
