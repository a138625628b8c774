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

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

TEST_SUITE("cli")
{
    namespace
    {
        int run_command(const std::string &args)
        {
            const std::string cmd =
                std::string(LSFP_SIM_BINARY) + " " + args + " > /dev/null 2>&1";
            const int status = std::system(cmd.c_str());
            return WEXITSTATUS(status);
        }
    }

    TEST_CASE("run subcommand writes rates and summary")
    {
        const int code = run_command(
            "run --cells 7 --users 2 --antennas 16 --drops 2 --seed 3 "
            "--algorithms none,zf --threads 1 "
            "--out-rates cli_rates.csv --out-summary cli_summary.json");
        CHECK(code == 0);

        std::ifstream csv("cli_rates.csv");
        REQUIRE(csv.good());
        std::string header;
        std::getline(csv, header);
        CHECK(header == "drop,algorithm,k,l,sinr,rate");
        size_t rows = 0;
        for (std::string line; std::getline(csv, line);)
            if (!line.empty())
                rows++;
        CHECK(rows == 2u * 2u * 14u);

        std::ifstream js("cli_summary.json");
        REQUIRE(js.good());
        nlohmann::json doc;
        js >> doc;
        REQUIRE(doc.is_array());
        REQUIRE(doc.size() == 2);
        for (const auto &entry : doc) {
            CHECK(entry.contains("algorithm"));
            CHECK(entry.contains("drops"));
            CHECK(entry.contains("failures"));
            CHECK(entry.contains("r_out_5pct"));
            CHECK(entry.contains("median_rate"));
            CHECK(entry.contains("min_rate_cdf"));
            CHECK(entry["drops"] == 2);
            CHECK(entry["failures"] == 0);
        }
        std::remove("cli_rates.csv");
        std::remove("cli_summary.json");
    }

    TEST_CASE("config file mirrors the flags and flags override it")
    {
        {
            std::ofstream cfg("cli_config_test.cfg");
            cfg << "cells=7\n"
                << "users=2\n"
                << "antennas=16\n"
                << "drops=2\n"
                << "seed=3\n"
                << "algorithms=none\n"
                << "threads=1\n"
                << "out-rates=cli_cfg_rates.csv\n";
        }
        CHECK(run_command("run --config cli_config_test.cfg") == 0);
        {
            std::ifstream csv("cli_cfg_rates.csv");
            REQUIRE(csv.good());
            std::string line;
            std::getline(csv, line);
            size_t rows = 0;
            while (std::getline(csv, line))
                if (!line.empty())
                    rows++;
            CHECK(rows == 2u * 14u);  // one algorithm from the file
        }

        // The command line wins over the file: one drop instead of two.
        CHECK(run_command("run --config cli_config_test.cfg --drops 1") == 0);
        {
            std::ifstream csv("cli_cfg_rates.csv");
            std::string line;
            std::getline(csv, line);
            size_t rows = 0;
            while (std::getline(csv, line))
                if (!line.empty())
                    rows++;
            CHECK(rows == 1u * 14u);
        }
        std::remove("cli_config_test.cfg");
        std::remove("cli_cfg_rates.csv");
    }

    TEST_CASE("configuration errors exit with code 2")
    {
        CHECK(run_command("run --cells 5 --drops 1 --threads 1") == 2);
        CHECK(run_command("run --algorithms not-an-algorithm --drops 1 --threads 1") == 2);
        CHECK(run_command("--definitely-not-a-flag") == 2);
    }
}
