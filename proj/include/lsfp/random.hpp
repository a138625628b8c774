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

#ifndef LSFP_RANDOM_HPP
#define LSFP_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace lsfp
{

// Seeded random source with self-contained uniform and Gaussian draws.
// std::normal_distribution keeps hidden cache state and is not portable
// across standard libraries, so both transforms are spelled out here; the
// draw sequence depends only on the seed.
class Rng
{
  public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1).
    double uniform()
    {
        return (engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; one value per call, no carry-over.
    double gaussian()
    {
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    uint64_t next_u64() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

// Mixes a base seed with a stream index so that parallel drops get
// decorrelated, order-independent substreams (splitmix64 finalizer).
inline uint64_t derive_seed(uint64_t base, uint64_t stream)
{
    uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace lsfp

#endif
