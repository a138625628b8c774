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

#ifndef LSFP_ERRORS_HPP
#define LSFP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lsfp
{

// Invalid user-facing configuration (unsupported cell count, bad flags, ...).
struct ConfigError : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

// An iterative routine ran out of iterations; carries the last residual.
struct ConvergenceError : std::runtime_error
{
    ConvergenceError(const std::string &what, double res)
        : std::runtime_error(what + " (residual " + std::to_string(res) + ")"),
          residual(res)
    {
    }
    double residual;
};

// Beamformer with (numerically) zero projection on its own channel vector.
struct DegenerateBeamformerError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// A matrix inversion was requested past the conditioning limit.
struct IllConditionedError : std::runtime_error
{
    IllConditionedError(const std::string &what, double cond)
        : std::runtime_error(what + " (condition number " + std::to_string(cond) + ")"),
          condition(cond)
    {
    }
    double condition;
};

// A solver gave up or produced output that failed its own consistency check.
struct SolverFailure : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

}  // namespace lsfp

#endif
