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

#ifndef LSFP_TYPES_HPP
#define LSFP_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace lsfp
{

// Scalar parameters of the network-wide model. rho_f and rho_r are the
// downlink/uplink transmit powers normalized by the receiver noise power
// (linear scale, dimensionless). tau is the training length in symbols.
struct SystemParams
{
    int cells = 7;      // L
    int users = 10;     // K, per cell
    int antennas = 64;  // M, per BS
    double rho_f = 1.0;
    double rho_r = 1.0;
    double tau = 10.0;

    int user_count() const { return cells * users; }
};

// Flat index of user k in cell l; users are enumerated cell-fastest so that
// the stacked matrix row/column conventions line up with block k, entry l.
inline int user_index(int k, int l, int cells) { return k * cells + l; }

// Large-scale channel power gains beta(j, k, l) > 0 between BS j and user k
// of cell l. Linear scale, L x K x L.
struct FadingTensor
{
    int cells = 0;  // L
    int users = 0;  // K

    FadingTensor() = default;
    FadingTensor(int L, int K, double fill = 0.0)
        : cells(L), users(K), data_(static_cast<size_t>(L) * K * L, fill)
    {
    }

    double &operator()(int j, int k, int l) { return data_[index(j, k, l)]; }
    double operator()(int j, int k, int l) const { return data_[index(j, k, l)]; }

    size_t size() const { return data_.size(); }
    const std::vector<double> &raw() const { return data_; }
    std::vector<double> &raw() { return data_; }

    // Sum over interfering cells s of beta(j, n, s); the pilot load seen by
    // BS j for user index n.
    double pilot_sum(int j, int n) const
    {
        double acc = 0.0;
        for (int s = 0; s < cells; s++)
            acc += (*this)(j, n, s);
        return acc;
    }

  private:
    size_t index(int j, int k, int l) const
    {
        return (static_cast<size_t>(j) * users + k) * cells + l;
    }
    std::vector<double> data_;
};

// Real precoding coefficients alpha(j, k, v): weight used by BS j for the
// symbol of user k in cell v. Same shape and layout as FadingTensor.
struct LsfpCoefficients
{
    int cells = 0;
    int users = 0;

    LsfpCoefficients() = default;
    LsfpCoefficients(int L, int K, double fill = 0.0)
        : cells(L), users(K), data_(static_cast<size_t>(L) * K * L, fill)
    {
    }

    double &operator()(int j, int k, int v) { return data_[index(j, k, v)]; }
    double operator()(int j, int k, int v) const { return data_[index(j, k, v)]; }

    size_t size() const { return data_.size(); }
    const std::vector<double> &raw() const { return data_; }
    std::vector<double> &raw() { return data_; }

  private:
    size_t index(int j, int k, int v) const
    {
        return (static_cast<size_t>(j) * users + k) * cells + v;
    }
    std::vector<double> data_;
};

// Factored precoder: unit-norm beamforming vector v(:, r) in R^L and power
// p(r) >= 0 per user r = user_index(k, l).
struct BeamformerPowerSet
{
    int cells = 0;
    int users = 0;
    Eigen::MatrixXd v;  // L x KL, column r = beamformer of user r
    Eigen::VectorXd p;  // KL

    BeamformerPowerSet() = default;
    BeamformerPowerSet(int L, int K)
        : cells(L), users(K), v(Eigen::MatrixXd::Zero(L, L * K)),
          p(Eigen::VectorXd::Zero(L * K))
    {
    }
};

// Outcome of one precoder solve on one channel draw.
struct SolveReport
{
    Eigen::VectorXd sinr;      // KL, indexed by user_index(k, l)
    double min_sinr = 0.0;
    bool feasible = true;
    int iterations = 0;
    int oracle_calls = 0;          // feasibility checks issued (bisection)
    int indeterminate_checks = 0;  // oracle calls that failed to decide
    Eigen::VectorXd bs_power;      // L, per-BS gamma_j
    double sum_power = 0.0;
    double balance_downlink = 0.0;  // balanced relative signal power, downlink
    double balance_uplink = 0.0;    // same for the virtual uplink
    double ips_residual = 0.0;      // relative spread of the power fixed point
    double winning_z = 0.0;         // budget picked by the Z line search
    std::vector<std::pair<double, double>> z_sweep;  // (Z, min-SINR)
};

}  // namespace lsfp

#endif
