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

#ifndef LSFP_SINR_HPP
#define LSFP_SINR_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "lsfp/types.hpp"

namespace lsfp
{

// Per-user decomposition of the rate lower bound:
//   sinr = M*j0 / (1/M + M*j1 + j2)
// j0 is the coherent signal, j1 the directed (pilot-contamination)
// interference that grows with the antenna count, j2 the residual
// interference plus noise. All vectors are indexed by user_index(k, l).
struct SinrTerms
{
    Eigen::VectorXd j0;
    Eigen::VectorXd j1;
    Eigen::VectorXd j2;
    Eigen::VectorXd sinr;
    double min_sinr = 0.0;
};

// Optional override of the per-(BS, user) pilot load sum_s beta(j, n, s);
// the decentralized solver substitutes loads measured on the full network
// while optimizing on a sub-network. L x K, physical scale.
using PilotLoad = Eigen::MatrixXd;

SinrTerms sinr_scalar(const LsfpCoefficients &alpha, const FadingTensor &beta,
                      const SystemParams &params,
                      const std::optional<PilotLoad> &pilot_load = std::nullopt);

// Average transmit power gamma_j of every BS for the given coefficients.
Eigen::VectorXd bs_power(const LsfpCoefficients &alpha, const FadingTensor &beta,
                         const SystemParams &params,
                         const std::optional<PilotLoad> &pilot_load = std::nullopt);

// Bijection between the precoding weights phi handed to the BSs and the
// effective coefficients alpha the SINR bound is written in.
LsfpCoefficients alpha_from_phi(const LsfpCoefficients &phi, const FadingTensor &beta,
                                const SystemParams &params,
                                const std::optional<PilotLoad> &pilot_load = std::nullopt);
LsfpCoefficients phi_from_alpha(const LsfpCoefficients &alpha, const FadingTensor &beta,
                                const SystemParams &params,
                                const std::optional<PilotLoad> &pilot_load = std::nullopt);

double rate(double sinr);

enum class ConstraintMode
{
    per_bs,
    sum
};

// Stacked reformulation of the SINR bound. The decision variable is the
// KL x L matrix A whose block k, column v entry at BS row j equals
// alpha_to_a * alpha(j, k, v); user (k, l) owns row user_index(k, l) of the
// block-diagonal channel matrix B.
//
// Channel gains are rescaled by beta_scale (and rho_f, rho_r compensated)
// when the matrices are built; every SINR, relative signal power, and BS
// power computed from them is invariant under that rescaling.
class StackedMatrices
{
  public:
    StackedMatrices() = default;

    int cells() const { return L_; }
    int users() const { return K_; }
    int antennas() const { return M_; }
    int user_count() const { return L_ * K_; }
    double rho_f() const { return rho_f_; }
    double rho_r() const { return rho_r_; }
    double tau() const { return tau_; }
    double beta_scale() const { return beta_scale_; }
    double fold_budget() const { return fold_budget_; }
    double alpha_to_a() const { return alpha_to_a_; }

    // Channel block B^[k]: entry (l, j) = rescaled beta(j, k, l).
    const Eigen::MatrixXd &b_block(int k) const { return b_blocks_[k]; }
    Eigen::MatrixXd dense_b() const;

    // Rescaled channel vector of user (k, l) across BSs (row l of B^[k]).
    Eigen::VectorXd b_vec(int k, int l) const { return b_blocks_[k].row(l); }

    // Residual-interference weights of user (k, l)'s denominator, as the
    // diagonal of a KL x KL matrix over rows (n, j).
    Eigen::VectorXd bhat_diag(int k, int l) const;
    // Same with the sum-power constraint folded in at the stored budget.
    Eigen::VectorXd bsum_diag(int k, int l) const;

    // n-th diagonal block of Q^[kl] (the denominator matrix of the relative
    // signal power).
    Eigen::MatrixXd q_block(int k, int l, int n) const;

    // Noise-plus-pilot-load factor 1/(rho_r tau) + sum_s beta(j, n, s) that
    // multiplies every residual-interference weight; L x K over (BS, user).
    const Eigen::MatrixXd &pilot_factor() const { return c_factor_; }

    // Per-BS power weights: gamma_j(A) = sum_n btilde(j, n) * ||row(n,j)||^2.
    const Eigen::MatrixXd &btilde() const { return btilde_; }
    double gamma_j(const Eigen::MatrixXd &a, int j) const;
    Eigen::VectorXd bs_powers(const Eigen::MatrixXd &a) const;
    double sum_power(const Eigen::MatrixXd &a) const;

    Eigen::MatrixXd stack(const LsfpCoefficients &alpha) const;
    LsfpCoefficients unstack(const Eigen::MatrixXd &a) const;

    // Condition numbers of the B^[k] blocks; matrix forms that would need
    // B^-1 must be bypassed when ill_conditioned() reports true.
    const std::vector<double> &b_condition() const { return b_condition_; }
    bool ill_conditioned() const { return ill_conditioned_; }

    friend StackedMatrices build_stacked(const FadingTensor &, const SystemParams &,
                                         double, const std::optional<PilotLoad> &);

  private:
    int L_ = 0, K_ = 0, M_ = 0;
    double rho_f_ = 0.0, rho_r_ = 0.0, tau_ = 0.0;
    double beta_scale_ = 1.0;
    double fold_budget_ = 0.0;
    double alpha_to_a_ = 0.0;
    std::vector<Eigen::MatrixXd> b_blocks_;  // K blocks, L x L
    Eigen::MatrixXd c_factor_;               // L x K: 1/(rho_r tau) + pilot load
    Eigen::MatrixXd btilde_;                 // L x K
    std::vector<double> b_condition_;
    bool ill_conditioned_ = false;
};

// fold_budget <= 0 selects the whole-network budget Z = L.
StackedMatrices build_stacked(const FadingTensor &beta, const SystemParams &params,
                              double fold_budget = 0.0,
                              const std::optional<PilotLoad> &pilot_load = std::nullopt);

// SINR of every user from the stacked form. per_bs keeps the explicit 1/M
// noise term; sum folds the sum-power constraint (tight at the stored
// budget) into the denominator and carries no standalone noise term.
Eigen::VectorXd sinr_matrix(const Eigen::MatrixXd &a, const StackedMatrices &mats,
                            ConstraintMode mode);

// Gamma = SINR/(1+SINR) in the sum-folded form; scale-invariant in A.
Eigen::VectorXd relative_signal_power(const Eigen::MatrixXd &a,
                                      const StackedMatrices &mats);

// Column (k, l) of A is v^[kl] * sqrt(p^[kl]).
Eigen::MatrixXd assemble_a(const BeamformerPowerSet &set);
BeamformerPowerSet factor_a(const Eigen::MatrixXd &a, int cells, int users);

}  // namespace lsfp

#endif
