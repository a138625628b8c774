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

#include <cmath>

#include "lsfp/errors.hpp"
#include "lsfp/precoders.hpp"
#include "lsfp/sinr.hpp"
#include "support/test_helpers.hpp"

using namespace lsfp;
using test::random_alpha;
using test::random_beta;
using test::toy_params;

namespace
{

FadingTensor unit_beta(int L, int K)
{
    return FadingTensor(L, K, 1.0);
}

}  // namespace

TEST_SUITE("sinr")
{
    TEST_CASE("alpha/phi mapping: linearity, scalar case, bijection")
    {
        const SystemParams p = toy_params(1, 1, 8, 1.0, 1.0, 1.0);
        const FadingTensor beta = unit_beta(1, 1);

        LsfpCoefficients phi(1, 1);
        phi(0, 0, 0) = 0.0;
        CHECK(alpha_from_phi(phi, beta, p)(0, 0, 0) == 0.0);

        phi(0, 0, 0) = 0.6;
        CHECK(alpha_from_phi(phi, beta, p)(0, 0, 0) == doctest::Approx(0.3));

        // Round trip on a random instance.
        Rng rng(3);
        const SystemParams p2 = toy_params(3, 2);
        const FadingTensor beta2 = random_beta(3, 2, rng);
        LsfpCoefficients phi2(3, 2);
        for (auto &x : phi2.raw())
            x = rng.gaussian();
        const LsfpCoefficients back =
            phi_from_alpha(alpha_from_phi(phi2, beta2, p2), beta2, p2);
        for (size_t i = 0; i < phi2.raw().size(); i++)
            CHECK(back.raw()[i] == doctest::Approx(phi2.raw()[i]).epsilon(1e-12));
    }

    TEST_CASE("BS power: zero input, scalar case, quadratic scaling")
    {
        const SystemParams p = toy_params(1, 1, 16, 1.0, 1.0, 1.0);
        const FadingTensor beta = unit_beta(1, 1);

        LsfpCoefficients alpha(1, 1);
        CHECK(bs_power(alpha, beta, p)(0) == 0.0);

        alpha(0, 0, 0) = 1.0 / std::sqrt(2.0 * p.antennas);
        CHECK(bs_power(alpha, beta, p)(0) == doctest::Approx(1.0));

        Rng rng(5);
        const SystemParams p2 = toy_params(3, 2);
        const FadingTensor beta2 = random_beta(3, 2, rng);
        LsfpCoefficients a2(3, 2);
        for (auto &x : a2.raw())
            x = rng.gaussian();
        const Eigen::VectorXd g1 = bs_power(a2, beta2, p2);
        for (auto &x : a2.raw())
            x *= 3.0;
        const Eigen::VectorXd g9 = bs_power(a2, beta2, p2);
        for (int j = 0; j < 3; j++)
            CHECK(g9(j) == doctest::Approx(9.0 * g1(j)).epsilon(1e-12));
    }

    TEST_CASE("scalar SINR: zero signal and the M/4 single-user point")
    {
        Rng rng(7);
        const SystemParams p = toy_params(2, 2);
        const FadingTensor beta = random_beta(2, 2, rng);
        LsfpCoefficients alpha = random_alpha(beta, p, rng);
        // Null user (0, 1)'s serving column.
        for (int j = 0; j < 2; j++)
            alpha(j, 0, 1) = 0.0;
        const SinrTerms t = sinr_scalar(alpha, beta, p);
        CHECK(t.sinr(user_index(0, 1, 2)) == 0.0);

        for (int m : {4, 16, 64}) {
            const SystemParams p1 = toy_params(1, 1, m, 1.0, 1.0, 1.0);
            const FadingTensor b1 = unit_beta(1, 1);
            LsfpCoefficients a1(1, 1);
            a1(0, 0, 0) = 1.0 / std::sqrt(2.0 * m);
            const SinrTerms one = sinr_scalar(a1, b1, p1);
            CHECK(one.j0(0) == doctest::Approx(1.0 / (2.0 * m)));
            CHECK(one.j1(0) == 0.0);
            CHECK(one.j2(0) == doctest::Approx(1.0 / m));
            CHECK(one.sinr(0) == doctest::Approx(m / 4.0).epsilon(1e-12));
        }
    }

    TEST_CASE("stacked construction: scalar channel, block entries, SPD blocks")
    {
        // L = K = 1 with unit gain keeps the internal rescaling at one.
        SystemParams p = toy_params(1, 1, 8, 2.0, 3.0, 1.0);
        const FadingTensor beta = unit_beta(1, 1);
        const StackedMatrices mats = build_stacked(beta, p);
        CHECK(mats.b_block(0)(0, 0) == doctest::Approx(1.0));
        // b = (1/(L rho_f) + beta)(1/(rho_r tau) + beta) = 1.5 * 4/3 = 2.
        const Eigen::MatrixXd q = mats.q_block(0, 0, 0);
        CHECK(q(0, 0) == doctest::Approx(2.0 / 8.0 + 1.0));

        Rng rng(11);
        const SystemParams p2 = toy_params(3, 2);
        const FadingTensor beta2 = random_beta(3, 2, rng);
        const StackedMatrices m2 = build_stacked(beta2, p2);
        for (int k = 0; k < 2; k++)
            for (int l = 0; l < 3; l++)
                for (int j = 0; j < 3; j++)
                    CHECK(m2.b_block(k)(l, j) * m2.beta_scale() ==
                          doctest::Approx(beta2(j, k, l)).epsilon(1e-12));
        for (int k = 0; k < 2; k++)
            for (int l = 0; l < 3; l++)
                for (int n = 0; n < 2; n++) {
                    Eigen::LLT<Eigen::MatrixXd> llt(m2.q_block(k, l, n));
                    CHECK(llt.info() == Eigen::Success);
                }
    }

    TEST_CASE("matrix SINR matches the scalar form to 1e-9 relative")
    {
        Rng rng(13);
        for (int trial = 0; trial < 50; trial++) {
            const SystemParams p = toy_params(2, 2);
            const FadingTensor beta = random_beta(2, 2, rng);
            const LsfpCoefficients alpha = random_alpha(beta, p, rng);
            const StackedMatrices mats = build_stacked(beta, p);
            const Eigen::MatrixXd a = mats.stack(alpha);

            const SinrTerms scalar = sinr_scalar(alpha, beta, p);
            const Eigen::VectorXd per_bs =
                sinr_matrix(a, mats, ConstraintMode::per_bs);
            for (int r = 0; r < 4; r++)
                CHECK(per_bs(r) ==
                      doctest::Approx(scalar.sinr(r)).epsilon(1e-9));
        }
    }

    TEST_CASE("sum-folded SINR agrees when the sum constraint is tight")
    {
        Rng rng(17);
        for (int trial = 0; trial < 50; trial++) {
            const SystemParams p = toy_params(3, 2);
            const FadingTensor beta = random_beta(3, 2, rng);
            LsfpCoefficients alpha = random_alpha(beta, p, rng);
            const double total = bs_power(alpha, beta, p).sum();
            const double c = std::sqrt(3.0 / total);  // sum gamma = L exactly
            for (auto &x : alpha.raw())
                x *= c;

            const StackedMatrices mats = build_stacked(beta, p);
            const Eigen::MatrixXd a = mats.stack(alpha);
            const SinrTerms scalar = sinr_scalar(alpha, beta, p);
            const Eigen::VectorXd folded = sinr_matrix(a, mats, ConstraintMode::sum);
            for (int r = 0; r < 6; r++)
                CHECK(folded(r) ==
                      doctest::Approx(scalar.sinr(r)).epsilon(1e-9));
        }
    }

    TEST_CASE("relative signal power: identity, range, scale and sign invariance")
    {
        Rng rng(19);
        const SystemParams p = toy_params(3, 2);
        const FadingTensor beta = random_beta(3, 2, rng);
        const LsfpCoefficients alpha = random_alpha(beta, p, rng);
        const StackedMatrices mats = build_stacked(beta, p);
        const Eigen::MatrixXd a = mats.stack(alpha);

        const Eigen::VectorXd gamma = relative_signal_power(a, mats);
        const Eigen::VectorXd folded = sinr_matrix(a, mats, ConstraintMode::sum);
        for (int r = 0; r < 6; r++) {
            CHECK(gamma(r) ==
                  doctest::Approx(folded(r) / (1.0 + folded(r))).epsilon(1e-9));
            CHECK(gamma(r) >= 0.0);
            CHECK(gamma(r) < 1.0);
        }

        for (double c : {-1.0, 0.1, 10.0}) {
            const Eigen::VectorXd scaled = relative_signal_power(c * a, mats);
            for (int r = 0; r < 6; r++)
                CHECK(scaled(r) == doctest::Approx(gamma(r)).epsilon(1e-9));
        }

        // A zero matrix has zero relative signal power by convention.
        const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(6, 3);
        CHECK(relative_signal_power(zero, mats).maxCoeff() == 0.0);

        // Half relative power exactly at SINR one: rescale user 0's terms.
        // Uses the identity x/(1+x) with x = 1 checked through the folded form.
        Eigen::MatrixXd a1 = a;
        const Eigen::VectorXd base = sinr_matrix(a1, mats, ConstraintMode::sum);
        CHECK(base(0) / (1.0 + base(0)) ==
              doctest::Approx(relative_signal_power(a1, mats)(0)).epsilon(1e-9));
    }

    TEST_CASE("sign flip of one block column leaves every SINR unchanged")
    {
        Rng rng(23);
        const SystemParams p = toy_params(3, 2);
        const FadingTensor beta = random_beta(3, 2, rng);
        const LsfpCoefficients alpha = random_alpha(beta, p, rng);
        const StackedMatrices mats = build_stacked(beta, p);
        Eigen::MatrixXd a = mats.stack(alpha);
        const Eigen::VectorXd before = sinr_matrix(a, mats, ConstraintMode::per_bs);
        a.col(1).segment(3, 3) *= -1.0;  // block k=1, column 1
        const Eigen::VectorXd after = sinr_matrix(a, mats, ConstraintMode::per_bs);
        for (int r = 0; r < 6; r++)
            CHECK(after(r) == doctest::Approx(before(r)).epsilon(1e-12));
    }

    TEST_CASE("factored form: assembly, round trip, and the projected Gamma")
    {
        Rng rng(29);
        const int L = 3, K = 2;
        const SystemParams p = toy_params(L, K);
        const FadingTensor beta = random_beta(L, K, rng);
        const StackedMatrices mats = build_stacked(beta, p);

        BeamformerPowerSet set(L, K);
        for (int r = 0; r < L * K; r++) {
            Eigen::VectorXd v(L);
            for (int j = 0; j < L; j++)
                v(j) = rng.gaussian();
            set.v.col(r) = v / v.norm();
            set.p(r) = rng.uniform(0.1, 2.0);
        }
        set.p(2) = 0.0;  // zero power leaves a zero column

        const Eigen::MatrixXd a = assemble_a(set);
        CHECK(a.col(2).segment(0, L).norm() == 0.0);

        const BeamformerPowerSet back = factor_a(a, L, K);
        for (int r = 0; r < L * K; r++) {
            CHECK(back.p(r) == doctest::Approx(set.p(r)).epsilon(1e-12));
            if (set.p(r) > 0.0)
                for (int j = 0; j < L; j++)
                    CHECK(std::abs(back.v(j, r)) ==
                          doctest::Approx(std::abs(set.v(j, r))).epsilon(1e-12));
        }

        // Gamma from the beamformer/power projection equals the trace form.
        const Eigen::VectorXd direct = relative_signal_power(a, mats);
        for (int k = 0; k < K; k++)
            for (int l = 0; l < L; l++) {
                const int r = user_index(k, l, L);
                if (set.p(r) == 0.0)
                    continue;
                const double num =
                    std::pow(mats.b_vec(k, l).dot(set.v.col(r)), 2) * set.p(r);
                double den = 0.0;
                for (int n = 0; n < K; n++)
                    for (int j = 0; j < L; j++) {
                        const int c = user_index(n, j, L);
                        den += set.v.col(c).dot(mats.q_block(k, l, n) *
                                                set.v.col(c)) *
                               set.p(c);
                    }
                CHECK(direct(r) == doctest::Approx(num / den).epsilon(1e-10));
            }
    }

    TEST_CASE("rate lower bound")
    {
        CHECK(rate(0.0) == 0.0);
        CHECK(rate(1.0) == doctest::Approx(1.0));
        CHECK(rate(3.0) == doctest::Approx(2.0));
    }

    TEST_CASE("min-SINR is quasi-concave on positive-signal pairs")
    {
        Rng rng(31);
        const int L = 2, K = 2;
        const SystemParams p = toy_params(L, K);
        int violations = 0;
        for (int trial = 0; trial < 100; trial++) {
            const FadingTensor beta = random_beta(L, K, rng);
            const StackedMatrices mats = build_stacked(beta, p);
            auto positive_signals = [&](Eigen::MatrixXd &a) {
                for (int k = 0; k < K; k++)
                    for (int l = 0; l < L; l++)
                        if (mats.b_vec(k, l).dot(a.col(l).segment(k * L, L)) < 0)
                            a.col(l).segment(k * L, L) *= -1.0;
            };
            Eigen::MatrixXd a1 = mats.stack(random_alpha(beta, p, rng));
            Eigen::MatrixXd a2 = mats.stack(random_alpha(beta, p, rng));
            positive_signals(a1);
            positive_signals(a2);
            const double m1 =
                sinr_matrix(a1, mats, ConstraintMode::per_bs).minCoeff();
            const double m2 =
                sinr_matrix(a2, mats, ConstraintMode::per_bs).minCoeff();
            const double mid =
                sinr_matrix(0.5 * (a1 + a2), mats, ConstraintMode::per_bs)
                    .minCoeff();
            if (mid < std::min(m1, m2) - 1e-9)
                violations++;
        }
        CHECK(violations == 0);
    }

    TEST_CASE("per-BS powers are convex in the coefficients")
    {
        Rng rng(37);
        const SystemParams p = toy_params(3, 2);
        for (int trial = 0; trial < 50; trial++) {
            const FadingTensor beta = random_beta(3, 2, rng);
            LsfpCoefficients a1(3, 2), a2(3, 2);
            for (auto &x : a1.raw())
                x = rng.gaussian();
            for (auto &x : a2.raw())
                x = rng.gaussian();
            const double lam = rng.uniform();
            LsfpCoefficients mix(3, 2);
            for (size_t i = 0; i < mix.raw().size(); i++)
                mix.raw()[i] = lam * a1.raw()[i] + (1.0 - lam) * a2.raw()[i];
            const Eigen::VectorXd g_mix = bs_power(mix, beta, p);
            const Eigen::VectorXd bound = lam * bs_power(a1, beta, p) +
                                          (1.0 - lam) * bs_power(a2, beta, p);
            for (int j = 0; j < 3; j++)
                CHECK(g_mix(j) <= bound(j) + 1e-12);
        }
    }

    TEST_CASE("residual interference dominates directed interference without LSFP")
    {
        int dominated = 0, total = 0;
        for (int trial = 0; trial < 100; trial++) {
            const test::NetworkDraw d = test::default_draw(7, 10, 64, 1000 + trial);
            const LsfpCoefficients alpha = no_lsfp(d.beta, d.params);
            const SinrTerms t = sinr_scalar(alpha, d.beta, d.params);
            for (int r = 0; r < 70; r++) {
                total++;
                if (t.j2(r) > t.j1(r))
                    dominated++;
            }
        }
        CHECK(dominated >= 0.9 * total);
    }

    TEST_CASE("dimension mismatches are rejected")
    {
        Rng rng(41);
        const SystemParams p = toy_params(3, 2);
        const FadingTensor beta = random_beta(3, 2, rng);
        const StackedMatrices mats = build_stacked(beta, p);
        const Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(5, 3);
        CHECK_THROWS_AS(sinr_matrix(bad, mats, ConstraintMode::per_bs), DomainError);
        const FadingTensor beta_bad = random_beta(2, 2, rng);
        LsfpCoefficients alpha(3, 2);
        CHECK_THROWS_AS(sinr_scalar(alpha, beta_bad, p), DomainError);
    }
}
