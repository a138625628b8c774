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

#include "lsfp/feasibility.hpp"

#include <cmath>
#include <limits>

#include "lsfp/errors.hpp"
#include "lsfp/precoders.hpp"

namespace lsfp
{

namespace
{

// Matched-filter precoder scaled well inside the power constraints; always a
// valid strictly interior barrier start with positive signal entries.
Eigen::MatrixXd interior_fallback(const StackedMatrices &mats, ConstraintMode mode,
                                  double z_budget)
{
    const int L = mats.cells(), K = mats.users();
    BeamformerPowerSet set(L, K);
    for (int k = 0; k < K; k++)
        for (int l = 0; l < L; l++) {
            const int r = user_index(k, l, L);
            const Eigen::VectorXd b = mats.b_vec(k, l);
            set.v.col(r) = b / b.norm();
            set.p(r) = 1.0;
        }
    Eigen::MatrixXd a = assemble_a(set);
    const double used = (mode == ConstraintMode::per_bs)
                            ? mats.bs_powers(a).maxCoeff()
                            : mats.sum_power(a) / z_budget;
    return a * std::sqrt(0.5 / used);
}

// Log-barrier solver for: maximize t subject to
//   (BA)_{r,l} - t >= sqrt(S * eta_i(A))   for every user i = (k, l)
//   power margins > 0
// where eta_i collects noise, directed interference, and the weighted
// Frobenius (residual interference) term of the Theorem-1 denominator.
class MaxSlackSolver
{
  public:
    MaxSlackSolver(const StackedMatrices &mats, double target, ConstraintMode mode,
                   double z_budget, double slack_tol, bool polish)
        : mats_(mats), s_target_(target), mode_(mode), z_(z_budget),
          slack_tol_(slack_tol), polish_(polish), L_(mats.cells()),
          K_(mats.users()), n_(mats.cells() * mats.users() * mats.cells()),
          m_antennas_(mats.antennas())
    {
        const int n_users = L_ * K_;
        w_.reserve(n_users);
        b_.reserve(n_users);
        for (int k = 0; k < K_; k++)
            for (int l = 0; l < L_; l++) {
                w_.push_back(mats.bhat_diag(k, l));
                b_.push_back(mats.b_vec(k, l));
            }
        row_weight_.resize(n_users);
        for (int nb = 0; nb < K_; nb++)
            for (int j = 0; j < L_; j++)
                row_weight_(nb * L_ + j) = mats.btilde()(j, nb);
        n_power_ = (mode == ConstraintMode::per_bs) ? L_ : 1;
        nu_ = 2.0 * n_users + n_power_;
    }

    FeasibilityResult solve(const Eigen::MatrixXd *warm)
    {
        FeasibilityResult res;
        Eigen::MatrixXd a = prepare_start(warm);

        Eval ev = evaluate(a, 0.0);
        kappa_ = ev.s.cwiseAbs().mean();
        if (!(kappa_ > 0.0))
            kappa_ = 1.0;
        const double tol_abs = std::max(slack_tol_ * kappa_, 1e-300);

        double min_slack0 = ev.slack.minCoeff();
        if (min_slack0 > 0.0 && !polish_) {
            res.status = FeasStatus::feasible;
            res.witness = a;
            res.slack = min_slack0;
            res.slack_upper = std::numeric_limits<double>::infinity();
            return res;
        }

        double t = min_slack0 - (0.1 * std::abs(min_slack0) + 0.05 * kappa_);
        double mu = nu_ / std::max(std::abs(t), 0.01 * kappa_);

        int total_newton = 0;
        for (int outer = 0; outer < 60; outer++) {
            const CenterOutcome oc = center(a, t, mu, total_newton, res);
            if (oc == CenterOutcome::found_feasible)
                return res;
            if (oc == CenterOutcome::stalled) {
                res.status = FeasStatus::indeterminate;
                res.slack = t;
                res.newton_steps = total_newton;
                return res;
            }
            const double gap = 2.0 * nu_ / mu;
            if (t + gap < 0.0) {
                res.status = FeasStatus::infeasible;
                res.slack = t;
                res.slack_upper = t + gap;
                res.newton_steps = total_newton;
                return res;
            }
            if (gap < tol_abs) {
                res.slack = t;
                res.slack_upper = t + gap;
                res.newton_steps = total_newton;
                const double final_slack = evaluate(a, t).slack.minCoeff();
                if (polish_ && final_slack > 0.0) {
                    res.status = FeasStatus::feasible;
                    res.witness = a;
                    res.slack = final_slack;
                } else {
                    // Optimal slack pinned inside [t, t+gap] around zero; no
                    // strictly positive slack was ever seen.
                    res.status = FeasStatus::infeasible;
                }
                return res;
            }
            mu *= 20.0;
        }
        res.status = FeasStatus::indeterminate;
        res.newton_steps = total_newton;
        return res;
    }

  private:
    struct Eval
    {
        bool in_domain = false;
        Eigen::VectorXd row_sq;            // KL
        std::vector<Eigen::MatrixXd> ba;   // K blocks, L x L
        Eigen::VectorXd s, eta, m, z;      // KL
        Eigen::VectorXd slack;             // KL: s - sqrt(S*eta)
        Eigen::VectorXd h;                 // power margins
        double f = 0.0;                    // barrier objective at given mu
    };

    enum class CenterOutcome
    {
        centered,
        found_feasible,
        stalled
    };

    Eigen::MatrixXd prepare_start(const Eigen::MatrixXd *warm)
    {
        Eigen::MatrixXd fallback = interior_fallback(mats_, mode_, z_);
        Eigen::MatrixXd a = (warm != nullptr && warm->rows() == L_ * K_ &&
                             warm->cols() == L_)
                                ? *warm
                                : fallback;
        fix_signs(a);
        // Blend toward the fallback until every signal entry is positive.
        for (int tries = 0; tries < 60 && min_signal(a) <= 0.0; tries++) {
            a = 0.5 * (a + fallback);
            fix_signs(a);
        }
        // Pull strictly inside the power constraints.
        const double used = (mode_ == ConstraintMode::per_bs)
                                ? mats_.bs_powers(a).maxCoeff()
                                : mats_.sum_power(a) / z_;
        if (used > 0.97)
            a *= std::sqrt(0.97 / used);
        return a;
    }

    void fix_signs(Eigen::MatrixXd &a) const
    {
        for (int k = 0; k < K_; k++)
            for (int l = 0; l < L_; l++)
                if (b_[user_index(k, l, L_)].dot(a.col(l).segment(k * L_, L_)) < 0.0)
                    a.block(k * L_, l, L_, 1) *= -1.0;
    }

    double min_signal(const Eigen::MatrixXd &a) const
    {
        double lo = std::numeric_limits<double>::infinity();
        for (int k = 0; k < K_; k++)
            for (int l = 0; l < L_; l++)
                lo = std::min(lo, b_[user_index(k, l, L_)].dot(
                                      a.col(l).segment(k * L_, L_)));
        return lo;
    }

    Eval evaluate(const Eigen::MatrixXd &a, double t) const
    {
        const int n_users = L_ * K_;
        Eval ev;
        ev.row_sq = a.rowwise().squaredNorm();
        ev.ba.resize(K_);
        ev.s.resize(n_users);
        ev.eta.resize(n_users);
        ev.m.resize(n_users);
        ev.z.resize(n_users);
        ev.slack.resize(n_users);

        for (int k = 0; k < K_; k++)
            ev.ba[k] = mats_.b_block(k) * a.middleRows(k * L_, L_);

        for (int k = 0; k < K_; k++)
            for (int l = 0; l < L_; l++) {
                const int r = user_index(k, l, L_);
                const double sig = ev.ba[k](l, l);
                const double directed = ev.ba[k].row(l).squaredNorm() - sig * sig;
                ev.s(r) = sig;
                ev.eta(r) = 1.0 / m_antennas_ + directed +
                            w_[r].dot(ev.row_sq) / m_antennas_;
                ev.m(r) = sig - t;
                ev.z(r) = ev.m(r) * ev.m(r) - s_target_ * ev.eta(r);
                ev.slack(r) = sig - std::sqrt(s_target_ * ev.eta(r));
            }

        if (mode_ == ConstraintMode::per_bs) {
            ev.h.resize(L_);
            for (int j = 0; j < L_; j++)
                ev.h(j) = 1.0 - mats_.gamma_j(a, j);
        } else {
            ev.h.resize(1);
            ev.h(0) = z_ - mats_.sum_power(a);
        }

        ev.in_domain = (ev.m.minCoeff() > 0.0) && (ev.z.minCoeff() > 0.0) &&
                       (ev.h.minCoeff() > 0.0);
        return ev;
    }

    double barrier_value(const Eval &ev, double t, double mu) const
    {
        return -mu * t - ev.z.array().log().sum() - ev.h.array().log().sum();
    }

    // One centering run at fixed mu. Returns found_feasible as soon as any
    // iterate carries a strictly positive minimum slack.
    CenterOutcome center(Eigen::MatrixXd &a, double &t, double mu,
                         int &total_newton, FeasibilityResult &res)
    {
        const int n_users = L_ * K_;
        Eigen::VectorXd g(n_ + 1);
        Eigen::MatrixXd h_mat(n_ + 1, n_ + 1);
        // Scaled z-gradients of all cones, applied as one symmetric update.
        Eigen::MatrixXd dz_all(n_ + 1, n_users);

        Eval ev = evaluate(a, t);
        if (!ev.in_domain)
            return CenterOutcome::stalled;

        for (int it = 0; it < 120; it++) {
            if (total_newton++ > 6000)
                return CenterOutcome::stalled;

            g.setZero();
            h_mat.setZero();
            Eigen::VectorXd diag_acc = Eigen::VectorXd::Zero(n_users);

            auto h_lower = h_mat.selfadjointView<Eigen::Lower>();

            for (int k = 0; k < K_; k++)
                for (int l = 0; l < L_; l++) {
                    const int r = user_index(k, l, L_);
                    const double zi = ev.z(r);
                    const double mi = ev.m(r);
                    const Eigen::VectorXd &bv = b_[r];

                    // Gradient: -(2m/z) grad m + (S/z) grad eta.
                    const double coef_m = 2.0 * mi / zi;
                    for (int j = 0; j < L_; j++)
                        g(l * n_users + k * L_ + j) -= coef_m * bv(j);
                    g(n_) += coef_m;
                    for (int v = 0; v < L_; v++) {
                        if (v == l)
                            continue;
                        const double cv = 2.0 * s_target_ * ev.ba[k](l, v) / zi;
                        for (int j = 0; j < L_; j++)
                            g(v * n_users + k * L_ + j) += cv * bv(j);
                    }
                    diag_acc += (2.0 * s_target_ / (m_antennas_ * zi)) * w_[r];

                    // grad z, scaled by 1/z so the batch update needs no
                    // per-column weights.
                    auto dz = dz_all.col(r);
                    for (int v = 0; v < L_; v++)
                        dz.segment(v * n_users, n_users) =
                            (-2.0 * s_target_ / m_antennas_) *
                            w_[r].cwiseProduct(a.col(v));
                    for (int j = 0; j < L_; j++) {
                        dz(l * n_users + k * L_ + j) += 2.0 * mi * bv(j);
                        for (int v = 0; v < L_; v++)
                            if (v != l)
                                dz(v * n_users + k * L_ + j) -=
                                    2.0 * s_target_ * ev.ba[k](l, v) * bv(j);
                    }
                    dz(n_) = -2.0 * mi;
                    dz /= zi;

                    // Interference curvature: (2S/z) b b' per column v != l.
                    for (int v = 0; v < L_; v++) {
                        if (v == l)
                            continue;
                        const double cw = 2.0 * s_target_ / zi;
                        const int base = v * n_users + k * L_;
                        for (int p = 0; p < L_; p++)
                            for (int q = 0; q <= p; q++)
                                h_mat(base + p, base + q) += cw * bv(p) * bv(q);
                    }

                    // Concave -(2/z) (grad m)(grad m)' (sparse: L+1 entries).
                    const double cm = -2.0 / zi;
                    const int base = l * n_users + k * L_;
                    for (int p = 0; p < L_; p++) {
                        for (int q = 0; q <= p; q++)
                            h_mat(base + p, base + q) += cm * bv(p) * bv(q);
                        h_mat(n_, base + p) += cm * bv(p) * (-1.0);
                    }
                    h_mat(n_, n_) += cm;
                }

            h_lower.rankUpdate(dz_all);

            // Power barrier(s).
            if (mode_ == ConstraintMode::per_bs) {
                for (int j = 0; j < L_; j++) {
                    const double hj = ev.h(j);
                    for (int nb = 0; nb < K_; nb++)
                        diag_acc(nb * L_ + j) += 2.0 * row_weight_(nb * L_ + j) / hj;
                    add_power_rank_one(a, g, h_mat, hj, j);
                }
            } else {
                const double hs = ev.h(0);
                diag_acc += 2.0 * row_weight_ / hs;
                add_power_rank_one(a, g, h_mat, hs, -1);
            }

            // Shared diagonal and the matching gradient term.
            for (int v = 0; v < L_; v++) {
                g.segment(v * n_users, n_users) +=
                    diag_acc.cwiseProduct(a.col(v));
                h_mat.diagonal().segment(v * n_users, n_users) += diag_acc;
            }
            g(n_) -= mu;

            // Newton direction.
            Eigen::LDLT<Eigen::MatrixXd> ldlt(h_mat);
            Eigen::VectorXd d = ldlt.solve(-g);
            double decr2 = -g.dot(d);
            if (!std::isfinite(decr2) || decr2 <= 0.0) {
                h_mat.diagonal().array() +=
                    1e-10 * h_mat.diagonal().cwiseAbs().maxCoeff() + 1e-300;
                ldlt.compute(h_mat);
                d = ldlt.solve(-g);
                decr2 = -g.dot(d);
                if (!std::isfinite(decr2) || decr2 <= 0.0)
                    return CenterOutcome::stalled;
            }

            // Approximate centering is enough: the gap certificate carries a
            // factor-two margin over the exact-center bound.
            if (decr2 / 2.0 < 1e-2)
                return CenterOutcome::centered;

            // Backtracking line search on the barrier value.
            const double f0 = barrier_value(ev, t, mu);
            const Eigen::Map<const Eigen::MatrixXd> da(d.data(), n_users, L_);
            const double dt = d(n_);
            double step = 1.0;
            bool accepted = false;
            // The absolute term keeps rounding noise in f from rejecting
            // legitimately tiny steps.
            const double noise = 1e-12 * (1.0 + std::abs(f0));
            for (int ls = 0; ls < 60; ls++) {
                Eigen::MatrixXd a_try = a + step * da;
                const double t_try = t + step * dt;
                Eval ev_try = evaluate(a_try, t_try);
                if (ev_try.in_domain &&
                    barrier_value(ev_try, t_try, mu) <=
                        f0 - 0.01 * step * decr2 + noise) {
                    a = std::move(a_try);
                    t = t_try;
                    ev = std::move(ev_try);
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted)
                // No acceptable step left; with a modest decrement the point
                // is near enough to the center for the safety-factored gap.
                return decr2 / 2.0 < 0.25 ? CenterOutcome::centered
                                          : CenterOutcome::stalled;

            if (!polish_ && ev.slack.minCoeff() > 0.0 && ev.h.minCoeff() > 0.0) {
                res.status = FeasStatus::feasible;
                res.witness = a;
                res.slack = ev.slack.minCoeff();
                res.slack_upper = std::numeric_limits<double>::infinity();
                res.newton_steps = total_newton;
                return CenterOutcome::found_feasible;
            }
        }
        return CenterOutcome::centered;
    }

    // Rank-one power-curvature block: (1/h^2) (grad gamma)(grad gamma)' plus
    // the gradient term (1/h) grad gamma. bs < 0 means the sum constraint.
    void add_power_rank_one(const Eigen::MatrixXd &a, Eigen::VectorXd &g,
                            Eigen::MatrixXd &h_mat, double margin, int bs) const
    {
        const int n_users = L_ * K_;
        std::vector<std::pair<int, double>> entries;
        entries.reserve(static_cast<size_t>(K_) * L_ * (bs >= 0 ? 1 : L_));
        for (int nb = 0; nb < K_; nb++)
            for (int j = 0; j < L_; j++) {
                if (bs >= 0 && j != bs)
                    continue;
                const int row = nb * L_ + j;
                const double wr = 2.0 * row_weight_(row);
                for (int v = 0; v < L_; v++) {
                    const double val = wr * a(row, v);
                    if (val != 0.0)
                        entries.emplace_back(v * n_users + row, val);
                }
            }
        for (const auto &[idx, val] : entries)
            g(idx) += val / margin;
        const double c = 1.0 / (margin * margin);
        for (size_t pi = 0; pi < entries.size(); pi++)
            for (size_t qi = 0; qi <= pi; qi++) {
                const auto &[ip, vp] = entries[pi];
                const auto &[iq, vq] = entries[qi];
                if (ip >= iq)
                    h_mat(ip, iq) += c * vp * vq;
                else
                    h_mat(iq, ip) += c * vp * vq;
            }
    }

    const StackedMatrices &mats_;
    double s_target_;
    ConstraintMode mode_;
    double z_;
    double slack_tol_;
    bool polish_;
    int L_, K_, n_;
    double m_antennas_;
    int n_power_ = 0;
    double nu_ = 0.0;
    double kappa_ = 1.0;
    std::vector<Eigen::VectorXd> w_;  // per-user residual weights (KL each)
    std::vector<Eigen::VectorXd> b_;  // per-user channel vectors (L each)
    Eigen::VectorXd row_weight_;      // btilde by stacked row
};

}  // namespace

FeasibilityResult feasibility_check(const FeasibilityProblem &prob,
                                    const Eigen::MatrixXd *warm_start)
{
    if (prob.mats == nullptr)
        throw DomainError("feasibility problem carries no matrices");
    if (prob.target_sinr < 0.0)
        throw DomainError("SINR target must be nonnegative");

    const StackedMatrices &mats = *prob.mats;
    const double z = prob.z_budget > 0.0 ? prob.z_budget
                                         : static_cast<double>(mats.cells());

    if (prob.target_sinr == 0.0) {
        FeasibilityResult res;
        res.status = FeasStatus::feasible;
        res.witness = Eigen::MatrixXd::Zero(mats.user_count(), mats.cells());
        res.slack = 0.0;
        res.slack_upper = std::numeric_limits<double>::infinity();
        return res;
    }

    MaxSlackSolver solver(mats, prob.target_sinr, prob.mode, z, prob.slack_tol,
                          prob.polish_witness);
    return solver.solve(warm_start);
}

BisectionResult bisection_maxmin(ConstraintMode mode, const FadingTensor &beta,
                                 const SystemParams &params,
                                 const BisectionConfig &cfg, double z_budget,
                                 const std::optional<PilotLoad> &pilot_load)
{
    const int L = params.cells;
    const double z = z_budget > 0.0 ? z_budget : static_cast<double>(L);
    const StackedMatrices mats = build_stacked(beta, params, z, pilot_load);

    // Initial feasible point from the duality machinery; its achieved
    // min-SINR is a witnessed feasible target.
    DualityConfig dcfg;
    dcfg.ips_iterations = cfg.ips_iterations;
    dcfg.z_budget = z;
    Eigen::MatrixXd witness;
    double s_fea = 0.0;
    if (mode == ConstraintMode::per_bs) {
        PrecoderResult init = algorithm4(beta, params, static_cast<double>(L),
                                         dcfg, pilot_load);
        witness = mats.stack(init.alpha);
        s_fea = init.report.min_sinr;
    } else {
        DualityResult init = algorithm3(beta, params, dcfg, pilot_load);
        witness = mats.stack(init.alpha);
        s_fea = init.report.min_sinr;
    }
    if (!(s_fea > 0.0))
        throw SolverFailure("initializer produced a zero min-SINR point");

    BisectionResult out;
    out.trace.emplace_back(s_fea, true);
    const double tol_abs = cfg.tol_rel * s_fea;

    FeasibilityProblem prob;
    prob.mode = mode;
    prob.z_budget = z;
    prob.slack_tol = cfg.slack_tol;
    prob.mats = &mats;

    int oracle_calls = 0, indeterminate = 0;

    // The oracle only needs slack resolution commensurate with the current
    // bracket: decisions within a quarter-bracket of the boundary may land
    // either way without breaking the geometric contraction.
    auto check = [&](double target, double bracket) {
        prob.target_sinr = target;
        prob.slack_tol =
            std::max(cfg.slack_tol, 0.05 * bracket / std::max(target, 1e-300));
        oracle_calls++;
        FeasibilityResult r = feasibility_check(prob, &witness);
        if (r.status == FeasStatus::indeterminate)
            indeterminate++;
        const bool ok = r.status == FeasStatus::feasible;
        if (ok)
            witness = r.witness;
        out.trace.emplace_back(target, ok);
        return ok;
    };

    // Bracket the optimum by doubling from the witnessed feasible value.
    double s_in = s_fea;
    bool bracketed = false;
    for (int d = 0; d < 60; d++) {
        s_in *= 2.0;
        if (!check(s_in, s_in - s_fea)) {
            bracketed = true;
            break;
        }
        s_fea = s_in;
    }
    if (!bracketed)
        throw SolverFailure("max-min SINR did not bracket after 60 doublings");

    int iters = 0;
    while (s_in - s_fea > tol_abs && iters < cfg.max_iter) {
        const double mid = 0.5 * (s_in + s_fea);
        if (check(mid, s_in - s_fea))
            s_fea = mid;
        else
            s_in = mid;
        iters++;
    }

    if (indeterminate > cfg.max_indeterminate_fraction * oracle_calls)
        throw SolverFailure("feasibility oracle was indeterminate on " +
                            std::to_string(indeterminate) + " of " +
                            std::to_string(oracle_calls) + " checks");

    // One full solve of the max-slack program at the terminal feasible
    // target pulls the witness toward the equal-SINR optimum.
    {
        prob.target_sinr = s_fea;
        prob.slack_tol = cfg.slack_tol;
        prob.polish_witness = true;
        oracle_calls++;
        const FeasibilityResult r = feasibility_check(prob, &witness);
        if (r.status == FeasStatus::feasible)
            witness = r.witness;
    }

    // Witness re-verified through the scalar formulas only.
    out.a = witness;
    out.alpha = mats.unstack(witness);
    const SinrTerms terms = sinr_scalar(out.alpha, beta, params, pilot_load);
    const Eigen::VectorXd gamma = bs_power(out.alpha, beta, params, pilot_load);
    if (terms.min_sinr < s_fea * (1.0 - 1e-6) - 1e-12)
        throw SolverFailure("witness failed scalar SINR re-verification");
    const double power_violation =
        (mode == ConstraintMode::per_bs) ? gamma.maxCoeff() - 1.0 : gamma.sum() - z;
    if (power_violation > 1e-9 * std::max(1.0, z))
        throw SolverFailure("witness violates the power constraints");

    out.report.sinr = terms.sinr;
    out.report.min_sinr = terms.min_sinr;
    out.report.feasible = true;
    out.report.iterations = iters;
    out.report.oracle_calls = oracle_calls;
    out.report.indeterminate_checks = indeterminate;
    out.report.bs_power = gamma;
    out.report.sum_power = gamma.sum();
    out.report.winning_z = z;
    return out;
}

}  // namespace lsfp
