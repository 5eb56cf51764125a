// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The risnoma Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "risnoma/driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "risnoma/baselines.hpp"

namespace risnoma {

namespace {

CMat dft_analog(int n)
{
    CMat F(n, n);
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            F(r, c) = std::polar(s, -2.0 * std::numbers::pi * r * c / n);
    return F;
}

// Unit-norm columns of F W; columns with zero norm keep the fallback
CMat hybrid_from(const CMat &F, const CMat &W, const CMat &fallback)
{
    CMat D = F * W;
    for (Eigen::Index n = 0; n < D.cols(); ++n)
    {
        const double nrm = D.col(n).norm();
        if (nrm > 0.0)
            D.col(n) /= nrm;
        else
            D.col(n) = fallback.col(n);
    }
    return D;
}

// Exact auxiliaries of the current beams: u = G F w, v = h^H Theta u, z = |v|^2
void exact_aux(BeamformingState &s, const ChannelSet &ch)
{
    const int N = static_cast<int>(s.digital.cols());
    const int K = ch.n_users();
    s.aux_u.assign(N, CVec());
    s.aux_v.resize(K, N);
    s.aux_z.resize(K, N);
    for (int i = 0; i < N; ++i)
    {
        s.aux_u[i] = ch.ap_ris * (s.analog * s.digital.col(i));
        for (int u = 0; u < K; ++u)
        {
            s.aux_v(u, i) = ch.ris_user[u].dot(s.theta.cwiseProduct(s.aux_u[i]));
            s.aux_z(u, i) = std::norm(s.aux_v(u, i));
        }
    }
}

void scale_group(BeamformingState &s, int i, double f)
{
    s.digital.col(i) *= f;
    if (static_cast<int>(s.aux_u.size()) > i)
        s.aux_u[i] *= f;
    if (s.aux_v.cols() > i)
        s.aux_v.col(i) *= f;
    if (s.aux_z.cols() > i)
        s.aux_z.col(i) *= f * f;
}

// Shrinks any beam whose other-group gain exceeds the threshold
void enforce_leakage(BeamformingState &s, const ChannelSet &ch, const GroupLayout &layout, double tau)
{
    const RMat g = gain_table(ch, s);
    for (int i = 0; i < layout.n_groups(); ++i)
    {
        double worst = 0.0;
        for (int u = 0; u < layout.n_users(); ++u)
            if (layout.group_of(u) != i)
                worst = std::max(worst, g(u, i));
        if (worst > tau)
            scale_group(s, i, std::sqrt(tau / worst) * (1.0 - 1e-12));
    }
}

struct Evaluation
{
    bool ok = false;      // powers found for the configured minimum rates
    bool feasible = false;
    PowerAllocation alloc;
    RateReport rates;
    LeakageReport leak;
    PowerSolution target;       // powers handed to the digital update
    bool target_rates = false;  // minimum rates enforced in the digital update
};

// Uniform group powers split as if every member had its leader's gain. Handed to the digital
// update while the current beams cannot meet the minimum rates, so that the rate constraints pull
// the weaker users up.
bool recovery_powers(const RMat &gains, const GroupLayout &layout, const DecodingOrder &order, const RVec &min_rates,
                     double total_power, double noise, PowerSolution &out)
{
    const int N = layout.n_groups();
    out.group_powers = RVec::Constant(N, total_power / N);
    out.user_powers = RVec::Zero(layout.n_users());
    for (int n = 0; n < N; ++n)
    {
        const int size = layout.size(n);
        const double lead = gains(layout.user(n, order[n][0]), n);
        if (!(lead > 0.0))
            return false;
        RVec rates(size);
        for (int k = 0; k < size; ++k)
            rates(k) = min_rates(layout.user(n, order[n][k]));
        if ((1.0 / noise) * lead * out.group_powers(n) * std::exp2(-rates.tail(size - 1).sum()) < std::expm1(rates(0) * M_LN2))
            return false;
        RVec split;
        try
        {
            split = intra_group_split(out.group_powers(n), RVec::Constant(size, lead), rates, noise);
        }
        catch (const Infeasible &)
        {
            return false;
        }
        for (int k = 0; k < size; ++k)
            out.user_powers(layout.user(n, order[n][k])) = split(k);
    }
    return true;
}

Evaluation evaluate(const ChannelSet &work, double noise, const BeamformingState &s, const GroupLayout &layout,
                    const RVec &min_rates, double total_power, double tau)
{
    Evaluation e;
    const RMat gains = gain_table(work, s);
    try
    {
        e.alloc = allocate(gains, layout, min_rates, total_power, noise);
        e.ok = true;
    }
    catch (const Infeasible &)
    {
        try
        {
            e.alloc = allocate(gains, layout, RVec::Zero(min_rates.size()), total_power, noise);
        }
        catch (const Infeasible &)
        {
            return e;
        }
    }
    e.target = e.alloc.powers;
    e.target_rates = e.ok;
    if (!e.ok)
        e.target_rates = recovery_powers(gains, layout, e.alloc.order, min_rates, total_power, noise, e.target);
    if (!e.target_rates)
        e.target = e.alloc.powers;
    e.rates = sum_rate(gains, e.alloc.powers, layout, e.alloc.order, noise);
    e.leak = leakage_check(gains, layout, tau);
    e.leak.worst /= noise;
    bool rates_ok = true;
    for (int u = 0; u < layout.n_users(); ++u)
        rates_ok &= e.rates.per_user(u) >= min_rates(u) - 1e-6;
    e.feasible = e.ok && rates_ok && e.leak.all_ok && std::isfinite(e.rates.total);
    return e;
}

void record(Solution &sol, const Evaluation &e, const BeamformingState &s)
{
    sol.powers = e.alloc.powers;
    sol.order = e.alloc.order;
    sol.beamforming = s;
    sol.sum_rate = e.rates.total;
    sol.per_user_rates = e.rates.per_user;
    sol.worst_leakage = e.leak.worst;
    sol.feasible = true;
}

} // namespace

InitialState initialize(const ScenarioConfig &cfg, const ChannelSet &ch, Rng &rng, bool full_digital)
{
    cfg.validate();
    const int Nt = ch.n_tx(), Nr = ch.n_elements(), N = cfg.n_groups();
    const GroupLayout layout = cfg.layout();
    if (ch.n_users() != layout.n_users())
        throw InvalidDimension("initialize: channel and configuration disagree on the number of users");

    InitialState init;
    init.powers.group_powers = RVec::Constant(N, cfg.total_power_w / N);
    init.powers.user_powers = RVec::Zero(layout.n_users());
    for (int n = 0; n < N; ++n)
        for (int k = 0; k < layout.size(n); ++k)
            init.powers.user_powers(layout.user(n, k)) = init.powers.group_powers(n) / layout.size(n);

    BeamformingState &s = init.state;
    s.theta = CVec::Ones(Nr);
    if (!ch.direct)
        for (int m = 0; m < Nr; ++m)
            s.theta(m) = std::polar(1.0, uniform_angle(rng));
    if (full_digital)
    {
        s.analog = dft_analog(Nt);
    }
    else
    {
        const double mod = 1.0 / std::sqrt(static_cast<double>(Nt));
        s.analog.resize(Nt, cfg.n_rf_chains);
        for (int c = 0; c < cfg.n_rf_chains; ++c)
            for (int r = 0; r < Nt; ++r)
                s.analog(r, c) = std::polar(mod, uniform_angle(rng));
    }

    // Strongest user of each group leads the ZF design
    const CMat GF = ch.ap_ris * s.analog;
    CMat H(N, s.analog.cols());
    for (int n = 0; n < N; ++n)
    {
        double best = -1.0;
        for (int k = 0; k < layout.size(n); ++k)
        {
            const int u = layout.user(n, k);
            const CVec c = s.theta.conjugate().cwiseProduct(ch.ris_user[u]);
            const Eigen::RowVectorXcd e = c.adjoint() * GF;
            if (e.squaredNorm() > best)
            {
                best = e.squaredNorm();
                H.row(n) = e;
            }
        }
    }
    const ZfResult zf = zf_digital(H, s.analog);
    s.digital = zf.W;
    init.rank_deficient = zf.rank_deficient;
    s.hybrid = hybrid_from(s.analog, s.digital, CMat::Constant(Nt, N, 1.0 / std::sqrt(static_cast<double>(Nt))));
    exact_aux(s, ch);
    return init;
}

WorkingChannel working_channel(const ChannelSet &ch, double noise_power)
{
    if (!(noise_power > 0.0))
        throw InvalidConfig("noise power must be positive");
    WorkingChannel w;
    w.ch = ch;
    double g_scale = 1.0;
    if (!ch.direct)
    {
        const double fro = ch.ap_ris.norm();
        if (fro > 0.0)
            g_scale = fro / std::sqrt(static_cast<double>(ch.ap_ris.size()));
        w.ch.ap_ris /= g_scale;
    }
    const RVec row_power = w.ch.ap_ris.rowwise().squaredNorm();
    double ref = 0.0;
    for (const auto &h : w.ch.ris_user)
        ref += h.cwiseAbs2().dot(row_power);
    ref /= std::max(1, ch.n_users());
    if (!(ref > 0.0) || !std::isfinite(ref))
        ref = 1.0;
    for (auto &h : w.ch.ris_user)
        h /= std::sqrt(ref);
    w.gain_unit = g_scale * g_scale * ref;
    w.noise = noise_power / w.gain_unit;
    return w;
}

Solution evaluate_design(const ScenarioConfig &cfg, const ChannelSet &ch, const BeamformingState &s)
{
    const WorkingChannel work = working_channel(ch, cfg.noise_power_w);
    const GroupLayout layout = cfg.layout();
    const Evaluation e = evaluate(work.ch, work.noise, s, layout, cfg.min_rate_vector(), cfg.total_power_w,
                                  cfg.leakage_threshold_w / work.gain_unit);
    Solution sol;
    sol.outer_iterations = 0;
    sol.beamforming = s;
    if (e.feasible)
        record(sol, e, s);
    else
        sol.worst_leakage = e.leak.worst;
    sol.trace.push_back({0, e.feasible ? e.rates.total : 0.0, sol.sum_rate, e.feasible, e.leak.worst, 0, 0});
    return sol;
}

Solution optimize(const ScenarioConfig &cfg, const ChannelSet &ch, Rng &rng, const DriverOptions &opt)
{
    InitialState init = initialize(cfg, ch, rng, opt.full_digital);
    const WorkingChannel work = working_channel(ch, cfg.noise_power_w);
    const GroupLayout layout = cfg.layout();
    const RVec min_rates = cfg.min_rate_vector();
    const double P = cfg.total_power_w;
    const double tau = cfg.leakage_threshold_w / work.gain_unit;

    BeamformingState s = init.state;
    exact_aux(s, work.ch);

    AmoOptions amo_opt = AmoOptions::from(cfg.solver);
    amo_opt.update_analog = !opt.full_digital;
    amo_opt.record_trace = opt.record_traces;
    ScaOptions sca_opt = ScaOptions::from(cfg.solver);
    sca_opt.max_iter = cfg.solver.driver_sca_max_iter;

    Solution sol;
    sol.rank_deficient_start = init.rank_deficient;
    sol.beamforming = s;
    double prev_rate = std::numeric_limits<double>::quiet_NaN();
    int it = 0;
    for (; it < cfg.solver.outer_max; ++it)
    {
        const Evaluation e = evaluate(work.ch, work.noise, s, layout, min_rates, P, tau);
        OuterTraceRow row{it, e.feasible ? e.rates.total : 0.0, 0.0, e.feasible, e.leak.worst, 0, 0};
        if (e.feasible && (!sol.feasible || e.rates.total > sol.sum_rate))
            record(sol, e, s);
        const double rate = e.alloc.powers.user_powers.size() ? e.rates.total : 0.0;
        // The first analog pass starts from exact auxiliaries, so one digital update is always allowed
        const bool settled = it > 1 && std::abs(rate - prev_rate) <= cfg.solver.outer_rate_tol;
        prev_rate = rate;
        if (settled || !opt.optimize_beams || e.alloc.powers.user_powers.size() == 0)
        {
            row.best_rate = sol.sum_rate;
            sol.trace.push_back(row);
            break;
        }

        const AmoResult amo = amo_optimize(s, work.ch, amo_opt);
        row.amo_sweeps = amo.sweeps;
        if (opt.record_traces)
            sol.amo_trace.insert(sol.amo_trace.end(), amo.trace.begin(), amo.trace.end());

        // Powers and order of this iteration stay fixed inside the digital update
        ScaFixed fixed;
        fixed.theta = s.theta;
        fixed.F = s.analog;
        fixed.D = s.hybrid;
        fixed.powers = e.target;
        fixed.order = e.alloc.order;
        fixed.min_rates = e.target_rates ? min_rates : RVec::Zero(min_rates.size());
        fixed.lambda = cfg.penalty_weight;
        fixed.leakage = tau;
        fixed.noise = work.noise;
        try
        {
            const ScaSubproblem sub(work.ch, layout, fixed);
            const ScaResult r = sca_optimize(sub, s.digital, sca_opt);
            row.sca_iterations = r.iterations;
            s.digital = r.point.W;
            s.aux_u = r.u;
            s.aux_v = r.point.V;
            s.aux_z = r.point.Z;
            if (opt.record_traces)
                sol.sca_trace.insert(sol.sca_trace.end(), r.trace.begin(), r.trace.end());
        }
        catch (const Infeasible &)
        {
            exact_aux(s, work.ch);
        }

        for (int n = 0; n < layout.n_groups(); ++n)
        {
            const double nrm = (s.analog * s.digital.col(n)).norm();
            if (nrm > 1.0)
                scale_group(s, n, 1.0 / nrm);
        }
        enforce_leakage(s, work.ch, layout, tau);
        s.hybrid = hybrid_from(s.analog, s.digital, s.hybrid);

        row.best_rate = sol.sum_rate;
        sol.trace.push_back(row);
    }
    if (it == cfg.solver.outer_max)
    {
        const Evaluation e = evaluate(work.ch, work.noise, s, layout, min_rates, P, tau);
        if (e.feasible && (!sol.feasible || e.rates.total > sol.sum_rate))
            record(sol, e, s);
        sol.trace.push_back({it, e.feasible ? e.rates.total : 0.0, sol.sum_rate, e.feasible, e.leak.worst, 0, 0});
    }
    sol.outer_iterations = std::min(it + 1, cfg.solver.outer_max);
    if (!sol.feasible)
    {
        sol.sum_rate = 0.0;
        sol.per_user_rates = RVec::Zero(layout.n_users());
    }
    return sol;
}

Certificate certify(const ScenarioConfig &cfg, const ChannelSet &ch, const Solution &sol)
{
    Certificate c;
    if (!sol.feasible)
        return c;
    const WorkingChannel work = working_channel(ch, cfg.noise_power_w);
    const GroupLayout layout = cfg.layout();
    const BeamformingState &s = sol.beamforming;
    const RMat gains = gain_table(work.ch, s) * (work.gain_unit / cfg.noise_power_w);
    const RateReport r = sum_rate(gains, sol.powers, layout, sol.order, 1.0);
    const RVec gam = cfg.min_rate_vector();
    c.min_rate = (gam - r.per_user).maxCoeff();
    c.power = sol.powers.user_powers.sum() - cfg.total_power_w;
    const double tau = cfg.leakage_threshold_w / cfg.noise_power_w;
    c.leakage = -tau;
    for (int u = 0; u < layout.n_users(); ++u)
        for (int i = 0; i < layout.n_groups(); ++i)
            if (i != layout.group_of(u))
                c.leakage = std::max(c.leakage, gains(u, i) - tau);
    c.manifold = manifold_violation(circle_point(s.theta));
    c.manifold = std::max(c.manifold,
                          manifold_violation(circle_point(s.analog, 1.0 / std::sqrt(double(s.analog.rows())))));
    c.manifold = std::max(c.manifold, manifold_violation(oblique_point(s.hybrid)));
    for (int n = 0; n < s.digital.cols(); ++n)
        c.power = std::max(c.power, (s.analog * s.digital.col(n)).norm() - 1.0);
    return c;
}

} // namespace risnoma
