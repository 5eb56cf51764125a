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

#include "risnoma/baselines.hpp"

#include <chrono>
#include <cmath>

#include "risnoma/power_alloc.hpp"

namespace risnoma {

namespace {

struct SchemeName
{
    Scheme scheme;
    const char *name;
};

constexpr SchemeName kNames[] = {
    {Scheme::RisHybridNoma, "ris-hybrid-noma"},
    {Scheme::RisFullDigitalNoma, "ris-fulldigital-noma"},
    {Scheme::NoRisHybridNoma, "no-ris-hybrid-noma"},
    {Scheme::NoRisFullDigitalNoma, "no-ris-fulldigital-noma"},
    {Scheme::NoRisFdmaOma, "no-ris-fdma-oma"},
    {Scheme::RbZf, "rb-zf"},
    {Scheme::SocpRbZfSimplified, "socp-rb-zf-simplified"},
};

// Effective row channel h^H Theta G F of one user
Eigen::RowVectorXcd effective_row(const ChannelSet &ch, const BeamformingState &s, int user)
{
    const CVec c = s.theta.conjugate().cwiseProduct(ch.ris_user[user]);
    return c.adjoint() * ch.ap_ris * s.analog;
}

Solution socp_rb_zf(const ScenarioConfig &cfg, const ChannelSet &ch, BeamformingState s)
{
    const GroupLayout layout = cfg.layout();
    Solution best = evaluate_design(cfg, ch, s);
    DecodingOrder prev_order;
    for (int round = 1; round <= 5; ++round)
    {
        Solution cur = evaluate_design(cfg, ch, s);
        cur.outer_iterations = round;
        if (cur.feasible && (!best.feasible || cur.sum_rate > best.sum_rate))
            best = cur;
        const DecodingOrder order = decoding_order(gain_table(ch, s), layout);
        if (order == prev_order)
            break;
        prev_order = order;
        CMat H(layout.n_groups(), s.analog.cols());
        for (int n = 0; n < layout.n_groups(); ++n)
            H.row(n) = effective_row(ch, s, layout.user(n, order[n][0]));
        s.digital = zf_digital(H, s.analog).W;
        CMat D = s.analog * s.digital;
        for (Eigen::Index n = 0; n < D.cols(); ++n)
            if (D.col(n).norm() > 0.0)
                D.col(n).normalize();
        s.hybrid = D;
    }
    return best;
}

} // namespace

const std::vector<Scheme> &all_schemes()
{
    static const std::vector<Scheme> v = [] {
        std::vector<Scheme> out;
        for (const auto &e : kNames)
            out.push_back(e.scheme);
        return out;
    }();
    return v;
}

std::string scheme_name(Scheme s)
{
    for (const auto &e : kNames)
        if (e.scheme == s)
            return e.name;
    return "unknown";
}

Scheme parse_scheme(const std::string &name)
{
    for (const auto &e : kNames)
        if (name == e.name)
            return e.scheme;
    throw InvalidConfig("unknown scheme '" + name + "'");
}

bool uses_ris(Scheme s)
{
    return s == Scheme::RisHybridNoma || s == Scheme::RisFullDigitalNoma || s == Scheme::RbZf ||
           s == Scheme::SocpRbZfSimplified;
}

ZfResult zf_digital(const CMat &H, const CMat &F)
{
    if (H.rows() == 0 || H.cols() != F.cols())
        throw InvalidDimension("zf_digital: H must have one column per RF chain");
    ZfResult r;
    Eigen::JacobiSVD<CMat> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVec sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    const double cut = 1e-10 * smax;
    RVec inv = RVec::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
    {
        if (sv(i) > cut && sv(i) > 0.0)
            inv(i) = 1.0 / sv(i);
        else
            r.rank_deficient = true;
    }
    r.rank_deficient |= H.rows() > H.cols();
    r.W = svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
    for (Eigen::Index n = 0; n < r.W.cols(); ++n)
    {
        const double nrm = (F * r.W.col(n)).norm();
        if (nrm > 0.0)
            r.W.col(n) /= nrm;
    }
    return r;
}

TrialChannels trial_channels(const ScenarioConfig &cfg, std::uint64_t seed)
{
    return {generate_channels(cfg, seed), generate_direct_channels(cfg, seed)};
}

Rng trial_rng(std::uint64_t seed) { return Rng(derive_seed(seed, 3)); }

double fdma_oma_rate(const RVec &gains, double total_power, double noise, const RVec &min_rates, bool *feasible)
{
    const auto K = gains.size();
    if (K == 0 || min_rates.size() != K)
        throw InvalidDimension("fdma_oma_rate: one gain and minimum rate per user is required");
    const double share = 1.0 / static_cast<double>(K);
    const double p = total_power * share;
    double total = 0.0;
    bool ok = true;
    for (Eigen::Index k = 0; k < K; ++k)
    {
        const double r = share * std::log2(1.0 + static_cast<double>(K) * gains(k) * p / noise);
        ok &= r >= min_rates(k) - 1e-12;
        total += r;
    }
    if (feasible)
        *feasible = ok;
    return total;
}

TrialResult baseline_eval(Scheme scheme, const ScenarioConfig &cfg, const TrialChannels &ch, Rng &rng)
{
    const auto t0 = std::chrono::steady_clock::now();
    TrialResult r;
    r.scheme = scheme;
    const ChannelSet &link = uses_ris(scheme) ? ch.ris : ch.direct;

    Solution sol;
    bool have_solution = true;
    try
    {
    switch (scheme)
    {
    case Scheme::RisHybridNoma:
    case Scheme::NoRisHybridNoma:
        sol = optimize(cfg, link, rng, {});
        break;
    case Scheme::RisFullDigitalNoma:
    case Scheme::NoRisFullDigitalNoma: {
        DriverOptions o;
        o.full_digital = true;
        sol = optimize(cfg, link, rng, o);
        break;
    }
    case Scheme::RbZf:
        sol = evaluate_design(cfg, link, initialize(cfg, link, rng).state);
        break;
    case Scheme::SocpRbZfSimplified:
        sol = socp_rb_zf(cfg, link, initialize(cfg, link, rng).state);
        break;
    case Scheme::NoRisFdmaOma: {
        have_solution = false;
        const BeamformingState s = initialize(cfg, link, rng).state;
        const GroupLayout layout = cfg.layout();
        const WorkingChannel w = working_channel(link, cfg.noise_power_w);
        const RMat g = gain_table(w.ch, s);
        RVec own(layout.n_users());
        for (int u = 0; u < layout.n_users(); ++u)
            own(u) = g(u, layout.group_of(u));
        bool ok = false;
        const double rate = fdma_oma_rate(own, cfg.total_power_w, w.noise, cfg.min_rate_vector(), &ok);
        r.feasible = ok;
        r.sum_rate = ok ? rate : 0.0;
        r.per_user_rates = RVec::Zero(layout.n_users());
        if (ok)
            for (int u = 0; u < layout.n_users(); ++u)
                r.per_user_rates(u) = std::log2(1.0 + own(u) * cfg.total_power_w / w.noise) / layout.n_users();
        break;
    }
    }
    }
    catch (const Infeasible &)
    {
        have_solution = false;
        r.feasible = false;
        r.sum_rate = 0.0;
        r.per_user_rates = RVec::Zero(cfg.n_users());
    }
    if (have_solution)
    {
        r.feasible = sol.feasible;
        r.sum_rate = sol.feasible ? sol.sum_rate : 0.0;
        r.per_user_rates = sol.per_user_rates;
        r.outer_iters = sol.outer_iterations;
        r.certificate = certify(cfg, link, sol);
    }
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

TrialResult baseline_eval(Scheme scheme, const ScenarioConfig &cfg, std::uint64_t seed)
{
    const TrialChannels ch = trial_channels(cfg, seed);
    Rng rng = trial_rng(seed);
    return baseline_eval(scheme, cfg, ch, rng);
}

} // namespace risnoma
