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

#include "risnoma/power_alloc.hpp"

#include <cmath>
#include <string>

namespace risnoma {

namespace {

void check_group_inputs(const RVec &gains_desc, const RVec &min_rates_desc)
{
    if (gains_desc.size() == 0 || gains_desc.size() != min_rates_desc.size())
        throw InvalidDimension("group gains and minimum rates must be non-empty and of equal length");
}

// Fraction (2^g - 1) / 2^g of the residual power taken by a non-leader
double share(double gamma) { return -std::expm1(-gamma * M_LN2); }

} // namespace

RVec intra_group_split(double group_power, const RVec &gains_desc, const RVec &min_rates_desc, double noise)
{
    check_group_inputs(gains_desc, min_rates_desc);
    if (!(group_power >= 0.0))
        throw InfeasibleBudget("negative group power", -group_power);
    const Eigen::Index K = gains_desc.size();
    RVec p = RVec::Zero(K);
    double tail = 0.0;  // sum of powers of weaker users
    for (Eigen::Index k = K - 1; k >= 1; --k)
    {
        const double c = share(min_rates_desc(k));
        if (c == 0.0)
            continue;
        if (!(gains_desc(k) > 0.0))
            throw InfeasibleRates("user with zero gain has a positive minimum rate");
        p(k) = c * (group_power - tail + noise / gains_desc(k));
        tail += p(k);
    }
    const double leader = group_power - tail;
    if (leader < 0.0)
    {
        const double deficit = -leader;
        if (deficit > 1e-12 * std::max(1.0, group_power))
            throw InfeasibleBudget("group power " + std::to_string(group_power) + " W short by " +
                                       std::to_string(deficit) + " W",
                                   deficit);
        p(0) = 0.0;
    }
    else
    {
        p(0) = leader;
    }
    return p;
}

GroupLinearCoeffs linear_coeffs(const RVec &gains_desc, const RVec &min_rates_desc, double noise)
{
    check_group_inputs(gains_desc, min_rates_desc);
    if (!(gains_desc(0) > 0.0))
        throw DegenerateGroup("group leader has zero effective gain");
    const double g1 = gains_desc(0);
    // Leader power is prod_k 2^-gamma_k * P_n minus the accumulated noise offsets
    double keep = 1.0;
    double offset = 0.0;
    for (Eigen::Index k = 1; k < gains_desc.size(); ++k)
    {
        const double gamma = min_rates_desc(k);
        if (gamma == 0.0)
            continue;
        if (!(gains_desc(k) > 0.0))
            throw InfeasibleRates("user with zero gain has a positive minimum rate");
        keep *= std::exp2(-gamma);
        offset += (g1 / gains_desc(k)) * std::expm1(gamma * M_LN2) * keep;
    }
    return {g1 / noise * keep, -offset};
}

RVec unconstrained_opt(const std::vector<GroupLinearCoeffs> &coeffs, double total_power)
{
    const auto N = static_cast<Eigen::Index>(coeffs.size());
    if (N == 0)
        throw InvalidDimension("unconstrained_opt needs at least one group");
    double s = 0.0;
    for (const auto &c : coeffs)
    {
        if (!(c.beta > 0.0))
            throw InfeasibleRates("non-positive group slope");
        s += (c.alpha + 1.0) / c.beta;
    }
    RVec P(N);
    for (Eigen::Index n = 0; n < N; ++n)
        P(n) = total_power / N - (coeffs[n].alpha + 1.0) / coeffs[n].beta + s / N;
    return P;
}

double constrained_value(const GroupLinearCoeffs &c, double leader_min_rate)
{
    if (!(c.beta > 0.0))
        throw InfeasibleRates("non-positive group slope");
    return (std::expm1(leader_min_rate * M_LN2) - c.alpha) / c.beta;
}

GroupAllocation allocate_group_powers(const std::vector<GroupLinearCoeffs> &coeffs, const RVec &leader_min_rates,
                                      double total_power)
{
    const int N = static_cast<int>(coeffs.size());
    if (leader_min_rates.size() != N)
        throw InvalidDimension("one leader minimum rate per group is required");
    RVec floor(N);
    for (int n = 0; n < N; ++n)
        floor(n) = constrained_value(coeffs[n], leader_min_rates(n));
    const double need = floor.sum();
    const double tol = 1e-12 * std::max(1.0, total_power);
    if (need > total_power + tol)
        throw GlobalInfeasible("minimum rates need " + std::to_string(need) + " W of a " +
                                   std::to_string(total_power) + " W budget",
                               need - total_power);

    GroupAllocation out;
    out.group_powers = RVec::Zero(N);
    out.pinned.assign(N, false);
    double budget = total_power;
    while (true)
    {
        std::vector<int> free;
        for (int n = 0; n < N; ++n)
            if (!out.pinned[n])
                free.push_back(n);
        if (free.empty())
            break;
        ++out.rounds;
        std::vector<GroupLinearCoeffs> sub;
        for (int n : free)
            sub.push_back(coeffs[n]);
        const RVec P = unconstrained_opt(sub, budget);
        bool violated = false;
        for (std::size_t i = 0; i < free.size(); ++i)
        {
            const int n = free[i];
            if (P(i) < floor(n) - tol)
            {
                out.pinned[n] = true;
                out.group_powers(n) = floor(n);
                budget -= floor(n);
                violated = true;
            }
        }
        if (!violated)
        {
            for (std::size_t i = 0; i < free.size(); ++i)
                out.group_powers(free[i]) = P(i);
            break;
        }
    }
    return out;
}

double group_objective(const std::vector<GroupLinearCoeffs> &coeffs, const RVec &group_powers)
{
    double r = 0.0;
    for (std::size_t n = 0; n < coeffs.size(); ++n)
        r += std::log2(1.0 + coeffs[n].beta * group_powers(n) + coeffs[n].alpha);
    return r;
}

PowerAllocation allocate(const RMat &gains, const GroupLayout &layout, const RVec &min_rates, double total_power,
                         double noise)
{
    if (gains.rows() != layout.n_users() || gains.cols() != layout.n_groups() || min_rates.size() != layout.n_users())
        throw InvalidDimension("allocate: inconsistent dimensions");
    PowerAllocation out;
    out.order = decoding_order(gains, layout);
    const int N = layout.n_groups();
    std::vector<RVec> g_desc(N), r_desc(N);
    RVec leader_rates(N);
    for (int n = 0; n < N; ++n)
    {
        const int sz = layout.size(n);
        g_desc[n].resize(sz);
        r_desc[n].resize(sz);
        for (int k = 0; k < sz; ++k)
        {
            const int u = layout.user(n, out.order[n][k]);
            g_desc[n](k) = gains(u, n);
            r_desc[n](k) = min_rates(u);
        }
        leader_rates(n) = r_desc[n](0);
        out.coeffs.push_back(linear_coeffs(g_desc[n], r_desc[n], noise));
    }
    GroupAllocation ga = allocate_group_powers(out.coeffs, leader_rates, total_power);
    out.rounds = ga.rounds;
    out.pinned = ga.pinned;
    out.powers.group_powers = ga.group_powers;
    out.powers.user_powers = RVec::Zero(layout.n_users());
    for (int n = 0; n < N; ++n)
    {
        const RVec p = intra_group_split(ga.group_powers(n), g_desc[n], r_desc[n], noise);
        for (int k = 0; k < layout.size(n); ++k)
            out.powers.user_powers(layout.user(n, out.order[n][k])) = p(k);
    }
    return out;
}

PowerAllocation allocate(const ChannelSet &ch, const BeamformingState &s, const ScenarioConfig &cfg)
{
    return allocate(gain_table(ch, s), cfg.layout(), cfg.min_rate_vector(), cfg.total_power_w, cfg.noise_power_w);
}

} // namespace risnoma
