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

#include "risnoma/rate_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace risnoma {

double effective_gain(const CVec &h, const CVec &theta, const CMat &G, const CMat &F, const CVec &w)
{
    if (h.size() != G.rows() || theta.size() != G.rows() || F.rows() != G.cols() || w.size() != F.cols())
        throw InvalidDimension("effective_gain: inconsistent dimensions");
    const cd y = h.dot(theta.cwiseProduct(G * (F * w)));  // dot conjugates h
    return std::norm(y);
}

RMat gain_table(const ChannelSet &ch, const CVec &theta, const CMat &F, const CMat &W)
{
    if (theta.size() != ch.ap_ris.rows() || F.rows() != ch.ap_ris.cols() || W.rows() != F.cols())
        throw InvalidDimension("gain_table: inconsistent dimensions");
    const CMat U = ch.ap_ris * (F * W);  // u_i columns
    const int K = ch.n_users();
    RMat g(K, W.cols());
    for (int u = 0; u < K; ++u)
    {
        const CVec c = theta.conjugate().cwiseProduct(ch.ris_user[u]);  // h^H Theta u = c^H u
        g.row(u) = (c.adjoint() * U).cwiseAbs2();
    }
    return g;
}

RMat gain_table(const ChannelSet &ch, const BeamformingState &s) { return gain_table(ch, s.theta, s.analog, s.digital); }

std::vector<int> decoding_order(const std::vector<double> &gains)
{
    std::vector<int> idx(gains.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return gains[a] > gains[b]; });
    return idx;
}

DecodingOrder decoding_order(const RMat &gains, const GroupLayout &layout)
{
    DecodingOrder order(layout.n_groups());
    for (int n = 0; n < layout.n_groups(); ++n)
    {
        std::vector<double> g(layout.size(n));
        for (int k = 0; k < layout.size(n); ++k)
            g[k] = gains(layout.user(n, k), n);
        order[n] = decoding_order(g);
    }
    return order;
}

double sinr(int n, int k, const RMat &gains, const PowerSolution &p, const GroupLayout &layout,
            const DecodingOrder &order, double noise, SinrMode mode)
{
    if (!(noise > 0.0))
        throw InvalidConfig("noise power must be positive");
    const int user = layout.user(n, order[n][k]);
    const double g = gains(user, n);
    double intra = 0.0;
    for (int j = 0; j < k; ++j)
        intra += p.user_powers(layout.user(n, order[n][j]));
    double denom = g * intra + noise;
    if (mode == SinrMode::Full)
    {
        for (int i = 0; i < layout.n_groups(); ++i)
        {
            if (i == n)
                continue;
            for (int j = 0; j < layout.size(i); ++j)
                denom += gains(user, i) * p.user_powers(layout.user(i, j));
        }
    }
    return g * p.user_powers(user) / denom;
}

RateReport sum_rate(const RMat &gains, const PowerSolution &p, const GroupLayout &layout, const DecodingOrder &order,
                    double noise, SinrMode mode)
{
    RateReport r;
    r.per_user = RVec::Zero(layout.n_users());
    for (int n = 0; n < layout.n_groups(); ++n)
        for (int k = 0; k < layout.size(n); ++k)
            r.per_user(layout.user(n, order[n][k])) = std::log2(1.0 + sinr(n, k, gains, p, layout, order, noise, mode));
    r.total = r.per_user.sum();
    return r;
}

LeakageReport leakage_check(const RMat &gains, const GroupLayout &layout, double threshold)
{
    LeakageReport rep;
    rep.ok.assign(layout.n_users(), std::vector<bool>(layout.n_groups(), true));
    for (int u = 0; u < layout.n_users(); ++u)
    {
        for (int i = 0; i < layout.n_groups(); ++i)
        {
            if (i == layout.group_of(u))
                continue;
            const double leak = gains(u, i);
            rep.worst = std::max(rep.worst, leak);
            if (!(leak <= threshold))
            {
                rep.ok[u][i] = false;
                rep.all_ok = false;
            }
        }
    }
    return rep;
}

LeakageReport leakage_ok(const BeamformingState &s, const ChannelSet &ch, const GroupLayout &layout, double threshold)
{
    return leakage_check(gain_table(ch, s), layout, threshold);
}

CVec received_signal(const BeamformingState &s, const PowerSolution &p, const ChannelSet &ch,
                     const GroupLayout &layout, const CVec &symbols, const CVec &noise)
{
    const int K = layout.n_users();
    if (symbols.size() != K || noise.size() != K || ch.n_users() != K || s.digital.cols() != layout.n_groups())
        throw InvalidDimension("received_signal: inconsistent dimensions");
    // P s collapses the symbols of each group into one stream per beam
    CVec streams = CVec::Zero(layout.n_groups());
    for (int u = 0; u < K; ++u)
        streams(layout.group_of(u)) += std::sqrt(p.user_powers(u)) * symbols(u);
    const CVec x = ch.ap_ris * (s.analog * (s.digital * streams));
    CVec y(K);
    for (int u = 0; u < K; ++u)
        y(u) = ch.ris_user[u].dot(s.theta.cwiseProduct(x)) + noise(u);
    return y;
}

} // namespace risnoma
