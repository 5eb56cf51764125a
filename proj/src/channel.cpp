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

#include "risnoma/channel.hpp"

#include <cmath>

namespace risnoma {

namespace {

constexpr std::uint64_t kRisStream = 1;
constexpr std::uint64_t kDirectStream = 2;

double shadow_draw(Rng &rng, double std_db)
{
    if (std_db == 0.0)
        return 0.0;
    std::normal_distribution<double> nd(0.0, std_db);
    return nd(rng);
}

// Places user u on the arc and returns its planar position
std::pair<double, double> user_position(const Geometry &geo, int u, int n_users)
{
    const double arc = geo.user_arc_deg * M_PI / 180.0;
    const double phi = -0.5 * arc + arc * (u + 0.5) / n_users;
    return {geo.user_radius_m * std::cos(phi), geo.user_radius_m * std::sin(phi)};
}

std::vector<CVec> gen_user_links(const ScenarioConfig &cfg, Rng &rng, int n_elems, const std::vector<double> &dist,
                                 double extra_loss_db, ChannelMeta *meta)
{
    if (cfg.paths_per_user < 1)
        throw InvalidConfig("paths_per_user must be at least 1");
    const int K = cfg.n_users();
    const int L = cfg.paths_per_user;
    std::vector<CVec> h;
    h.reserve(K);
    if (meta)
    {
        meta->beta.assign(K, {});
        meta->angles.assign(K, {});
        meta->user_shadow_db.assign(K, 0.0);
        meta->user_distance_m = dist;
    }
    for (int u = 0; u < K; ++u)
    {
        const double shadow = shadow_draw(rng, cfg.path_loss.shadow_std_db);
        const double pl = path_loss_db(dist[u], cfg.path_loss, shadow) + extra_loss_db;
        const double var = std::pow(10.0, -pl / 10.0);
        std::vector<cd> beta(L);
        std::vector<double> ang(L);
        for (int l = 0; l < L; ++l)
        {
            beta[l] = complex_gaussian(rng, var);
            ang[l] = uniform_angle(rng);
        }
        h.push_back(geometric_channel(n_elems, beta, ang, cfg.array_gain));
        if (meta)
        {
            meta->beta[u] = beta;
            meta->angles[u] = ang;
            meta->user_shadow_db[u] = shadow;
        }
    }
    return h;
}

} // namespace

CVec ula_response(int n_elems, double angle)
{
    if (n_elems < 1)
        throw InvalidDimension("ula_response needs at least one element");
    CVec a(n_elems);
    const double s = std::sin(angle);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_elems));
    for (int m = 0; m < n_elems; ++m)
        a(m) = scale * std::polar(1.0, M_PI * m * s);
    return a;
}

double path_loss_db(double distance_m, const PathLossParams &pl, double shadow_db)
{
    if (!(distance_m > 0.0))
        throw InvalidGeometry("path loss needs a positive distance");
    return pl.eta_a_db + 10.0 * pl.eta_b * std::log10(distance_m) + shadow_db;
}

CMat rank_one_channel(cd alpha, int n_r, int n_t, double aoa, double aod, bool array_gain)
{
    const double g = array_gain ? std::sqrt(static_cast<double>(n_r) * n_t) : 1.0;
    return (alpha * g) * ula_response(n_r, aoa) * ula_response(n_t, aod).transpose();
}

CVec geometric_channel(int n, const std::vector<cd> &beta, const std::vector<double> &angles, bool array_gain)
{
    if (beta.empty() || beta.size() != angles.size())
        throw InvalidConfig("geometric channel needs matching, non-empty path lists");
    CVec h = CVec::Zero(n);
    for (std::size_t l = 0; l < beta.size(); ++l)
        h += beta[l] * ula_response(n, angles[l]);
    if (array_gain)
        h *= std::sqrt(static_cast<double>(n) / static_cast<double>(beta.size()));
    return h;
}

std::vector<double> ris_user_distances(const ScenarioConfig &cfg)
{
    const auto &geo = cfg.geometry;
    if (!geo.ris_user_m.empty())
        return geo.ris_user_m;
    const int K = cfg.n_users();
    std::vector<double> d(K);
    for (int u = 0; u < K; ++u)
    {
        auto [x, y] = user_position(geo, u, K);
        d[u] = std::hypot(x - geo.ris_obstacle_m, y);
        if (!(d[u] > 0.0))
            throw InvalidGeometry("user coincides with the RIS");
    }
    return d;
}

std::vector<double> ap_user_distances(const ScenarioConfig &cfg)
{
    const auto &geo = cfg.geometry;
    if (!geo.ap_user_m.empty())
        return geo.ap_user_m;
    const int K = cfg.n_users();
    std::vector<double> d(K);
    for (int u = 0; u < K; ++u)
    {
        auto [x, y] = user_position(geo, u, K);
        d[u] = std::hypot(x + geo.ap_obstacle_m, y);
        if (!(d[u] > 0.0))
            throw InvalidGeometry("user coincides with the AP");
    }
    return d;
}

CMat gen_ap_ris_channel(const ScenarioConfig &cfg, Rng &rng, ChannelMeta *meta)
{
    const double shadow = shadow_draw(rng, cfg.path_loss.shadow_std_db);
    const double pl = path_loss_db(cfg.geometry.ap_ris_m(), cfg.path_loss, shadow);
    const cd alpha = complex_gaussian(rng, std::pow(10.0, -pl / 10.0));
    const double aoa = uniform_angle(rng);
    const double aod = uniform_angle(rng);
    if (meta)
    {
        meta->alpha = alpha;
        meta->aoa = aoa;
        meta->aod = aod;
        meta->ap_ris_shadow_db = shadow;
    }
    return rank_one_channel(alpha, cfg.n_ris_elements, cfg.n_tx_antennas, aoa, aod, cfg.array_gain);
}

std::vector<CVec> gen_ris_user_channels(const ScenarioConfig &cfg, Rng &rng, ChannelMeta *meta)
{
    return gen_user_links(cfg, rng, cfg.n_ris_elements, ris_user_distances(cfg), 0.0, meta);
}

std::vector<CVec> gen_direct_channels(const ScenarioConfig &cfg, Rng &rng, ChannelMeta *meta)
{
    return gen_user_links(cfg, rng, cfg.n_tx_antennas, ap_user_distances(cfg), cfg.blockage_loss_db, meta);
}

ChannelSet generate_channels(const ScenarioConfig &cfg, std::uint64_t seed)
{
    cfg.validate();
    Rng rng(derive_seed(seed, kRisStream));
    ChannelSet ch;
    ch.ap_ris = gen_ap_ris_channel(cfg, rng, &ch.meta);
    ch.ris_user = gen_ris_user_channels(cfg, rng, &ch.meta);
    return ch;
}

ChannelSet generate_direct_channels(const ScenarioConfig &cfg, std::uint64_t seed)
{
    cfg.validate();
    Rng rng(derive_seed(seed, kDirectStream));
    ChannelSet ch;
    ch.direct = true;
    ch.ap_ris = CMat::Identity(cfg.n_tx_antennas, cfg.n_tx_antennas);
    ch.ris_user = gen_direct_channels(cfg, rng, &ch.meta);
    return ch;
}

} // namespace risnoma
