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

#include "risnoma/config.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <string>

namespace risnoma {

GroupLayout::GroupLayout(std::vector<int> sizes) : sizes_(std::move(sizes))
{
    offsets_.reserve(sizes_.size());
    for (std::size_t n = 0; n < sizes_.size(); ++n)
    {
        if (sizes_[n] < 1)
            throw InvalidConfig("group " + std::to_string(n) + " is empty");
        offsets_.push_back(n_users_);
        for (int k = 0; k < sizes_[n]; ++k)
            group_of_.push_back(static_cast<int>(n));
        n_users_ += sizes_[n];
    }
}

cd complex_gaussian(Rng &rng, double variance)
{
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5 * variance));
    const double re = nd(rng);
    const double im = nd(rng);
    return {re, im};
}

double uniform_angle(Rng &rng)
{
    std::uniform_real_distribution<double> ud(0.0, 2.0 * M_PI);
    return ud(rng);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    // splitmix64 finalizer over the combined value
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

int ScenarioConfig::n_users() const { return std::accumulate(group_sizes.begin(), group_sizes.end(), 0); }

double ScenarioConfig::min_rate(int user) const
{
    if (min_rates.size() == 1)
        return min_rates.front();
    return min_rates.at(user);
}

RVec ScenarioConfig::min_rate_vector() const
{
    RVec g(n_users());
    for (int u = 0; u < n_users(); ++u)
        g(u) = min_rate(u);
    return g;
}

void ScenarioConfig::validate() const
{
    if (n_tx_antennas < 1 || n_ris_elements < 1 || n_rf_chains < 1)
        throw InvalidDimension("antenna, element and RF chain counts must be positive");
    if (group_sizes.empty())
        throw InvalidConfig("at least one group is required");
    if (static_cast<int>(group_sizes.size()) != n_rf_chains)
        throw InvalidConfig("number of groups must equal the number of RF chains");
    for (int s : group_sizes)
        if (s < 1)
            throw InvalidConfig("group sizes must be positive");
    if (n_users() < n_rf_chains)
        throw InvalidConfig("fewer users than RF chains");
    if (n_rf_chains > n_tx_antennas)
        throw InvalidConfig("more RF chains than transmit antennas");
    if (!(total_power_w > 0.0) || !(noise_power_w > 0.0) || !(leakage_threshold_w > 0.0))
        throw InvalidConfig("powers and thresholds must be strictly positive");
    if (!(penalty_weight > 0.0))
        throw InvalidConfig("penalty weight must be positive");
    if (min_rates.size() != 1 && static_cast<int>(min_rates.size()) != n_users())
        throw InvalidConfig("min_rates must have one entry or one per user");
    for (double g : min_rates)
        if (!(g >= 0.0) || !std::isfinite(g))
            throw InvalidConfig("minimum rates must be finite and non-negative");
    if (paths_per_user < 1)
        throw InvalidConfig("paths_per_user must be at least 1");
    const auto &geo = geometry;
    if (!(geo.ap_obstacle_m > 0.0) || !(geo.ris_obstacle_m > 0.0) || !(geo.user_radius_m > 0.0))
        throw InvalidGeometry("distances must be strictly positive");
    if (!(geo.user_arc_deg >= 0.0) || geo.user_arc_deg > 360.0)
        throw InvalidGeometry("user arc must lie in [0, 360] degrees");
    for (const auto *v : {&geo.ris_user_m, &geo.ap_user_m})
    {
        if (!v->empty() && static_cast<int>(v->size()) != n_users())
            throw InvalidGeometry("distance overrides need one entry per user");
        for (double d : *v)
            if (!(d > 0.0))
                throw InvalidGeometry("distance overrides must be strictly positive");
    }
    if (!(path_loss.shadow_std_db >= 0.0))
        throw InvalidConfig("shadowing std must be non-negative");
    if (!(blockage_loss_db >= 0.0))
        throw InvalidConfig("blockage loss must be non-negative");
    const auto &s = solver;
    if (s.amo_inner_max < 1 || s.amo_outer_max < 1 || s.sca_max_iter < 1 || s.driver_sca_max_iter < 1 || s.outer_max < 1 ||
        s.armijo_max_halvings < 1)
        throw InvalidConfig("iteration caps must be positive");
    if (!(s.sca_kkt_tol >= 0.0))
        throw InvalidConfig("sca_kkt_tol must be non-negative");
    if (!(s.barrier_mu > 1.0) || !(s.barrier_tol > 0.0) || !(s.armijo_c > 0.0 && s.armijo_c < 1.0))
        throw InvalidConfig("invalid solver parameters");
}

ScenarioConfig ScenarioConfig::desk()
{
    ScenarioConfig cfg;
    cfg.n_tx_antennas = 8;
    cfg.n_ris_elements = 16;
    cfg.n_rf_chains = 2;
    cfg.group_sizes = {2, 2};
    return cfg;
}

// ---------------------------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

void reject_unknown(const json &j, std::initializer_list<const char *> known, const std::string &where)
{
    std::set<std::string> allowed(known.begin(), known.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw InvalidConfig("unknown key '" + it.key() + "' in " + where);
}

template <typename T>
void read(const json &j, const char *key, T &out)
{
    if (!j.contains(key))
        return;
    try
    {
        out = j.at(key).get<T>();
    }
    catch (const json::exception &e)
    {
        throw InvalidConfig(std::string("bad value for '") + key + "': " + e.what());
    }
}

} // namespace

ScenarioConfig config_from_json(const json &j)
{
    if (!j.is_object())
        throw InvalidConfig("scenario config must be a JSON object");
    reject_unknown(j,
                   {"n_tx_antennas", "n_ris_elements", "n_rf_chains", "group_sizes", "total_power_dbm",
                    "total_power_w", "noise_power_dbm", "noise_power_w", "min_rate", "min_rates",
                    "leakage_threshold_dbm", "leakage_threshold_w", "penalty_weight", "geometry", "path_loss",
                    "paths_per_user", "array_gain", "blockage_loss_db", "rng_seed", "solver"},
                   "scenario");

    ScenarioConfig cfg;
    read(j, "n_tx_antennas", cfg.n_tx_antennas);
    read(j, "n_ris_elements", cfg.n_ris_elements);
    read(j, "group_sizes", cfg.group_sizes);
    cfg.n_rf_chains = static_cast<int>(cfg.group_sizes.size());
    read(j, "n_rf_chains", cfg.n_rf_chains);

    if (j.contains("total_power_dbm") && j.contains("total_power_w"))
        throw InvalidConfig("give total power in dBm or W, not both");
    if (j.contains("total_power_dbm"))
        cfg.total_power_w = dbm_to_watt(j.at("total_power_dbm").get<double>());
    read(j, "total_power_w", cfg.total_power_w);

    if (j.contains("noise_power_dbm") && j.contains("noise_power_w"))
        throw InvalidConfig("give noise power in dBm or W, not both");
    if (j.contains("noise_power_dbm"))
        cfg.noise_power_w = dbm_to_watt(j.at("noise_power_dbm").get<double>());
    read(j, "noise_power_w", cfg.noise_power_w);

    // The leakage threshold follows the noise power unless set explicitly
    cfg.leakage_threshold_w = cfg.noise_power_w;
    if (j.contains("leakage_threshold_dbm") && j.contains("leakage_threshold_w"))
        throw InvalidConfig("give the leakage threshold in dBm or W, not both");
    if (j.contains("leakage_threshold_dbm"))
        cfg.leakage_threshold_w = dbm_to_watt(j.at("leakage_threshold_dbm").get<double>());
    read(j, "leakage_threshold_w", cfg.leakage_threshold_w);

    if (j.contains("min_rate") && j.contains("min_rates"))
        throw InvalidConfig("give min_rate or min_rates, not both");
    if (j.contains("min_rate"))
        cfg.min_rates = {j.at("min_rate").get<double>()};
    read(j, "min_rates", cfg.min_rates);

    read(j, "penalty_weight", cfg.penalty_weight);
    read(j, "paths_per_user", cfg.paths_per_user);
    read(j, "array_gain", cfg.array_gain);
    read(j, "blockage_loss_db", cfg.blockage_loss_db);
    read(j, "rng_seed", cfg.rng_seed);

    if (j.contains("geometry"))
    {
        const json &g = j.at("geometry");
        reject_unknown(g, {"ap_obstacle_m", "ris_obstacle_m", "user_radius_m", "user_arc_deg", "ris_user_m", "ap_user_m"},
                       "geometry");
        read(g, "ap_obstacle_m", cfg.geometry.ap_obstacle_m);
        read(g, "ris_obstacle_m", cfg.geometry.ris_obstacle_m);
        read(g, "user_radius_m", cfg.geometry.user_radius_m);
        read(g, "user_arc_deg", cfg.geometry.user_arc_deg);
        read(g, "ris_user_m", cfg.geometry.ris_user_m);
        read(g, "ap_user_m", cfg.geometry.ap_user_m);
    }
    if (j.contains("path_loss"))
    {
        const json &p = j.at("path_loss");
        reject_unknown(p, {"eta_a_db", "eta_b", "shadow_std_db"}, "path_loss");
        read(p, "eta_a_db", cfg.path_loss.eta_a_db);
        read(p, "eta_b", cfg.path_loss.eta_b);
        read(p, "shadow_std_db", cfg.path_loss.shadow_std_db);
    }
    if (j.contains("solver"))
    {
        const json &s = j.at("solver");
        reject_unknown(s,
                       {"theta_tol", "analog_tol", "hybrid_tol", "amo_outer_tol", "amo_inner_max", "amo_outer_max",
                        "armijo_c", "armijo_initial_step", "armijo_max_halvings", "sca_tol", "sca_kkt_tol", "sca_max_iter", "driver_sca_max_iter",
                        "barrier_tol", "barrier_mu", "outer_rate_tol", "outer_max"},
                       "solver");
        auto &o = cfg.solver;
        read(s, "theta_tol", o.theta_tol);
        read(s, "analog_tol", o.analog_tol);
        read(s, "hybrid_tol", o.hybrid_tol);
        read(s, "amo_outer_tol", o.amo_outer_tol);
        read(s, "amo_inner_max", o.amo_inner_max);
        read(s, "amo_outer_max", o.amo_outer_max);
        read(s, "armijo_c", o.armijo_c);
        read(s, "armijo_initial_step", o.armijo_initial_step);
        read(s, "armijo_max_halvings", o.armijo_max_halvings);
        read(s, "sca_tol", o.sca_tol);
        read(s, "sca_kkt_tol", o.sca_kkt_tol);
        read(s, "sca_max_iter", o.sca_max_iter);
        read(s, "driver_sca_max_iter", o.driver_sca_max_iter);
        read(s, "barrier_tol", o.barrier_tol);
        read(s, "barrier_mu", o.barrier_mu);
        read(s, "outer_rate_tol", o.outer_rate_tol);
        read(s, "outer_max", o.outer_max);
    }
    cfg.validate();
    return cfg;
}

json config_to_json(const ScenarioConfig &cfg)
{
    json j;
    j["n_tx_antennas"] = cfg.n_tx_antennas;
    j["n_ris_elements"] = cfg.n_ris_elements;
    j["n_rf_chains"] = cfg.n_rf_chains;
    j["group_sizes"] = cfg.group_sizes;
    j["total_power_w"] = cfg.total_power_w;
    j["noise_power_w"] = cfg.noise_power_w;
    j["min_rates"] = cfg.min_rates;
    j["leakage_threshold_w"] = cfg.leakage_threshold_w;
    j["penalty_weight"] = cfg.penalty_weight;
    j["paths_per_user"] = cfg.paths_per_user;
    j["array_gain"] = cfg.array_gain;
    j["blockage_loss_db"] = cfg.blockage_loss_db;
    j["rng_seed"] = cfg.rng_seed;
    j["geometry"] = {{"ap_obstacle_m", cfg.geometry.ap_obstacle_m},
                     {"ris_obstacle_m", cfg.geometry.ris_obstacle_m},
                     {"user_radius_m", cfg.geometry.user_radius_m},
                     {"user_arc_deg", cfg.geometry.user_arc_deg},
                     {"ris_user_m", cfg.geometry.ris_user_m},
                     {"ap_user_m", cfg.geometry.ap_user_m}};
    j["path_loss"] = {{"eta_a_db", cfg.path_loss.eta_a_db},
                      {"eta_b", cfg.path_loss.eta_b},
                      {"shadow_std_db", cfg.path_loss.shadow_std_db}};
    const auto &o = cfg.solver;
    j["solver"] = {{"theta_tol", o.theta_tol},
                   {"analog_tol", o.analog_tol},
                   {"hybrid_tol", o.hybrid_tol},
                   {"amo_outer_tol", o.amo_outer_tol},
                   {"amo_inner_max", o.amo_inner_max},
                   {"amo_outer_max", o.amo_outer_max},
                   {"armijo_c", o.armijo_c},
                   {"armijo_initial_step", o.armijo_initial_step},
                   {"armijo_max_halvings", o.armijo_max_halvings},
                   {"sca_tol", o.sca_tol},
                   {"sca_kkt_tol", o.sca_kkt_tol},
                   {"sca_max_iter", o.sca_max_iter},
                   {"driver_sca_max_iter", o.driver_sca_max_iter},
                   {"barrier_tol", o.barrier_tol},
                   {"barrier_mu", o.barrier_mu},
                   {"outer_rate_tol", o.outer_rate_tol},
                   {"outer_max", o.outer_max}};
    return j;
}

} // namespace risnoma
