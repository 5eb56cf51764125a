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

#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "risnoma/types.hpp"

namespace risnoma {

struct PathLossParams
{
    double eta_a_db = 73.0;      // Offset in dB
    double eta_b = 2.92;         // Exponent
    double shadow_std_db = 8.7;  // Log-normal shadowing std in dB
};

// Planar layout: obstacle at the origin, AP at (-ap_obstacle_m, 0), RIS at (ris_obstacle_m, 0),
// users spread evenly over an arc of the circle of radius user_radius_m around the obstacle,
// centred on the RIS side.
struct Geometry
{
    double ap_obstacle_m = 16.0;
    double ris_obstacle_m = 9.0;
    double user_radius_m = 50.0;
    double user_arc_deg = 120.0;
    std::vector<double> ris_user_m;  // Optional per-user RIS-user distance override
    std::vector<double> ap_user_m;   // Optional per-user AP-user distance override

    double ap_ris_m() const { return ap_obstacle_m + ris_obstacle_m; }
};

struct SolverOptions
{
    // Alternating manifold optimization
    double theta_tol = 1e-6;
    double analog_tol = 1e-6;
    double hybrid_tol = 1e-6;
    double amo_outer_tol = 1e-5;
    int amo_inner_max = 200;
    int amo_outer_max = 50;
    double armijo_c = 1e-4;
    double armijo_initial_step = 1.0;
    int armijo_max_halvings = 50;

    // Successive convex approximation
    double sca_tol = 1e-5;
    double sca_kkt_tol = 1e-4;
    int sca_max_iter = 200;
    int driver_sca_max_iter = 10;  // per digital update inside the outer loop
    double barrier_tol = 1e-8;
    double barrier_mu = 10.0;

    // Outer alternating loop
    double outer_rate_tol = 1e-4;
    int outer_max = 30;
};

struct ScenarioConfig
{
    int n_tx_antennas = 32;
    int n_ris_elements = 64;
    int n_rf_chains = 3;
    std::vector<int> group_sizes{2, 2, 2};

    double total_power_w = 1.0;          // 30 dBm
    double noise_power_w = 1e-15;        // -120 dBm
    std::vector<double> min_rates{1.0};  // One entry per user, or a single broadcast value
    double leakage_threshold_w = 1e-15;  // Defaults to the noise power
    double penalty_weight = 100.0;

    Geometry geometry;
    PathLossParams path_loss;
    int paths_per_user = 3;

    bool array_gain = true;          // Scale G by sqrt(Nt*Nr) and h by sqrt(Nr/L)
    double blockage_loss_db = 100.0; // Extra loss of the obstacle-blocked direct AP-user link

    std::uint64_t rng_seed = 1;
    SolverOptions solver;

    int n_users() const;
    int n_groups() const { return static_cast<int>(group_sizes.size()); }
    GroupLayout layout() const { return GroupLayout(group_sizes); }
    double min_rate(int user) const;
    RVec min_rate_vector() const;

    void validate() const;

    // N_t=8, N_r=16, N=2 groups of 2 users
    static ScenarioConfig desk();
};

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

ScenarioConfig config_from_json(const nlohmann::json &j);
nlohmann::json config_to_json(const ScenarioConfig &cfg);

} // namespace risnoma
