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

#include "risnoma/config.hpp"
#include "risnoma/types.hpp"

namespace risnoma {

// Random factors behind one channel realization
struct ChannelMeta
{
    cd alpha{0.0, 0.0};                        // AP-RIS path coefficient
    double aoa = 0.0;                          // RIS arrival angle
    double aod = 0.0;                          // AP departure angle
    double ap_ris_shadow_db = 0.0;
    std::vector<std::vector<cd>> beta;         // [user][path]
    std::vector<std::vector<double>> angles;   // [user][path]
    std::vector<double> user_shadow_db;
    std::vector<double> user_distance_m;
};

// Cascade description. For RIS schemes ap_ris is G (N_r x N_t) and ris_user holds h (length N_r).
// For direct links ap_ris is the N_t x N_t identity, ris_user holds the AP-user channel and the
// phase shifts are pinned to one.
struct ChannelSet
{
    CMat ap_ris;
    std::vector<CVec> ris_user;
    bool direct = false;
    ChannelMeta meta;

    int n_users() const { return static_cast<int>(ris_user.size()); }
    int n_elements() const { return static_cast<int>(ap_ris.rows()); }
    int n_tx() const { return static_cast<int>(ap_ris.cols()); }
};

// Unit-norm half-wavelength ULA response, element m = exp(j*pi*m*sin(angle)) / sqrt(n)
CVec ula_response(int n_elems, double angle);

// eta_a + 10 * eta_b * log10(distance) + shadow
double path_loss_db(double distance_m, const PathLossParams &pl, double shadow_db);

// alpha * g * a_r(aoa) * a_t(aod)^T with g = sqrt(Nt*Nr) when array_gain is set
CMat rank_one_channel(cd alpha, int n_r, int n_t, double aoa, double aod, bool array_gain);

// sum_l beta_l * b(angle_l), scaled by sqrt(n/L) when array_gain is set
CVec geometric_channel(int n, const std::vector<cd> &beta, const std::vector<double> &angles, bool array_gain);

// Distances from the RIS and from the AP to every user
std::vector<double> ris_user_distances(const ScenarioConfig &cfg);
std::vector<double> ap_user_distances(const ScenarioConfig &cfg);

CMat gen_ap_ris_channel(const ScenarioConfig &cfg, Rng &rng, ChannelMeta *meta = nullptr);
std::vector<CVec> gen_ris_user_channels(const ScenarioConfig &cfg, Rng &rng, ChannelMeta *meta = nullptr);
std::vector<CVec> gen_direct_channels(const ScenarioConfig &cfg, Rng &rng, ChannelMeta *meta = nullptr);

// Full realizations. RIS and direct links use independent streams of the same seed.
ChannelSet generate_channels(const ScenarioConfig &cfg, std::uint64_t seed);
ChannelSet generate_direct_channels(const ScenarioConfig &cfg, std::uint64_t seed);

} // namespace risnoma
