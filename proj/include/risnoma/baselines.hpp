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
#include <string>
#include <vector>

#include "risnoma/channel.hpp"
#include "risnoma/config.hpp"
#include "risnoma/driver.hpp"

namespace risnoma {

enum class Scheme
{
    RisHybridNoma,
    RisFullDigitalNoma,
    NoRisHybridNoma,
    NoRisFullDigitalNoma,
    NoRisFdmaOma,
    RbZf,
    SocpRbZfSimplified
};

const std::vector<Scheme> &all_schemes();
std::string scheme_name(Scheme s);
Scheme parse_scheme(const std::string &name);  // throws InvalidConfig on unknown names
bool uses_ris(Scheme s);

struct ZfResult
{
    CMat W;
    bool rank_deficient = false;  // pseudo-inverse fallback was used
};

// W = H^H (H H^H)^-1 for leader channels stacked as rows of H, columns scaled so ||F w_n|| = 1
ZfResult zf_digital(const CMat &H, const CMat &F);

struct TrialResult
{
    Scheme scheme = Scheme::RisHybridNoma;
    double sweep_value = 0.0;
    int trial = 0;
    double sum_rate = 0.0;
    bool feasible = false;
    int outer_iters = 0;
    double wall_ms = 0.0;
    RVec per_user_rates;
    Certificate certificate;
};

// Channels and optimizer randomness of one trial
struct TrialChannels
{
    ChannelSet ris;
    ChannelSet direct;
};
TrialChannels trial_channels(const ScenarioConfig &cfg, std::uint64_t seed);
Rng trial_rng(std::uint64_t seed);

TrialResult baseline_eval(Scheme scheme, const ScenarioConfig &cfg, const TrialChannels &ch, Rng &rng);
TrialResult baseline_eval(Scheme scheme, const ScenarioConfig &cfg, std::uint64_t seed);

// Equal 1/K shares, each user served alone with the full power in its share
double fdma_oma_rate(const RVec &gains, double total_power, double noise, const RVec &min_rates, bool *feasible);

} // namespace risnoma
