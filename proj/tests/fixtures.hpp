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


// Shared desk-scale instances for the optimizer tests.

#pragma once

#include <optional>

#include "risnoma/baselines.hpp"
#include "risnoma/driver.hpp"

namespace fixture {

using namespace risnoma;

// Desk geometry with a link budget where the reflected path dominates the blocked direct path
inline ScenarioConfig desk_budget()
{
    ScenarioConfig cfg = ScenarioConfig::desk();
    cfg.noise_power_w = dbm_to_watt(-220.0);
    cfg.leakage_threshold_w = cfg.noise_power_w * 1e6;
    cfg.blockage_loss_db = 110.0;
    return cfg;
}

struct DeskSca
{
    ChannelSet ch;  // working units
    GroupLayout layout;
    ScaFixed fixed;
    BeamformingState state;
};

// Driver starting point with closed-form allocation powers; empty when the draw is globally infeasible
inline std::optional<DeskSca> desk_sca(const ScenarioConfig &cfg, std::uint64_t seed)
{
    const TrialChannels tc = trial_channels(cfg, seed);
    const WorkingChannel w = working_channel(tc.ris, cfg.noise_power_w);
    Rng rng = trial_rng(seed);
    const InitialState init = initialize(cfg, w.ch, rng);
    const GroupLayout layout(cfg.group_sizes);
    const RVec gam = cfg.min_rate_vector();
    PowerAllocation alloc;
    try
    {
        alloc = allocate(gain_table(w.ch, init.state), layout, gam, cfg.total_power_w, w.noise);
    }
    catch (const Infeasible &)
    {
        return std::nullopt;
    }
    DeskSca d{w.ch, layout, {}, init.state};
    d.fixed.theta = init.state.theta;
    d.fixed.F = init.state.analog;
    d.fixed.D = init.state.hybrid;
    d.fixed.powers = alloc.powers;
    d.fixed.order = alloc.order;
    d.fixed.min_rates = gam;
    d.fixed.lambda = cfg.penalty_weight;
    d.fixed.leakage = cfg.leakage_threshold_w / w.gain_unit;
    d.fixed.noise = w.noise;
    return d;
}

} // namespace fixture
