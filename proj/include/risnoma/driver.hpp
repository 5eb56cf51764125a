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

#include <vector>

#include "risnoma/config.hpp"
#include "risnoma/manifold.hpp"
#include "risnoma/power_alloc.hpp"
#include "risnoma/rate_model.hpp"
#include "risnoma/sca.hpp"

namespace risnoma {

struct OuterTraceRow
{
    int iteration = 0;
    double sum_rate = 0.0;
    double best_rate = 0.0;
    bool feasible = false;
    double worst_leakage = 0.0;  // largest other-group gain over the noise power
    int amo_sweeps = 0;
    int sca_iterations = 0;
};

struct Solution
{
    PowerSolution powers;
    DecodingOrder order;
    BeamformingState beamforming;
    double sum_rate = 0.0;
    RVec per_user_rates;
    int outer_iterations = 0;
    bool feasible = false;
    bool rank_deficient_start = false;
    double worst_leakage = 0.0;  // over the noise power

    std::vector<OuterTraceRow> trace;
    std::vector<AmoTraceRow> amo_trace;
    std::vector<ScaTraceRow> sca_trace;
};

struct DriverOptions
{
    bool full_digital = false;  // F fixed to a unitary DFT, N_RF = N_t
    bool optimize_beams = true; // false stops after the initial power allocation
    bool record_traces = false;
};

struct InitialState
{
    PowerSolution powers;
    BeamformingState state;
    bool rank_deficient = false;
};

// Uniform group powers, random phases, ZF digital beams on the strongest user per group.
// Draws theta (RIS channels only) and then F from rng.
InitialState initialize(const ScenarioConfig &cfg, const ChannelSet &ch, Rng &rng, bool full_digital = false);

// Channel rescaled so that G has unit average entry power and the average phase-random cascade gain
// of a user is one. Gains in working units equal true gains divided by gain_unit.
struct WorkingChannel
{
    ChannelSet ch;
    double gain_unit = 1.0;
    double noise = 1.0;  // noise power in working units
};
WorkingChannel working_channel(const ChannelSet &ch, double noise_power);

// Alternating power allocation, AMO and SCA. The returned beams refer to the caller's channel.
Solution optimize(const ScenarioConfig &cfg, const ChannelSet &ch, Rng &rng, const DriverOptions &opt = {});

// Evaluates a fixed beam design: closed-form allocation powers, approximate SINR rates, constraint check
Solution evaluate_design(const ScenarioConfig &cfg, const ChannelSet &ch, const BeamformingState &s);

// Worst constraint violations of a solution, all <= 0 when certified
struct Certificate
{
    double min_rate = 0.0;   // max(gamma - R) per user
    double power = 0.0;      // sum p - P
    double leakage = 0.0;    // max(gain / noise - tau / noise) over other groups
    double manifold = 0.0;
    bool ok(double rate_tol = 1e-6, double power_tol = 1e-9, double leak_tol = 1e-6, double man_tol = 1e-9) const
    {
        return min_rate <= rate_tol && power <= power_tol && leakage <= leak_tol && manifold <= man_tol;
    }
};
Certificate certify(const ScenarioConfig &cfg, const ChannelSet &ch, const Solution &sol);

} // namespace risnoma
