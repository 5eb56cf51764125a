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
#include "risnoma/rate_model.hpp"

namespace risnoma {

// SINR of a group's leader as an affine function of the group power: beta * P_n + alpha
struct GroupLinearCoeffs
{
    double beta = 0.0;
    double alpha = 0.0;
};

// Per-user powers in decoding order for a group power P_n. Users 2..K get exactly their
// minimum rate; the leader takes the remainder.
RVec intra_group_split(double group_power, const RVec &gains_desc, const RVec &min_rates_desc, double noise);

GroupLinearCoeffs linear_coeffs(const RVec &gains_desc, const RVec &min_rates_desc, double noise);

// Water-filling optimum of sum log2(1 + beta_n P_n + alpha_n) with sum P_n = P
RVec unconstrained_opt(const std::vector<GroupLinearCoeffs> &coeffs, double total_power);

// Smallest group power that gives the leader exactly its minimum rate
double constrained_value(const GroupLinearCoeffs &c, double leader_min_rate);

struct GroupAllocation
{
    RVec group_powers;
    std::vector<bool> pinned;
    int rounds = 0;
};

// Pin violators at their constrained value and re-solve the remaining groups
GroupAllocation allocate_group_powers(const std::vector<GroupLinearCoeffs> &coeffs, const RVec &leader_min_rates,
                                      double total_power);

struct PowerAllocation
{
    PowerSolution powers;
    DecodingOrder order;
    std::vector<GroupLinearCoeffs> coeffs;
    std::vector<bool> pinned;
    int rounds = 0;
};

PowerAllocation allocate(const RMat &gains, const GroupLayout &layout, const RVec &min_rates, double total_power,
                         double noise);
PowerAllocation allocate(const ChannelSet &ch, const BeamformingState &s, const ScenarioConfig &cfg);

// Group objective sum log2(1 + beta_n P_n + alpha_n)
double group_objective(const std::vector<GroupLinearCoeffs> &coeffs, const RVec &group_powers);

} // namespace risnoma
