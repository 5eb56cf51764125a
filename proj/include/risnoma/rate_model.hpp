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

#include "risnoma/channel.hpp"
#include "risnoma/types.hpp"

namespace risnoma {

struct BeamformingState
{
    CVec theta;                 // RIS phase shifts, unit modulus
    CMat analog;                // F, N_t x N_RF
    CMat digital;               // W, N_RF x N
    CMat hybrid;                // D, N_t x N with unit-norm columns
    std::vector<CVec> aux_u;    // u_i per group
    CMat aux_v;                 // v(user, group)
    RMat aux_z;                 // z(user, group)
};

struct PowerSolution
{
    RVec group_powers;  // P_n
    RVec user_powers;   // p per user, group-major user index
};

// Per group, in-group user indices sorted by descending effective gain
using DecodingOrder = std::vector<std::vector<int>>;

enum class SinrMode
{
    Approx,  // Inter-group interference neglected
    Full
};

struct RateReport
{
    RVec per_user;
    double total = 0.0;
};

struct LeakageReport
{
    std::vector<std::vector<bool>> ok;  // [user][group], true on own group
    double worst = 0.0;
    bool all_ok = true;
};

// |h^H diag(theta) G F w|^2
double effective_gain(const CVec &h, const CVec &theta, const CMat &G, const CMat &F, const CVec &w);

// Gains of every user towards every group beam, K x N
RMat gain_table(const ChannelSet &ch, const CVec &theta, const CMat &F, const CMat &W);
RMat gain_table(const ChannelSet &ch, const BeamformingState &s);

// Descending gain, stable tie-break by original index
std::vector<int> decoding_order(const std::vector<double> &gains);
DecodingOrder decoding_order(const RMat &gains, const GroupLayout &layout);

// SINR of the user at decoding rank k (0-based) of group n
double sinr(int n, int k, const RMat &gains, const PowerSolution &p, const GroupLayout &layout,
            const DecodingOrder &order, double noise, SinrMode mode = SinrMode::Approx);

RateReport sum_rate(const RMat &gains, const PowerSolution &p, const GroupLayout &layout, const DecodingOrder &order,
                    double noise, SinrMode mode = SinrMode::Approx);

LeakageReport leakage_check(const RMat &gains, const GroupLayout &layout, double threshold);
LeakageReport leakage_ok(const BeamformingState &s, const ChannelSet &ch, const GroupLayout &layout,
                         double threshold);

// y = h^H Theta G F W P s + noise, one entry per user. symbols is group-major like users.
CVec received_signal(const BeamformingState &s, const PowerSolution &p, const ChannelSet &ch,
                     const GroupLayout &layout, const CVec &symbols, const CVec &noise);

} // namespace risnoma
