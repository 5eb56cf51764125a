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


#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "risnoma/driver.hpp"

using namespace risnoma;

namespace {

ScenarioConfig scalar_config()
{
    ScenarioConfig cfg;
    cfg.n_tx_antennas = 1;
    cfg.n_ris_elements = 1;
    cfg.n_rf_chains = 1;
    cfg.group_sizes = {1};
    cfg.min_rates = {0.5};
    cfg.total_power_w = 0.2;
    cfg.noise_power_w = 1e-15;
    return cfg;
}

ChannelSet scalar_channel(cd g, cd h)
{
    ChannelSet ch;
    ch.ap_ris = CMat::Constant(1, 1, g);
    ch.ris_user = {CVec::Constant(1, h)};
    return ch;
}

} // namespace

TEST_CASE("initial state is on the manifolds with a uniform power split")
{
    const ScenarioConfig cfg = fixture::desk_budget();
    const TrialChannels tc = trial_channels(cfg, 5);
    Rng rng = trial_rng(5);
    const InitialState init = initialize(cfg, tc.ris, rng);
    const BeamformingState &s = init.state;
    CHECK(manifold_violation(circle_point(s.theta)) <= 1e-12);
    CHECK(manifold_violation(circle_point(s.analog, 1.0 / std::sqrt(8.0))) <= 1e-12);
    CHECK(manifold_violation(oblique_point(s.hybrid)) <= 1e-12);
    for (int n = 0; n < 2; ++n)
        CHECK(std::abs((s.analog * s.digital.col(n)).norm() - 1.0) <= 1e-12);
    REQUIRE(init.powers.group_powers.size() == 2);
    CHECK(std::abs(init.powers.group_powers.sum() - cfg.total_power_w) <= 1e-15);
    CHECK(init.powers.group_powers(0) == init.powers.group_powers(1));

    Rng again = trial_rng(5);
    const InitialState twin = initialize(cfg, tc.ris, again);
    CHECK(twin.state.theta == s.theta);
    CHECK(twin.state.analog == s.analog);
    CHECK(twin.state.digital == s.digital);
}

TEST_CASE("single-user scalar link reaches the closed-form rate")
{
    const ScenarioConfig cfg = scalar_config();
    for (const auto &[g, h] : {std::pair{cd(3e-6, 1e-6), cd(-2e-1, 4e-1)}, std::pair{cd(1e-7, 0.0), cd(0.0, 2.0)}})
    {
        const ChannelSet ch = scalar_channel(g, h);
        Rng rng(7);
        const Solution sol = optimize(cfg, ch, rng);
        REQUIRE(sol.feasible);
        // |theta| = 1 and |F w| = 1, so the phase choices cannot change the gain
        const double want = std::log2(1.0 + std::norm(h) * std::norm(g) * cfg.total_power_w / cfg.noise_power_w);
        CHECK(std::abs(sol.sum_rate - want) <= 1e-6);
        CHECK(std::abs(sol.powers.user_powers(0) - cfg.total_power_w) <= 1e-12);
        CHECK(certify(cfg, ch, sol).ok());
    }
}

TEST_CASE("unreachable minimum rates give an infeasible zero-rate solution")
{
    ScenarioConfig cfg = scalar_config();
    cfg.min_rates = {40.0};
    const ChannelSet ch = scalar_channel(cd(1e-7, 0.0), cd(1.0, 0.0));
    Rng rng(1);
    const Solution sol = optimize(cfg, ch, rng);
    CHECK(!sol.feasible);
    CHECK(sol.sum_rate == 0.0);
    CHECK(sol.outer_iterations <= cfg.solver.outer_max);
}

TEST_CASE("desk runs keep the best rate monotone, certify and repeat exactly")
{
    const ScenarioConfig cfg = fixture::desk_budget();
    int feasible = 0;
    for (std::uint64_t seed = 1000; seed < 1003; ++seed)
    {
        const TrialChannels tc = trial_channels(cfg, seed);
        Rng rng = trial_rng(seed);
        DriverOptions opt;
        opt.record_traces = true;
        const Solution sol = optimize(cfg, tc.ris, rng, opt);
        CHECK(sol.outer_iterations <= cfg.solver.outer_max);
        REQUIRE(!sol.trace.empty());
        for (std::size_t i = 1; i < sol.trace.size(); ++i)
        {
            CHECK(sol.trace[i].best_rate >= sol.trace[i - 1].best_rate - 1e-6);
            if (sol.trace[i].feasible && sol.trace[i - 1].feasible)
                CHECK(sol.trace[i].sum_rate >= sol.trace[i - 1].sum_rate - 1e-6);
        }
        if (!sol.feasible)
        {
            CHECK(sol.sum_rate == 0.0);
            continue;
        }
        ++feasible;
        CHECK(sol.sum_rate == doctest::Approx(sol.trace.back().best_rate).epsilon(1e-12));
        const Certificate c = certify(cfg, tc.ris, sol);
        CHECK(c.ok());
        CHECK(c.leakage <= 1e-6);
        CHECK(std::abs(sol.per_user_rates.sum() - sol.sum_rate) <= 1e-9);

        Rng rng2 = trial_rng(seed);
        const Solution twin = optimize(cfg, tc.ris, rng2, opt);
        CHECK(twin.sum_rate == sol.sum_rate);
        CHECK(twin.beamforming.digital == sol.beamforming.digital);
        CHECK(twin.beamforming.theta == sol.beamforming.theta);
    }
    CHECK(feasible >= 1);
}

TEST_CASE("full-digital runs keep the analog stage fixed")
{
    const ScenarioConfig cfg = fixture::desk_budget();
    const TrialChannels tc = trial_channels(cfg, 1001);
    Rng rng = trial_rng(1001);
    DriverOptions opt;
    opt.full_digital = true;
    Rng r0 = trial_rng(1001);
    const InitialState init = initialize(cfg, tc.ris, r0, true);
    const Solution sol = optimize(cfg, tc.ris, rng, opt);
    CHECK(sol.beamforming.analog == init.state.analog);
    if (sol.feasible)
        CHECK(certify(cfg, tc.ris, sol).ok());
}

TEST_CASE("evaluating a fixed design matches the optimizer's accounting")
{
    const ScenarioConfig cfg = fixture::desk_budget();
    const TrialChannels tc = trial_channels(cfg, 1002);
    Rng rng = trial_rng(1002);
    const Solution sol = optimize(cfg, tc.ris, rng);
    const Solution again = evaluate_design(cfg, tc.ris, sol.beamforming);
    CHECK(again.feasible == sol.feasible);
    if (sol.feasible)
        CHECK(std::abs(again.sum_rate - sol.sum_rate) <= 1e-9 * std::max(1.0, sol.sum_rate));
}
