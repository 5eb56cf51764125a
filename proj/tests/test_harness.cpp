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
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "risnoma/experiment.hpp"

using namespace risnoma;

namespace {

std::vector<std::string> split_lines(const std::string &text)
{
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);)
        out.push_back(line);
    return out;
}

std::vector<std::string> split_fields(const std::string &line)
{
    std::vector<std::string> out;
    std::istringstream is(line);
    for (std::string f; std::getline(is, f, ',');)
        out.push_back(f);
    return out;
}

ExperimentSpec cheap_spec()
{
    ExperimentSpec spec;
    spec.schemes = {Scheme::NoRisFdmaOma, Scheme::RbZf};
    spec.sweep_var = "gamma";
    spec.sweep_values = {0.5, 1.0};
    spec.trials = 3;
    spec.master_seed = 77;
    spec.cfg = fixture::desk_budget();
    return spec;
}

} // namespace

TEST_CASE("zero forcing on an identity channel")
{
    const ZfResult r = zf_digital(CMat::Identity(2, 2), CMat::Identity(2, 2));
    CHECK(!r.rank_deficient);
    CHECK(std::abs(std::abs(r.W(0, 0)) - 1.0) <= 1e-12);
    CHECK(std::abs(std::abs(r.W(1, 1)) - 1.0) <= 1e-12);
    CHECK(std::abs(r.W(0, 1)) <= 1e-15);
    CHECK(std::abs(r.W(1, 0)) <= 1e-15);
}

TEST_CASE("zero forcing diagonalizes random channels")
{
    std::mt19937_64 rng(3);
    for (int t = 0; t < 10; ++t)
    {
        const CMat H = oracle::random_cmat(rng, 3, 3);
        const CMat F = oracle::random_phases(rng, 15, 1.0 / std::sqrt(5.0)).reshaped(5, 3);
        const CMat Heff = H * F.adjoint() * F;  // arbitrary full-rank effective channel
        const ZfResult r = zf_digital(Heff, F);
        const CMat HW = Heff * r.W;
        for (int i = 0; i < 3; ++i)
        {
            CHECK(std::abs((F * r.W.col(i)).norm() - 1.0) <= 1e-12);
            for (int n = 0; n < 3; ++n)
                if (n != i)
                    CHECK(std::abs(HW(n, i)) <= 1e-9 * std::abs(HW(i, i)));
        }
    }
}

TEST_CASE("zero forcing flags a rank-deficient channel")
{
    CMat H(2, 2);
    H << 1.0, 2.0, 2.0, 4.0;
    const ZfResult r = zf_digital(H, CMat::Identity(2, 2));
    CHECK(r.rank_deficient);
    CHECK(r.W.allFinite());
}

TEST_CASE("fdma with one user is the single-user rate")
{
    bool ok = false;
    const double r = fdma_oma_rate(RVec::Constant(1, 3.0), 2.0, 0.5, RVec::Zero(1), &ok);
    CHECK(ok);
    CHECK(std::abs(r - std::log2(1.0 + 3.0 * 2.0 / 0.5)) <= 1e-15);
}

TEST_CASE("fdma equal shares hand value")
{
    RVec g(2);
    g << 1.0, 4.0;
    bool ok = true;
    // Each user gets half the band and half the power: 0.5 log2(1 + 2 g (P/2) / noise)
    const double r = fdma_oma_rate(g, 1.0, 1.0, RVec::Constant(2, 1.0), &ok);
    CHECK(std::abs(r - 0.5 * (std::log2(2.0) + std::log2(5.0))) <= 1e-15);
    CHECK(!ok);  // user 0 gets 0.5 bit/s/Hz
    CHECK_THROWS_AS(fdma_oma_rate(g, 1.0, 1.0, RVec::Zero(1), nullptr), InvalidDimension);
}

TEST_CASE("scheme names round trip")
{
    for (Scheme s : all_schemes())
        CHECK(parse_scheme(scheme_name(s)) == s);
    CHECK(scheme_name(Scheme::RisHybridNoma) == "ris-hybrid-noma");
    CHECK(scheme_name(Scheme::SocpRbZfSimplified) == "socp-rb-zf-simplified");
    CHECK_THROWS_AS(parse_scheme("ris-magic"), InvalidConfig);
    CHECK(uses_ris(Scheme::RbZf));
    CHECK(!uses_ris(Scheme::NoRisHybridNoma));
}

TEST_CASE("proposed scheme delegates to the driver")
{
    const ScenarioConfig cfg = fixture::desk_budget();
    const std::uint64_t seed = 1001;
    const TrialResult r = baseline_eval(Scheme::RisHybridNoma, cfg, seed);
    const TrialChannels tc = trial_channels(cfg, seed);
    Rng rng = trial_rng(seed);
    const Solution sol = optimize(cfg, tc.ris, rng);
    CHECK(r.sum_rate == sol.sum_rate);
    CHECK(r.feasible == sol.feasible);
    CHECK(r.outer_iters == sol.outer_iterations);
}

TEST_CASE("baseline results respect the zero-rate convention and certify")
{
    const ScenarioConfig cfg = fixture::desk_budget();
    for (Scheme s : {Scheme::NoRisFdmaOma, Scheme::RbZf, Scheme::SocpRbZfSimplified})
    {
        for (std::uint64_t seed = 0; seed < 5; ++seed)
        {
            const TrialResult r = baseline_eval(s, cfg, seed);
            CHECK(r.sum_rate >= 0.0);
            if (!r.feasible)
                CHECK(r.sum_rate == 0.0);
            else if (s != Scheme::NoRisFdmaOma)
                CHECK(r.certificate.ok());
        }
    }
}

TEST_CASE("monte carlo csv is deterministic and aggregates recompute")
{
    const ExperimentSpec spec = cheap_spec();
    const ExperimentResult a = run_monte_carlo(spec);
    const ExperimentResult b = run_monte_carlo(spec);
    std::ostringstream ta, tb, sa, sb;
    write_trials_csv(ta, spec, a.trials);
    write_trials_csv(tb, spec, b.trials);
    write_aggregate_csv(sa, a.aggregate);
    write_aggregate_csv(sb, b.aggregate);
    CHECK(ta.str() == tb.str());
    CHECK(sa.str() == sb.str());

    const auto lines = split_lines(ta.str());
    REQUIRE(lines.size() == 1 + 2 * 2 * 3);
    CHECK(lines[0] == "scheme,sweep_var,sweep_value,trial,sum_rate_bps_hz,feasible,outer_iters,wall_ms");
    const auto agg = split_lines(sa.str());
    CHECK(agg[0] == "scheme,sweep_value,mean,std,feasible_frac");

    // Recompute every cell from the per-trial rows
    REQUIRE(a.aggregate.size() == 4);
    for (const AggregateRow &row : a.aggregate)
    {
        std::vector<double> rates;
        int feasible = 0;
        for (std::size_t i = 1; i < lines.size(); ++i)
        {
            const auto f = split_fields(lines[i]);
            REQUIRE(f.size() == 8);
            CHECK(f[1] == "gamma");
            CHECK(f[7] == "0");
            if (f[0] != scheme_name(row.scheme) || std::stod(f[2]) != row.sweep_value)
                continue;
            const double rate = std::stod(f[4]);
            rates.push_back(rate);
            feasible += f[5] == "1" || f[5] == "true";
            if (!(f[5] == "1" || f[5] == "true"))
                CHECK(rate == 0.0);
        }
        REQUIRE(rates.size() == 3);
        double m = 0.0, v = 0.0;
        oracle::mean_var(rates, m, v);
        CHECK(std::abs(row.mean - m) <= 1e-9 * std::max(1.0, m));
        CHECK(std::abs(row.std - std::sqrt(v)) <= 1e-9 * std::max(1.0, m));
        CHECK(row.feasible_frac == doctest::Approx(feasible / 3.0));
        CHECK(row.count == 3);
    }
}

TEST_CASE("aggregating a constant output")
{
    std::vector<TrialResult> rows(4);
    for (int i = 0; i < 4; ++i)
    {
        rows[i].scheme = Scheme::RbZf;
        rows[i].trial = i;
        rows[i].sum_rate = 2.5;
        rows[i].feasible = true;
    }
    const auto agg = aggregate(rows);
    REQUIRE(agg.size() == 1);
    CHECK(agg[0].mean == 2.5);
    CHECK(agg[0].std == 0.0);
    CHECK(agg[0].feasible_frac == 1.0);
}

TEST_CASE("thread count does not change the output")
{
    ExperimentSpec spec = cheap_spec();
    std::ostringstream one, many;
    write_trials_csv(one, spec, run_monte_carlo(spec).trials);
    spec.jobs = 3;
    write_trials_csv(many, spec, run_monte_carlo(spec).trials);
    CHECK(one.str() == many.str());
}

TEST_CASE("experiment spec validation")
{
    using nlohmann::json;
    const ExperimentSpec ok = spec_from_json(json{{"schemes", {"rb-zf", "ris-hybrid-noma"}},
                                                  {"sweep", {{"variable", "gamma"}, {"values", {0.5, 1.0}}}},
                                                  {"trials", 4},
                                                  {"master_seed", 9}});
    CHECK(ok.schemes.size() == 2);
    CHECK(ok.trials == 4);
    CHECK(ok.master_seed == 9);
    CHECK_THROWS_AS(spec_from_json(json{{"trials", 0}}), InvalidConfig);
    CHECK_THROWS_AS(spec_from_json(json{{"sweep", {{"variable", "gamma"}, {"values", {1.0, 1.0}}}}}), InvalidConfig);
    CHECK_THROWS_AS(spec_from_json(json{{"sweep", {{"variable", "gamma"}, {"values", json::array()}}}}),
                    InvalidConfig);
    CHECK_THROWS_AS(spec_from_json(json{{"sweep", {{"variable", "height"}, {"values", {1.0}}}}}), InvalidConfig);
    CHECK_THROWS_AS(spec_from_json(json{{"scheme", "warp-drive"}}), InvalidConfig);
    CHECK_THROWS_AS(spec_from_json(json{{"colour", "red"}}), InvalidConfig);
    CHECK_THROWS_AS(load_spec("/nonexistent/spec.json"), InvalidConfig);
}

TEST_CASE("sweep variables map onto the configuration")
{
    const ScenarioConfig base = ScenarioConfig::desk();
    CHECK(apply_sweep(base, "gamma", 2.0).min_rate(3) == 2.0);
    CHECK(std::abs(apply_sweep(base, "total_power", 30.0).total_power_w - 1.0) <= 1e-15);
    CHECK(apply_sweep(base, "n_ris_elements", 32.0).n_ris_elements == 32);
    const ScenarioConfig moved = apply_sweep(base, "d_IO", 20.0);
    CHECK(moved.geometry.ris_obstacle_m == 20.0);
    CHECK(ris_user_distances(moved) != ris_user_distances(base));
    CHECK_THROWS_AS(apply_sweep(base, "n_ris_elements", 2.5), InvalidConfig);
    CHECK_THROWS_AS(apply_sweep(base, "height", 1.0), InvalidConfig);
}

TEST_CASE("result files report the failing path")
{
    const ExperimentSpec spec = cheap_spec();
    ExperimentResult res;
    try
    {
        write_results("/nonexistent-dir/out", spec, res);
        FAIL("expected an error");
    }
    catch (const Error &e)
    {
        CHECK(std::string(e.what()).find("/nonexistent-dir/out") != std::string::npos);
    }
}
