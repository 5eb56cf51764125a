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
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "risnoma/baselines.hpp"
#include "risnoma/config.hpp"

namespace risnoma {

struct ExperimentSpec
{
    std::vector<Scheme> schemes{Scheme::RisHybridNoma};
    std::string sweep_var = "none";  // gamma, total_power (dBm), d_IO (m), n_ris_elements
    std::vector<double> sweep_values{0.0};
    int trials = 1;
    std::uint64_t master_seed = 1;
    ScenarioConfig cfg = ScenarioConfig::desk();
    int jobs = 1;
    bool record_wall_time = false;  // wall_ms is written as 0 otherwise, keeping CSV output reproducible

    void validate() const;
};

ExperimentSpec spec_from_json(const nlohmann::json &j);
ExperimentSpec load_spec(const std::string &path);

ScenarioConfig apply_sweep(const ScenarioConfig &cfg, const std::string &var, double value);

struct AggregateRow
{
    Scheme scheme = Scheme::RisHybridNoma;
    double sweep_value = 0.0;
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation
    double feasible_frac = 0.0;
    int count = 0;
};

struct ExperimentResult
{
    std::vector<TrialResult> trials;  // scheme-major, then sweep value, then trial
    std::vector<AggregateRow> aggregate;
};

ExperimentResult run_monte_carlo(const ExperimentSpec &spec);
std::vector<AggregateRow> aggregate(const std::vector<TrialResult> &trials);

void write_trials_csv(std::ostream &os, const ExperimentSpec &spec, const std::vector<TrialResult> &trials);
void write_aggregate_csv(std::ostream &os, const std::vector<AggregateRow> &rows);

// Writes <prefix>.csv and <prefix>_summary.csv; throws Error naming the failing path
void write_results(const std::string &prefix, const ExperimentSpec &spec, const ExperimentResult &res);

} // namespace risnoma
