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

#include "risnoma/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

namespace risnoma {

namespace {

const std::vector<std::string> kSweepVars = {"none", "gamma", "total_power", "d_IO", "n_ris_elements"};

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

void ExperimentSpec::validate() const
{
    if (schemes.empty())
        throw InvalidConfig("experiment needs at least one scheme");
    if (trials < 1)
        throw InvalidConfig("trials must be at least 1");
    if (jobs < 1)
        throw InvalidConfig("jobs must be at least 1");
    if (std::find(kSweepVars.begin(), kSweepVars.end(), sweep_var) == kSweepVars.end())
        throw InvalidConfig("unknown sweep variable '" + sweep_var + "'");
    if (sweep_values.empty())
        throw InvalidConfig("sweep grid must be non-empty");
    for (std::size_t i = 1; i < sweep_values.size(); ++i)
        if (!(sweep_values[i] > sweep_values[i - 1]))
            throw InvalidConfig("sweep grid must be strictly increasing");
    for (double v : sweep_values)
        apply_sweep(cfg, sweep_var, v).validate();
}

ExperimentSpec spec_from_json(const nlohmann::json &j)
{
    if (!j.is_object())
        throw InvalidConfig("experiment spec must be a JSON object");
    static const std::vector<std::string> known = {"scheme", "schemes", "sweep", "trials", "master_seed",
                                                   "config", "jobs", "record_wall_time"};
    for (const auto &[key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw InvalidConfig("unknown experiment key '" + key + "'");

    ExperimentSpec spec;
    try
    {
        if (j.contains("scheme") && j.contains("schemes"))
            throw InvalidConfig("give either scheme or schemes");
        if (j.contains("scheme"))
            spec.schemes = {parse_scheme(j.at("scheme").get<std::string>())};
        if (j.contains("schemes"))
        {
            spec.schemes.clear();
            for (const auto &s : j.at("schemes"))
                spec.schemes.push_back(parse_scheme(s.get<std::string>()));
        }
        if (j.contains("sweep"))
        {
            const auto &sw = j.at("sweep");
            for (const auto &[key, _] : sw.items())
                if (key != "variable" && key != "values")
                    throw InvalidConfig("unknown sweep key '" + key + "'");
            spec.sweep_var = sw.at("variable").get<std::string>();
            spec.sweep_values = sw.at("values").get<std::vector<double>>();
        }
        if (j.contains("trials"))
            spec.trials = j.at("trials").get<int>();
        if (j.contains("master_seed"))
            spec.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (j.contains("jobs"))
            spec.jobs = j.at("jobs").get<int>();
        if (j.contains("record_wall_time"))
            spec.record_wall_time = j.at("record_wall_time").get<bool>();
        if (j.contains("config"))
            spec.cfg = config_from_json(j.at("config"));
    }
    catch (const nlohmann::json::exception &e)
    {
        throw InvalidConfig(std::string("experiment spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

ExperimentSpec load_spec(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidConfig("cannot open experiment spec '" + path + "'");
    nlohmann::json j;
    try
    {
        in >> j;
    }
    catch (const nlohmann::json::exception &e)
    {
        throw InvalidConfig("'" + path + "': " + e.what());
    }
    return spec_from_json(j);
}

ScenarioConfig apply_sweep(const ScenarioConfig &cfg, const std::string &var, double value)
{
    ScenarioConfig out = cfg;
    if (var == "none")
        return out;
    if (var == "gamma")
        out.min_rates = {value};
    else if (var == "total_power")
        out.total_power_w = dbm_to_watt(value);
    else if (var == "d_IO")
        out.geometry.ris_obstacle_m = value;
    else if (var == "n_ris_elements")
    {
        if (value != std::floor(value) || value < 1.0)
            throw InvalidConfig("n_ris_elements sweep values must be positive integers");
        out.n_ris_elements = static_cast<int>(value);
    }
    else
        throw InvalidConfig("unknown sweep variable '" + var + "'");
    return out;
}

ExperimentResult run_monte_carlo(const ExperimentSpec &spec)
{
    spec.validate();
    struct Task
    {
        Scheme scheme;
        double value;
        int trial;
    };
    std::vector<Task> tasks;
    for (Scheme s : spec.schemes)
        for (double v : spec.sweep_values)
            for (int t = 0; t < spec.trials; ++t)
                tasks.push_back({s, v, t});

    ExperimentResult res;
    res.trials.resize(tasks.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        for (;;)
        {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size())
                return;
            const Task &task = tasks[i];
            try
            {
                const ScenarioConfig cfg = apply_sweep(spec.cfg, spec.sweep_var, task.value);
                TrialResult r = baseline_eval(task.scheme, cfg, spec.master_seed + static_cast<std::uint64_t>(task.trial));
                r.sweep_value = task.value;
                r.trial = task.trial;
                if (!spec.record_wall_time)
                    r.wall_ms = 0.0;
                res.trials[i] = std::move(r);
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next.store(tasks.size());
            }
        }
    };

    const int n_threads = std::min<int>(spec.jobs, static_cast<int>(tasks.size()));
    if (n_threads <= 1)
    {
        worker();
    }
    else
    {
        std::vector<std::thread> pool;
        for (int k = 0; k < n_threads; ++k)
            pool.emplace_back(worker);
        for (auto &th : pool)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);
    res.aggregate = aggregate(res.trials);
    return res;
}

std::vector<AggregateRow> aggregate(const std::vector<TrialResult> &trials)
{
    std::vector<AggregateRow> rows;
    auto find = [&](Scheme s, double v) -> AggregateRow & {
        for (auto &r : rows)
            if (r.scheme == s && r.sweep_value == v)
                return r;
        rows.push_back({s, v, 0.0, 0.0, 0.0, 0});
        return rows.back();
    };
    for (const auto &t : trials)
    {
        AggregateRow &r = find(t.scheme, t.sweep_value);
        ++r.count;
        r.mean += t.sum_rate;
        r.feasible_frac += t.feasible ? 1.0 : 0.0;
    }
    for (auto &r : rows)
    {
        r.mean /= r.count;
        r.feasible_frac /= r.count;
        double ss = 0.0;
        for (const auto &t : trials)
            if (t.scheme == r.scheme && t.sweep_value == r.sweep_value)
                ss += (t.sum_rate - r.mean) * (t.sum_rate - r.mean);
        r.std = r.count > 1 ? std::sqrt(ss / (r.count - 1)) : 0.0;
    }
    return rows;
}

void write_trials_csv(std::ostream &os, const ExperimentSpec &spec, const std::vector<TrialResult> &trials)
{
    os << "scheme,sweep_var,sweep_value,trial,sum_rate_bps_hz,feasible,outer_iters,wall_ms\n";
    for (const auto &t : trials)
        os << scheme_name(t.scheme) << ',' << spec.sweep_var << ',' << fmt(t.sweep_value) << ',' << t.trial << ','
           << fmt(t.sum_rate) << ',' << (t.feasible ? 1 : 0) << ',' << t.outer_iters << ',' << fmt(t.wall_ms) << '\n';
}

void write_aggregate_csv(std::ostream &os, const std::vector<AggregateRow> &rows)
{
    os << "scheme,sweep_value,mean,std,feasible_frac\n";
    for (const auto &r : rows)
        os << scheme_name(r.scheme) << ',' << fmt(r.sweep_value) << ',' << fmt(r.mean) << ',' << fmt(r.std) << ','
           << fmt(r.feasible_frac) << '\n';
}

void write_results(const std::string &prefix, const ExperimentSpec &spec, const ExperimentResult &res)
{
    const std::string trials_path = prefix + ".csv";
    const std::string summary_path = prefix + "_summary.csv";
    {
        std::ofstream out(trials_path);
        if (!out)
            throw Error("cannot write '" + trials_path + "'");
        write_trials_csv(out, spec, res.trials);
        if (!out)
            throw Error("write failed for '" + trials_path + "'");
    }
    {
        std::ofstream out(summary_path);
        if (!out)
            throw Error("cannot write '" + summary_path + "'");
        write_aggregate_csv(out, res.aggregate);
        if (!out)
            throw Error("write failed for '" + summary_path + "'");
    }
}

} // namespace risnoma
