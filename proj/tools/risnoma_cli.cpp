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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "risnoma/barrier.hpp"
#include "risnoma/baselines.hpp"
#include "risnoma/experiment.hpp"
#include "risnoma/manifold.hpp"
#include "risnoma/power_alloc.hpp"
#include "risnoma/sca.hpp"

using namespace risnoma;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct Overrides
{
    std::uint64_t seed = 0;
    int trials = 0;
    int jobs = 0;
    std::string scheme;
    std::string sweep;  // var=v1,v2,...
    bool timing = false;
};

void apply(ExperimentSpec &spec, const Overrides &o, const CLI::App &app)
{
    if (app.count("--seed"))
        spec.master_seed = o.seed;
    if (app.count("--trials"))
        spec.trials = o.trials;
    if (app.get_option_no_throw("--jobs") && app.count("--jobs"))
        spec.jobs = o.jobs;
    if (app.get_option_no_throw("--timing") && app.count("--timing"))
        spec.record_wall_time = o.timing;
    if (!o.scheme.empty())
    {
        spec.schemes.clear();
        std::stringstream ss(o.scheme);
        std::string item;
        while (std::getline(ss, item, ','))
            spec.schemes.push_back(parse_scheme(item));
    }
    if (!o.sweep.empty())
    {
        const auto eq = o.sweep.find('=');
        if (eq == std::string::npos)
            throw InvalidConfig("--sweep expects var=v1,v2,...");
        spec.sweep_var = o.sweep.substr(0, eq);
        spec.sweep_values.clear();
        std::stringstream ss(o.sweep.substr(eq + 1));
        std::string item;
        while (std::getline(ss, item, ','))
        {
            try
            {
                spec.sweep_values.push_back(std::stod(item));
            }
            catch (const std::exception &)
            {
                throw InvalidConfig("bad sweep value '" + item + "'");
            }
        }
    }
    spec.validate();
}

int cmd_run(const std::string &spec_path, const Overrides &o, const CLI::App &app, const std::string &out)
{
    ExperimentSpec spec = spec_path.empty() ? ExperimentSpec{} : load_spec(spec_path);
    apply(spec, o, app);
    const ExperimentResult res = run_monte_carlo(spec);
    if (out.empty())
    {
        write_trials_csv(std::cout, spec, res.trials);
        std::cout << '\n';
        write_aggregate_csv(std::cout, res.aggregate);
    }
    else
    {
        write_results(out, spec, res);
        write_aggregate_csv(std::cout, res.aggregate);
    }
    return 0;
}

int cmd_trace(const std::string &spec_path, const Overrides &o, const CLI::App &app, const std::string &out)
{
    ExperimentSpec spec = spec_path.empty() ? ExperimentSpec{} : load_spec(spec_path);
    apply(spec, o, app);
    const Scheme scheme = spec.schemes.front();
    const ScenarioConfig cfg = apply_sweep(spec.cfg, spec.sweep_var, spec.sweep_values.front());
    const TrialChannels ch = trial_channels(cfg, spec.master_seed);
    Rng rng = trial_rng(spec.master_seed);
    DriverOptions opt;
    opt.record_traces = true;
    opt.full_digital = scheme == Scheme::RisFullDigitalNoma || scheme == Scheme::NoRisFullDigitalNoma;
    if (scheme == Scheme::NoRisFdmaOma || scheme == Scheme::RbZf || scheme == Scheme::SocpRbZfSimplified)
        throw InvalidConfig("trace is available for the optimized NOMA schemes only");
    const Solution sol = optimize(cfg, uses_ris(scheme) ? ch.ris : ch.direct, rng, opt);

    std::ofstream file;
    if (!out.empty())
    {
        file.open(out);
        if (!file)
            throw Error("cannot write '" + out + "'");
    }
    std::ostream &os = out.empty() ? std::cout : file;
    os << "kind,outer,block,iteration,value,aux1,aux2\n";
    int outer = 0;
    for (const auto &r : sol.trace)
        os << "outer," << r.iteration << ",-," << r.iteration << ',' << r.sum_rate << ',' << r.best_rate << ','
           << (r.feasible ? 1 : 0) << '\n';
    for (const auto &r : sol.amo_trace)
    {
        if (r.sweep == 0 && r.block == 't' && r.iteration == 0)
            ++outer;
        os << "amo," << outer << ',' << r.block << ',' << r.iteration << ',' << r.objective << ',' << r.grad_norm
           << ",0\n";
    }
    outer = 0;
    for (const auto &r : sol.sca_trace)
    {
        if (r.iteration == 0)
            ++outer;
        os << "sca," << outer << ",-," << r.iteration << ',' << r.objective << ',' << r.kkt << ',' << r.max_violation
           << '\n';
    }
    std::cerr << "sum_rate " << sol.sum_rate << " feasible " << sol.feasible << " outer_iters " << sol.outer_iterations
              << '\n';
    return 0;
}

// Quick invariant checks on small random instances
int cmd_selftest()
{
    int failures = 0;
    auto report = [&](const char *name, bool ok, double value) {
        std::printf("%-32s %s  (%.3g)\n", name, ok ? "PASS" : "FAIL", value);
        failures += ok ? 0 : 1;
    };

    ScenarioConfig cfg = ScenarioConfig::desk();
    cfg.noise_power_w = dbm_to_watt(-190.0);
    cfg.leakage_threshold_w = cfg.noise_power_w * 1e4;
    const TrialChannels ch = trial_channels(cfg, 7);
    Rng rng = trial_rng(7);
    const InitialState init = initialize(cfg, ch.ris, rng);

    {
        double worst = 0.0;
        Rng r(11);
        ManifoldPoint p = circle_point(init.state.theta);
        for (int i = 0; i < 20; ++i)
        {
            CMat d(p.value.rows(), 1);
            for (Eigen::Index k = 0; k < d.rows(); ++k)
                d(k, 0) = complex_gaussian(r, 1.0);
            p = retract(p, 0.7, d);
            worst = std::max(worst, manifold_violation(p));
        }
        report("retraction stays on manifold", worst <= 1e-12, worst);
    }
    {
        const BeamformingState &s = init.state;
        const CMat g = egrad_hybrid(s);
        double worst = 0.0;
        const double h = 1e-6;
        for (Eigen::Index i = 0; i < s.hybrid.size(); ++i)
        {
            CMat Dp = s.hybrid, Dm = s.hybrid;
            Dp(i) += h;
            Dm(i) -= h;
            const double fd = (f_hybrid(Dp, s.analog, s.digital) - f_hybrid(Dm, s.analog, s.digital)) / (2 * h);
            worst = std::max(worst, std::abs(fd - g(i).real()) / std::max(1.0, std::abs(fd)));
        }
        report("hybrid gradient vs differences", worst <= 1e-6, worst);
    }
    {
        const WorkingChannel w = working_channel(ch.ris, cfg.noise_power_w);
        const RMat gains = gain_table(w.ch, init.state);
        bool ok = true;
        double total = 0.0;
        try
        {
            const PowerAllocation a = allocate(gains, cfg.layout(), cfg.min_rate_vector(), cfg.total_power_w, w.noise);
            total = a.powers.user_powers.sum();
            ok = std::abs(total - cfg.total_power_w) <= 1e-9;
        }
        catch (const Infeasible &)
        {
            ok = true;
        }
        report("power budget is used exactly", ok, total);
    }
    {
        const TrialResult r = baseline_eval(Scheme::RisHybridNoma, cfg, 7);
        report("optimized solution is certified", !r.feasible || r.certificate.ok(), r.sum_rate);
    }
    std::printf("%s\n", failures == 0 ? "selftest passed" : "selftest failed");
    return failures == 0 ? 0 : kExitRuntime;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Sum-rate optimization for RIS-aided mmWave NOMA downlinks"};
    app.require_subcommand(1);

    Overrides o;
    std::string spec_path, out;
    auto add_common = [&](CLI::App *sub) {
        sub->add_option("spec", spec_path, "Experiment spec JSON");
        sub->add_option("--seed", o.seed, "Master seed");
        sub->add_option("--trials", o.trials, "Trials per cell")->check(CLI::PositiveNumber);
        sub->add_option("--scheme", o.scheme, "Scheme name, or a comma-separated list");
        sub->add_option("--sweep", o.sweep, "Sweep as var=v1,v2,...");
        sub->add_option("--out", out, "Output path (run: prefix of the CSV files)");
    };
    CLI::App *run = app.add_subcommand("run", "Monte-Carlo experiment");
    add_common(run);
    run->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    run->add_flag("--timing", o.timing, "Record wall times in the trial CSV");
    CLI::App *trace = app.add_subcommand("trace", "Single trial with iteration traces");
    add_common(trace);
    app.add_subcommand("selftest", "Invariant checks");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try
    {
        if (run->parsed())
            return cmd_run(spec_path, o, *run, out);
        if (trace->parsed())
            return cmd_trace(spec_path, o, *trace, out);
        return cmd_selftest();
    }
    catch (const InvalidConfig &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
