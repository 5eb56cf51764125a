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


#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "risnoma/baselines.hpp"
#include "risnoma/experiment.hpp"
#include "risnoma/power_alloc.hpp"

namespace py = pybind11;
using namespace risnoma;

namespace {

py::dict certificate_dict(const Certificate &c)
{
    py::dict d;
    d["min_rate"] = c.min_rate;
    d["power"] = c.power;
    d["leakage"] = c.leakage;
    d["manifold"] = c.manifold;
    d["ok"] = c.ok();
    return d;
}

py::dict trial_dict(const TrialResult &r)
{
    py::dict d;
    d["scheme"] = scheme_name(r.scheme);
    d["sweep_value"] = r.sweep_value;
    d["trial"] = r.trial;
    d["sum_rate"] = r.sum_rate;
    d["feasible"] = r.feasible;
    d["outer_iters"] = r.outer_iters;
    d["per_user_rates"] = r.per_user_rates;
    d["certificate"] = certificate_dict(r.certificate);
    return d;
}

} // namespace

PYBIND11_MODULE(_risnoma, m)
{
    m.doc() = "Joint beamforming and power allocation for RIS-aided hybrid NOMA";

    // Later registrations are tried first, so the base class goes first
    const auto &error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<Infeasible>(m, "Infeasible", error.ptr());
    py::register_exception<InvalidConfig>(m, "InvalidConfig", error.ptr());

    m.def("schemes", [] {
        std::vector<std::string> names;
        for (Scheme s : all_schemes())
            names.push_back(scheme_name(s));
        return names;
    });

    m.def("default_config", [] { return config_to_json(ScenarioConfig::desk()).dump(); },
          "Desk-scale scenario as a JSON string");

    m.def(
        "run_trial",
        [](const std::string &scheme, const std::string &config_json, std::uint64_t seed) {
            const ScenarioConfig cfg = config_from_json(nlohmann::json::parse(config_json));
            const Scheme s = parse_scheme(scheme);
            TrialResult r;
            {
                py::gil_scoped_release release;
                r = baseline_eval(s, cfg, seed);
            }
            return trial_dict(r);
        },
        py::arg("scheme"), py::arg("config_json"), py::arg("seed"));

    m.def(
        "run_experiment",
        [](const std::string &spec_json) {
            const ExperimentSpec spec = spec_from_json(nlohmann::json::parse(spec_json));
            ExperimentResult res;
            {
                py::gil_scoped_release release;
                res = run_monte_carlo(spec);
            }
            py::list trials, rows;
            for (const TrialResult &r : res.trials)
                trials.append(trial_dict(r));
            for (const AggregateRow &a : res.aggregate)
            {
                py::dict d;
                d["scheme"] = scheme_name(a.scheme);
                d["sweep_value"] = a.sweep_value;
                d["mean"] = a.mean;
                d["std"] = a.std;
                d["feasible_frac"] = a.feasible_frac;
                d["count"] = a.count;
                rows.append(d);
            }
            return py::make_tuple(trials, rows);
        },
        py::arg("spec_json"));

    m.def(
        "allocate",
        [](const RMat &gains, const std::vector<int> &group_sizes, const RVec &min_rates, double total_power,
           double noise) {
            const PowerAllocation a = allocate(gains, GroupLayout(group_sizes), min_rates, total_power, noise);
            py::dict d;
            d["user_powers"] = a.powers.user_powers;
            d["group_powers"] = a.powers.group_powers;
            d["order"] = a.order;
            d["pinned"] = a.pinned;
            d["rounds"] = a.rounds;
            return d;
        },
        py::arg("gains"), py::arg("group_sizes"), py::arg("min_rates"), py::arg("total_power"), py::arg("noise"));
}
