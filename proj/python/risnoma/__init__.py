# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 The risnoma Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python access to the risnoma optimizer and Monte Carlo harness."""

import json

from ._risnoma import Error, Infeasible, InvalidConfig, allocate, schemes
from . import _risnoma

__all__ = [
    "Error",
    "Infeasible",
    "InvalidConfig",
    "allocate",
    "default_config",
    "run_experiment",
    "run_trial",
    "schemes",
]


def default_config():
    """Desk-scale scenario as a dict."""
    return json.loads(_risnoma.default_config())


def run_trial(scheme, seed, config=None):
    """Runs one scheme on one channel draw and returns its result dict."""
    cfg = default_config() if config is None else config
    return _risnoma.run_trial(scheme, json.dumps(cfg), int(seed))


def run_experiment(spec):
    """Runs a Monte Carlo spec given as a dict; returns (trials, aggregate)."""
    return _risnoma.run_experiment(json.dumps(spec))
