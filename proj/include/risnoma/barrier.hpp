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

#include "risnoma/types.hpp"

namespace risnoma {

// Smooth convex program: minimize f0(x) subject to f_j(x) <= 0, j = 0..m-1
class ConvexProgram
{
  public:
    virtual ~ConvexProgram() = default;

    virtual Eigen::Index dim() const = 0;
    virtual Eigen::Index n_constraints() const = 0;

    // Objective value, optionally its gradient and Hessian. Returns +inf outside the domain.
    virtual double objective(const RVec &x, RVec *grad, RMat *hess) const = 0;

    // All constraint values
    virtual RVec constraints(const RVec &x) const = 0;

    // Constraint gradients as rows of an m x n matrix
    virtual RMat constraint_jacobian(const RVec &x) const = 0;

    // hess += sum_j weight_j * Hessian(f_j)
    virtual void add_constraint_hessians(const RVec &x, const RVec &weight, RMat &hess) const = 0;
};

struct BarrierOptions
{
    double tol = 1e-8;          // Target duality gap m / t
    double mu = 10.0;           // Barrier parameter growth factor
    double t0 = 1.0;
    int max_newton = 500;       // Per centering step; far starts creep along curved cone boundaries
    int max_outer = 60;
};

enum class BarrierStatus
{
    Converged,
    MaxIterations,
    NumericalFailure
};

struct BarrierResult
{
    RVec x;
    RVec multipliers;     // 1 / (t * -f_j) at the last centering
    BarrierStatus status = BarrierStatus::Converged;
    int newton_steps = 0;
    double gap = 0.0;
    double objective = 0.0;
};

// Requires a strictly feasible starting point; throws SubproblemInfeasible otherwise
BarrierResult solve_barrier(const ConvexProgram &prog, const RVec &x0, const BarrierOptions &opt = {});

} // namespace risnoma
