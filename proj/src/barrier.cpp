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

#include "risnoma/barrier.hpp"

#include <cmath>
#include <limits>

namespace risnoma {

namespace {

// f0(x) - (1/t) sum log(-f_j(x)); +inf outside the strict interior
double barrier_value(const ConvexProgram &prog, const RVec &x, double t)
{
    const double f0 = prog.objective(x, nullptr, nullptr);
    if (!std::isfinite(f0))
        return std::numeric_limits<double>::infinity();
    const RVec c = prog.constraints(x);
    double b = 0.0;
    for (Eigen::Index j = 0; j < c.size(); ++j)
    {
        if (!(c(j) < 0.0))
            return std::numeric_limits<double>::infinity();
        b -= std::log(-c(j));
    }
    return f0 + b / t;
}

RVec newton_direction(RMat &H, const RVec &g)
{
    Eigen::LDLT<RMat> ldlt(H);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive())
    {
        RVec d = -ldlt.solve(g);
        if (d.allFinite())
            return d;
    }
    // Regularize until the factorization succeeds
    double ridge = 1e-12 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
    for (int attempt = 0; attempt < 30; ++attempt, ridge *= 10.0)
    {
        RMat Hr = H;
        Hr.diagonal().array() += ridge;
        Eigen::LLT<RMat> llt(Hr);
        if (llt.info() == Eigen::Success)
        {
            RVec d = -llt.solve(g);
            if (d.allFinite())
                return d;
        }
    }
    return -g;
}

} // namespace

BarrierResult solve_barrier(const ConvexProgram &prog, const RVec &x0, const BarrierOptions &opt)
{
    const Eigen::Index n = prog.dim();
    const Eigen::Index m = prog.n_constraints();
    if (x0.size() != n)
        throw InvalidDimension("solve_barrier: starting point has the wrong size");
    {
        const RVec c0 = prog.constraints(x0);
        if (m > 0 && !(c0.maxCoeff() < 0.0))
            throw SubproblemInfeasible("starting point is not strictly feasible");
        if (!std::isfinite(prog.objective(x0, nullptr, nullptr)))
            throw SubproblemInfeasible("starting point is outside the objective domain");
    }

    BarrierResult res;
    res.x = x0;
    double t = opt.t0;
    const double md = static_cast<double>(std::max<Eigen::Index>(m, 1));

    bool centered = false;
    for (int outer = 0; outer < opt.max_outer; ++outer)
    {
        // Centering by damped Newton
        centered = false;
        for (int it = 0; it < opt.max_newton; ++it)
        {
            RVec g(n);
            RMat H(n, n);
            const double f0 = prog.objective(res.x, &g, &H);
            double phi = f0;
            if (m > 0)
            {
                const RVec c = prog.constraints(res.x);
                const RMat J = prog.constraint_jacobian(res.x);
                const RVec inv_s = (-c).cwiseInverse();
                g += J.transpose() * inv_s / t;
                H += J.transpose() * inv_s.cwiseAbs2().asDiagonal() * J / t;
                prog.add_constraint_hessians(res.x, inv_s / t, H);
                phi -= (-c).array().log().sum() / t;
            }
            RVec d = newton_direction(H, g);
            double slope = g.dot(d);
            if (!(slope < 0.0))
            {
                d = -g;
                slope = -g.squaredNorm();
            }
            const double decrement = -slope;
            ++res.newton_steps;
            if (0.5 * decrement <= 1e-2 * md / t || 0.5 * decrement <= 1e-15 * (1.0 + std::abs(phi)))
            {
                centered = true;
                break;
            }

            double step = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 80; ++ls, step *= 0.5)
            {
                const RVec xn = res.x + step * d;
                const double pn = barrier_value(prog, xn, t);
                if (!std::isfinite(pn))
                    continue;
                if (pn <= phi + 0.25 * step * slope + 1e-14 * std::abs(phi))
                {
                    res.x = xn;
                    moved = true;
                    break;
                }
            }
            if (!moved)
            {
                // No representable decrease left along the Newton direction
                centered = true;
                break;
            }
        }

        res.gap = static_cast<double>(m) / t;
        if (m == 0 || res.gap <= opt.tol)
            break;
        if (outer + 1 == opt.max_outer)
        {
            res.status = BarrierStatus::MaxIterations;
            break;
        }
        t *= opt.mu;
    }

    if (m > 0)
    {
        const RVec c = prog.constraints(res.x);
        res.multipliers = (-c).cwiseInverse() / t;
    }
    else
    {
        res.multipliers.resize(0);
    }
    res.objective = prog.objective(res.x, nullptr, nullptr);
    if (!centered && res.status == BarrierStatus::Converged)
        res.status = BarrierStatus::MaxIterations;
    if (!res.x.allFinite())
        res.status = BarrierStatus::NumericalFailure;
    return res;
}

} // namespace risnoma
