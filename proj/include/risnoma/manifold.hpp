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

#include <functional>
#include <string>
#include <vector>

#include "risnoma/config.hpp"
#include "risnoma/rate_model.hpp"

namespace risnoma {

enum class ManifoldKind
{
    CircleVector,   // unit-modulus entries
    CircleMatrix,   // entries of fixed modulus
    Oblique         // unit-norm columns
};

struct ManifoldPoint
{
    ManifoldKind kind = ManifoldKind::CircleVector;
    CMat value;
    double modulus = 1.0;  // entry modulus of the circle kinds
};

ManifoldPoint circle_point(const CVec &x);
ManifoldPoint circle_point(const CMat &x, double modulus);
ManifoldPoint oblique_point(const CMat &x);

// Largest deviation from the manifold constraint
double manifold_violation(const ManifoldPoint &p);

// Largest deviation of xi from the tangent-space equation at p
double tangent_violation(const ManifoldPoint &p, const CMat &xi);

// Orthogonal projection of a Euclidean gradient onto the tangent space.
// Gradients follow the real convention df = Re<grad, dx>, i.e. grad = 2 df/d(conj x).
CMat rgrad(const ManifoldPoint &p, const CMat &egrad);

// Normalizes x - step * direction back onto the manifold
ManifoldPoint retract(const ManifoldPoint &p, double step, const CMat &direction);

struct ArmijoOptions
{
    double initial_step = 1.0;
    double c = 1e-4;
    int max_halvings = 50;
};

struct ArmijoResult
{
    bool accepted = false;
    double step = 0.0;
    ManifoldPoint point;
    double value = 0.0;
    int halvings = 0;
};

using BlockObjective = std::function<double(const CMat &)>;

ArmijoResult armijo_step(const BlockObjective &f, const ManifoldPoint &x, double f_x, const CMat &grad,
                         const ArmijoOptions &opt = {});

// Block objectives and their Euclidean gradients.
//   f_theta  = sum_{user,i} |v(user,i) - h_user^H diag(theta) u_i|^2
//   f_analog = sum_i ||u_i - G F w_i||^2 + ||D - F W||^2
//   f_hybrid = ||D - F W||^2
double f_theta(const CVec &theta, const ChannelSet &ch, const std::vector<CVec> &u, const CMat &v);
CVec egrad_theta(const CVec &theta, const ChannelSet &ch, const std::vector<CVec> &u, const CMat &v);
double f_analog(const CMat &F, const CMat &G, const CMat &W, const std::vector<CVec> &u, const CMat &D);
CMat egrad_analog(const CMat &F, const CMat &G, const CMat &W, const std::vector<CVec> &u, const CMat &D);
double f_hybrid(const CMat &D, const CMat &F, const CMat &W);
CMat egrad_hybrid(const CMat &D, const CMat &F, const CMat &W);

CVec egrad_theta(const BeamformingState &s, const ChannelSet &ch);
CMat egrad_analog(const BeamformingState &s, const ChannelSet &ch);
CMat egrad_hybrid(const BeamformingState &s);

struct AmoOptions
{
    double theta_tol = 1e-6;
    double analog_tol = 1e-6;
    double hybrid_tol = 1e-6;
    double outer_tol = 1e-5;
    int inner_max = 200;
    int outer_max = 50;
    ArmijoOptions armijo;
    bool update_theta = true;
    bool update_analog = true;
    bool record_trace = false;

    static AmoOptions from(const SolverOptions &s);
};

struct AmoTraceRow
{
    int sweep = 0;
    char block = 't';  // 't' theta, 'f' analog, 'd' hybrid
    int iteration = 0;
    double objective = 0.0;
    double grad_norm = 0.0;
};

struct AmoResult
{
    int sweeps = 0;
    int inner_iterations = 0;
    bool stalled = false;
    double objective = 0.0;     // f_theta + f_analog at exit
    double grad_norm = 0.0;     // largest block Riemannian gradient norm at exit
    std::vector<AmoTraceRow> trace;
};

// Alternates descent on theta, F and D with u, v and W held fixed
AmoResult amo_optimize(BeamformingState &s, const ChannelSet &ch, const AmoOptions &opt);

} // namespace risnoma
