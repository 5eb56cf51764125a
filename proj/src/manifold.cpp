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

#include "risnoma/manifold.hpp"

#include <algorithm>
#include <cmath>

namespace risnoma {

ManifoldPoint circle_point(const CVec &x) { return {ManifoldKind::CircleVector, x, 1.0}; }

ManifoldPoint circle_point(const CMat &x, double modulus) { return {ManifoldKind::CircleMatrix, x, modulus}; }

ManifoldPoint oblique_point(const CMat &x) { return {ManifoldKind::Oblique, x, 1.0}; }

double manifold_violation(const ManifoldPoint &p)
{
    if (p.kind == ManifoldKind::Oblique)
        return (p.value.colwise().norm().array() - 1.0).abs().maxCoeff();
    return (p.value.cwiseAbs().array() - p.modulus).abs().maxCoeff();
}

double tangent_violation(const ManifoldPoint &p, const CMat &xi)
{
    if (p.kind == ManifoldKind::Oblique)
    {
        double worst = 0.0;
        for (Eigen::Index c = 0; c < p.value.cols(); ++c)
            worst = std::max(worst, std::abs(p.value.col(c).dot(xi.col(c)).real()));
        return worst;
    }
    return (p.value.conjugate().cwiseProduct(xi)).real().cwiseAbs().maxCoeff();
}

CMat rgrad(const ManifoldPoint &p, const CMat &egrad)
{
    if (egrad.rows() != p.value.rows() || egrad.cols() != p.value.cols())
        throw InvalidDimension("rgrad: gradient shape differs from the point");
    if (p.kind == ManifoldKind::Oblique)
    {
        CMat g = egrad;
        for (Eigen::Index c = 0; c < g.cols(); ++c)
            g.col(c) -= p.value.col(c).dot(egrad.col(c)).real() * p.value.col(c);
        return g;
    }
    const double m2 = p.modulus * p.modulus;
    const RMat radial = egrad.cwiseProduct(p.value.conjugate()).real() / m2;
    return egrad - radial.cast<cd>().cwiseProduct(p.value);
}

ManifoldPoint retract(const ManifoldPoint &p, double step, const CMat &direction)
{
    if (direction.rows() != p.value.rows() || direction.cols() != p.value.cols())
        throw InvalidDimension("retract: direction shape differs from the point");
    ManifoldPoint out = p;
    if (step == 0.0)
        return out;
    CMat y = p.value - step * direction;
    if (p.kind == ManifoldKind::Oblique)
    {
        for (Eigen::Index c = 0; c < y.cols(); ++c)
        {
            const double nrm = y.col(c).norm();
            if (!(nrm > 0.0))
                throw RetractionSingularity("retract: zero column");
            y.col(c) /= nrm;
        }
    }
    else
    {
        for (Eigen::Index i = 0; i < y.size(); ++i)
        {
            const double a = std::abs(y(i));
            if (!(a > 0.0))
                throw RetractionSingularity("retract: zero entry");
            y(i) *= p.modulus / a;
        }
    }
    out.value = std::move(y);
    return out;
}

ArmijoResult armijo_step(const BlockObjective &f, const ManifoldPoint &x, double f_x, const CMat &grad,
                         const ArmijoOptions &opt)
{
    const double g2 = grad.squaredNorm();
    if (!(g2 > 0.0))
        throw PreconditionViolation("armijo_step: zero gradient");
    ArmijoResult r;
    double step = opt.initial_step;
    for (int h = 0; h <= opt.max_halvings; ++h, step *= 0.5)
    {
        r.halvings = h;
        ManifoldPoint cand;
        try
        {
            cand = retract(x, step, grad);
        }
        catch (const RetractionSingularity &)
        {
            continue;
        }
        const double fc = f(cand.value);
        if (fc <= f_x - opt.c * step * g2)
        {
            r.accepted = true;
            r.step = step;
            r.point = std::move(cand);
            r.value = fc;
            return r;
        }
    }
    r.point = x;
    r.value = f_x;
    return r;
}

// ---------------------------------------------------------------------------------------------
// Block objectives

namespace {

CMat stack(const std::vector<CVec> &u)
{
    CMat U(u.empty() ? 0 : u.front().size(), static_cast<Eigen::Index>(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i)
        U.col(static_cast<Eigen::Index>(i)) = u[i];
    return U;
}

void check_theta_inputs(const CVec &theta, const ChannelSet &ch, const std::vector<CVec> &u, const CMat &v)
{
    if (theta.size() != ch.n_elements() || v.rows() != ch.n_users() || v.cols() != static_cast<Eigen::Index>(u.size()))
        throw InvalidDimension("f_theta: inconsistent dimensions");
    for (const auto &ui : u)
        if (ui.size() != theta.size())
            throw InvalidDimension("f_theta: u has the wrong length");
}

} // namespace

double f_theta(const CVec &theta, const ChannelSet &ch, const std::vector<CVec> &u, const CMat &v)
{
    check_theta_inputs(theta, ch, u, v);
    const CMat TU = theta.asDiagonal() * stack(u);
    double f = 0.0;
    for (int k = 0; k < ch.n_users(); ++k)
        f += (v.row(k) - ch.ris_user[k].adjoint() * TU).squaredNorm();
    return f;
}

CVec egrad_theta(const CVec &theta, const ChannelSet &ch, const std::vector<CVec> &u, const CMat &v)
{
    check_theta_inputs(theta, ch, u, v);
    const CMat U = stack(u);
    const CMat TU = theta.asDiagonal() * U;
    CVec g = CVec::Zero(theta.size());
    for (int k = 0; k < ch.n_users(); ++k)
    {
        const Eigen::RowVectorXcd r = v.row(k) - ch.ris_user[k].adjoint() * TU;
        // d/d(conj theta) of |r|^2 gives -r * (h .* conj(u))
        g -= 2.0 * ch.ris_user[k].cwiseProduct(U.conjugate() * r.transpose());
    }
    return g;
}

double f_analog(const CMat &F, const CMat &G, const CMat &W, const std::vector<CVec> &u, const CMat &D)
{
    return (stack(u) - G * F * W).squaredNorm() + (D - F * W).squaredNorm();
}

CMat egrad_analog(const CMat &F, const CMat &G, const CMat &W, const std::vector<CVec> &u, const CMat &D)
{
    const CMat FW = F * W;
    return -2.0 * (G.adjoint() * (stack(u) - G * FW) + (D - FW)) * W.adjoint();
}

double f_hybrid(const CMat &D, const CMat &F, const CMat &W) { return (D - F * W).squaredNorm(); }

CMat egrad_hybrid(const CMat &D, const CMat &F, const CMat &W) { return 2.0 * (D - F * W); }

CVec egrad_theta(const BeamformingState &s, const ChannelSet &ch)
{
    return egrad_theta(s.theta, ch, s.aux_u, s.aux_v);
}

CMat egrad_analog(const BeamformingState &s, const ChannelSet &ch)
{
    return egrad_analog(s.analog, ch.ap_ris, s.digital, s.aux_u, s.hybrid);
}

CMat egrad_hybrid(const BeamformingState &s) { return egrad_hybrid(s.hybrid, s.analog, s.digital); }

// ---------------------------------------------------------------------------------------------
// Alternating loop

AmoOptions AmoOptions::from(const SolverOptions &s)
{
    AmoOptions o;
    o.theta_tol = s.theta_tol;
    o.analog_tol = s.analog_tol;
    o.hybrid_tol = s.hybrid_tol;
    o.outer_tol = s.amo_outer_tol;
    o.inner_max = s.amo_inner_max;
    o.outer_max = s.amo_outer_max;
    o.armijo.initial_step = s.armijo_initial_step;
    o.armijo.c = s.armijo_c;
    o.armijo.max_halvings = s.armijo_max_halvings;
    return o;
}

namespace {

enum class StopRule
{
    PointChange,
    ValueChange
};

struct BlockOutcome
{
    bool progressed = false;
    bool stalled = false;
};

BlockOutcome descend(ManifoldPoint &x, const BlockObjective &f, const std::function<CMat(const CMat &)> &egrad,
                     StopRule rule, double tol, char tag, int sweep, const AmoOptions &opt, AmoResult &res)
{
    BlockOutcome out;
    double fx = f(x.value);
    for (int it = 0; it < opt.inner_max; ++it)
    {
        const CMat g = rgrad(x, egrad(x.value));
        const double gn = g.norm();
        if (!(gn > 0.0))
            break;
        const ArmijoResult step = armijo_step(f, x, fx, g, opt.armijo);
        if (!step.accepted)
        {
            out.stalled = true;
            break;
        }
        ++res.inner_iterations;
        out.progressed = true;
        const double change = rule == StopRule::PointChange ? (step.point.value - x.value).norm() : fx - step.value;
        x = step.point;
        fx = step.value;
        if (opt.record_trace)
            res.trace.push_back({sweep, tag, it, fx, gn});
        if (std::abs(change) <= tol)
            break;
    }
    return out;
}

} // namespace

AmoResult amo_optimize(BeamformingState &s, const ChannelSet &ch, const AmoOptions &opt)
{
    AmoResult res;
    const bool do_theta = opt.update_theta && !ch.direct;
    const bool do_analog = opt.update_analog;
    const double mod_f = 1.0 / std::sqrt(static_cast<double>(s.analog.rows()));

    auto total = [&]() {
        return f_theta(s.theta, ch, s.aux_u, s.aux_v) + f_analog(s.analog, ch.ap_ris, s.digital, s.aux_u, s.hybrid);
    };
    double prev = total();
    for (int sweep = 0; sweep < opt.outer_max; ++sweep)
    {
        ++res.sweeps;
        bool progressed = false;
        bool stalled_all = true;

        if (do_theta)
        {
            ManifoldPoint x = circle_point(s.theta);
            const auto out = descend(
                x, [&](const CMat &t) { return f_theta(t, ch, s.aux_u, s.aux_v); },
                [&](const CMat &t) { return CMat(egrad_theta(t, ch, s.aux_u, s.aux_v)); }, StopRule::PointChange,
                opt.theta_tol, 't', sweep, opt, res);
            s.theta = x.value.col(0);
            progressed |= out.progressed;
            stalled_all &= out.stalled;
        }
        if (do_analog)
        {
            ManifoldPoint x = circle_point(s.analog, mod_f);
            const auto out = descend(
                x, [&](const CMat &F) { return f_analog(F, ch.ap_ris, s.digital, s.aux_u, s.hybrid); },
                [&](const CMat &F) { return egrad_analog(F, ch.ap_ris, s.digital, s.aux_u, s.hybrid); },
                StopRule::ValueChange, opt.analog_tol, 'f', sweep, opt, res);
            s.analog = x.value;
            progressed |= out.progressed;
            stalled_all &= out.stalled;
        }
        {
            ManifoldPoint x = oblique_point(s.hybrid);
            const auto out = descend(
                x, [&](const CMat &D) { return f_hybrid(D, s.analog, s.digital); },
                [&](const CMat &D) { return egrad_hybrid(D, s.analog, s.digital); }, StopRule::ValueChange,
                opt.hybrid_tol, 'd', sweep, opt, res);
            s.hybrid = x.value;
            progressed |= out.progressed;
            stalled_all &= out.stalled;
        }

        if (!progressed)
        {
            res.stalled = stalled_all;
            break;
        }
        const double now = total();
        const double change = std::abs(prev - now);
        prev = now;
        if (change <= opt.outer_tol)
            break;
    }
    res.objective = prev;

    double gn = rgrad(oblique_point(s.hybrid), egrad_hybrid(s)).norm();
    if (do_theta)
        gn = std::max(gn, rgrad(circle_point(s.theta), egrad_theta(s, ch)).norm());
    if (do_analog)
        gn = std::max(gn, rgrad(circle_point(s.analog, mod_f), egrad_analog(s, ch)).norm());
    res.grad_norm = gn;
    return res;
}

} // namespace risnoma
