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

#include "risnoma/sca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace risnoma {

namespace {

// Real symmetric form of a Hermitian quadratic y^H Q y in the coordinates [Re y; Im y]
RMat real_form(const CMat &Q)
{
    const Eigen::Index n = Q.rows();
    RMat R(2 * n, 2 * n);
    R.topLeftCorner(n, n) = Q.real();
    R.topRightCorner(n, n) = -Q.imag();
    R.bottomLeftCorner(n, n) = Q.imag();
    R.bottomRightCorner(n, n) = Q.real();
    return R;
}

class ScaProgram : public ConvexProgram
{
  public:
    ScaProgram(const ScaSubproblem &sub, Surrogate s) : sub_(sub), s_(std::move(s)) {}

    Eigen::Index dim() const override { return sub_.dim(); }
    Eigen::Index n_constraints() const override { return static_cast<Eigen::Index>(sub_.constraints().size()); }
    double objective(const RVec &x, RVec *grad, RMat *hess) const override
    {
        return sub_.surrogate_objective(x, s_, grad, hess);
    }
    RVec constraints(const RVec &x) const override { return sub_.constraint_values(x); }
    RMat constraint_jacobian(const RVec &x) const override { return sub_.constraint_jacobian(x); }
    void add_constraint_hessians(const RVec &x, const RVec &w, RMat &hess) const override
    {
        sub_.add_constraint_hessians(x, w, hess);
    }

  private:
    const ScaSubproblem &sub_;
    Surrogate s_;
};

} // namespace

ScaSubproblem::ScaSubproblem(const ChannelSet &ch, const GroupLayout &layout, ScaFixed fixed)
    : layout_(layout), fix_(std::move(fixed))
{
    R_ = static_cast<int>(fix_.F.cols());
    N_ = layout_.n_groups();
    K_ = layout_.n_users();
    const int Nr = ch.n_elements();
    if (fix_.theta.size() != Nr || fix_.F.rows() != ch.n_tx() || fix_.D.rows() != ch.n_tx() || fix_.D.cols() != N_ ||
        ch.n_users() != K_ || fix_.powers.user_powers.size() != K_ || fix_.min_rates.size() != K_ ||
        static_cast<int>(fix_.order.size()) != N_)
        throw InvalidDimension("ScaSubproblem: inconsistent dimensions");
    if (!(fix_.lambda > 0.0) || !(fix_.noise > 0.0) || !(fix_.leakage > 0.0))
        throw InvalidConfig("ScaSubproblem: lambda, noise and leakage threshold must be positive");
    nc_ = static_cast<Eigen::Index>(R_) * N_ + static_cast<Eigen::Index>(K_) * N_;

    C_.resize(Nr, K_);
    for (int k = 0; k < K_; ++k)
        C_.col(k) = fix_.theta.conjugate().cwiseProduct(ch.ris_user[k]);
    GF_ = ch.ap_ris * fix_.F;
    B_ = C_.adjoint() * GF_;
    M_ = (CMat::Identity(K_, K_) + C_.adjoint() * C_).inverse();
    uproj_ = (CMat::Identity(Nr, Nr) + C_ * C_.adjoint()).inverse();

    // sum_i (v_i - B w_i)^H M (v_i - B w_i) + ||d_i - F w_i||^2
    CMat Q = CMat::Zero(nc_, nc_);
    CVec b = CVec::Zero(nc_);
    const CMat Qww = B_.adjoint() * M_ * B_ + fix_.F.adjoint() * fix_.F;
    const CMat Qwv = -B_.adjoint() * M_;
    for (int i = 0; i < N_; ++i)
    {
        const int w0 = wi(0, i), v0 = vi(0, i);
        Q.block(w0, w0, R_, R_) = Qww;
        Q.block(w0, v0, R_, K_) = Qwv;
        Q.block(v0, w0, K_, R_) = Qwv.adjoint();
        Q.block(v0, v0, K_, K_) = M_;
        b.segment(w0, R_) = fix_.F.adjoint() * fix_.D.col(i);
    }
    Rq_ = real_form(Q);
    bq_.resize(2 * nc_);
    bq_ << b.real(), b.imag();
    cq_ = fix_.D.squaredNorm();

    // Interference from stronger-ranked users of the own group
    p_ = fix_.powers.user_powers;
    s_prev_ = RVec::Zero(K_);
    for (int n = 0; n < N_; ++n)
    {
        double acc = 0.0;
        for (int k : fix_.order[n])
        {
            const int u = layout_.user(n, k);
            s_prev_(u) = acc;
            acc += p_(u);
        }
    }

    rate_coef_ = RVec::Zero(K_);
    rate_rhs_ = RVec::Zero(K_);
    for (int u = 0; u < K_; ++u)
        for (int i = 0; i < N_; ++i)
            cons_.push_back({ConstraintRef::Cone, u, i});
    for (int u = 0; u < K_; ++u)
        for (int i = 0; i < N_; ++i)
            if (i != layout_.group_of(u))
                cons_.push_back({ConstraintRef::Leakage, u, i});
    for (int u = 0; u < K_; ++u)
    {
        const double t = std::expm1(fix_.min_rates(u) * M_LN2);
        rate_coef_(u) = p_(u) - t * s_prev_(u);
        rate_rhs_(u) = t * fix_.noise;
        if (t > 0.0)
            cons_.push_back({ConstraintRef::MinRate, u, layout_.group_of(u)});
    }
}

RVec ScaSubproblem::pack(const ScaPoint &p) const
{
    RVec x(dim());
    for (int i = 0; i < N_; ++i)
    {
        for (int r = 0; r < R_; ++r)
        {
            x(wi(r, i)) = p.W(r, i).real();
            x(nc_ + wi(r, i)) = p.W(r, i).imag();
        }
        for (int u = 0; u < K_; ++u)
        {
            x(vi(u, i)) = p.V(u, i).real();
            x(nc_ + vi(u, i)) = p.V(u, i).imag();
            x(zi(u, i)) = p.Z(u, i);
        }
    }
    return x;
}

ScaPoint ScaSubproblem::unpack(const RVec &x) const
{
    ScaPoint p;
    p.W.resize(R_, N_);
    p.V.resize(K_, N_);
    p.Z.resize(K_, N_);
    for (int i = 0; i < N_; ++i)
    {
        for (int r = 0; r < R_; ++r)
            p.W(r, i) = {x(wi(r, i)), x(nc_ + wi(r, i))};
        for (int u = 0; u < K_; ++u)
        {
            p.V(u, i) = {x(vi(u, i)), x(nc_ + vi(u, i))};
            p.Z(u, i) = x(zi(u, i));
        }
    }
    return p;
}

std::vector<CVec> ScaSubproblem::optimal_u(const ScaPoint &p) const
{
    std::vector<CVec> u(N_);
    for (int i = 0; i < N_; ++i)
        u[i] = uproj_ * (GF_ * p.W.col(i) + C_ * p.V.col(i));
    return u;
}

Surrogate ScaSubproblem::linearize(const ScaPoint &anchor) const
{
    Surrogate s;
    s.log_slope.resize(K_);
    s.log_offset.resize(K_);
    for (int u = 0; u < K_; ++u)
    {
        const double z = anchor.Z(u, own_group(u));
        const double arg = z * s_prev_(u) + fix_.noise;
        if (!(arg > 0.0) || !std::isfinite(z))
            throw DomainError("linearize: non-positive log argument at the anchor");
        s.log_slope(u) = s_prev_(u) / (M_LN2 * arg);
        s.log_offset(u) = std::log2(arg) - s.log_slope(u) * z;
    }
    s.v_anchor = anchor.V;
    if (!s.v_anchor.allFinite())
        throw DomainError("linearize: non-finite anchor");
    return s;
}

double ScaSubproblem::true_objective(const ScaPoint &p) const
{
    double f = 0.0;
    for (int u = 0; u < K_; ++u)
    {
        const double z = p.Z(u, own_group(u));
        const double a = z * s_prev_(u) + fix_.noise;
        const double b = z * (s_prev_(u) + p_(u)) + fix_.noise;
        if (!(a > 0.0) || !(b > 0.0))
            throw DomainError("penalized objective: non-positive log argument");
        f += std::log2(a) - std::log2(b);
    }
    double pen = (fix_.D - fix_.F * p.W).squaredNorm();
    for (int i = 0; i < N_; ++i)
    {
        const CVec r = p.V.col(i) - B_ * p.W.col(i);
        pen += r.dot(M_ * r).real();
    }
    pen += (p.Z - p.V.cwiseAbs2()).sum();
    return f + fix_.lambda * pen;
}

RVec ScaSubproblem::true_gradient(const ScaPoint &p) const
{
    const RVec x = pack(p);
    RVec g = RVec::Zero(dim());
    const double lam = fix_.lambda;
    g.head(2 * nc_) = lam * (2.0 * Rq_ * x.head(2 * nc_) - 2.0 * bq_);
    for (int i = 0; i < N_; ++i)
    {
        for (int u = 0; u < K_; ++u)
        {
            g(vi(u, i)) -= 2.0 * lam * p.V(u, i).real();
            g(nc_ + vi(u, i)) -= 2.0 * lam * p.V(u, i).imag();
            g(zi(u, i)) += lam;
        }
    }
    for (int u = 0; u < K_; ++u)
    {
        const double z = p.Z(u, own_group(u));
        const double S = s_prev_(u) + p_(u);
        g(zi(u, own_group(u))) +=
            s_prev_(u) / (M_LN2 * (z * s_prev_(u) + fix_.noise)) - S / (M_LN2 * (z * S + fix_.noise));
    }
    return g;
}

double ScaSubproblem::surrogate_objective(const RVec &x, const Surrogate &s, RVec *grad, RMat *hess) const
{
    const double lam = fix_.lambda;
    const auto xc = x.head(2 * nc_);
    const RVec Rx = Rq_ * xc;
    double f = lam * (xc.dot(Rx) - 2.0 * bq_.dot(xc) + cq_);
    if (grad)
    {
        grad->setZero(dim());
        grad->head(2 * nc_) = lam * (2.0 * Rx - 2.0 * bq_);
    }
    if (hess)
    {
        hess->setZero(dim(), dim());
        hess->topLeftCorner(2 * nc_, 2 * nc_) = 2.0 * lam * Rq_;
    }
    for (int i = 0; i < N_; ++i)
    {
        for (int u = 0; u < K_; ++u)
        {
            const cd va = s.v_anchor(u, i);
            const double re = x(vi(u, i)), im = x(nc_ + vi(u, i));
            f += lam * (x(zi(u, i)) + std::norm(va) - 2.0 * (va.real() * re + va.imag() * im));
            if (grad)
            {
                (*grad)(vi(u, i)) -= 2.0 * lam * va.real();
                (*grad)(nc_ + vi(u, i)) -= 2.0 * lam * va.imag();
                (*grad)(zi(u, i)) += lam;
            }
        }
    }
    for (int u = 0; u < K_; ++u)
    {
        const int idx = zi(u, own_group(u));
        const double z = x(idx);
        const double S = s_prev_(u) + p_(u);
        const double arg = z * S + fix_.noise;
        if (!(arg > 0.0))
            return std::numeric_limits<double>::infinity();
        f += s.log_slope(u) * z + s.log_offset(u) - std::log2(arg);
        if (grad)
            (*grad)(idx) += s.log_slope(u) - S / (M_LN2 * arg);
        if (hess)
            (*hess)(idx, idx) += S * S / (M_LN2 * arg * arg);
    }
    return f;
}

RVec ScaSubproblem::constraint_values(const RVec &x) const
{
    RVec c(static_cast<Eigen::Index>(cons_.size()));
    for (std::size_t j = 0; j < cons_.size(); ++j)
    {
        const auto &cr = cons_[j];
        const double z = x(zi(cr.user, cr.group));
        switch (cr.kind)
        {
        case ConstraintRef::Cone: {
            const double re = x(vi(cr.user, cr.group)), im = x(nc_ + vi(cr.user, cr.group));
            c(j) = re * re + im * im - z;
            break;
        }
        case ConstraintRef::Leakage:
            c(j) = z - fix_.leakage;
            break;
        case ConstraintRef::MinRate:
            c(j) = rate_rhs_(cr.user) - z * rate_coef_(cr.user);
            break;
        }
    }
    return c;
}

RMat ScaSubproblem::constraint_jacobian(const RVec &x) const
{
    RMat J = RMat::Zero(static_cast<Eigen::Index>(cons_.size()), dim());
    for (std::size_t j = 0; j < cons_.size(); ++j)
    {
        const auto &cr = cons_[j];
        const int z = zi(cr.user, cr.group);
        switch (cr.kind)
        {
        case ConstraintRef::Cone:
            J(j, vi(cr.user, cr.group)) = 2.0 * x(vi(cr.user, cr.group));
            J(j, nc_ + vi(cr.user, cr.group)) = 2.0 * x(nc_ + vi(cr.user, cr.group));
            J(j, z) = -1.0;
            break;
        case ConstraintRef::Leakage:
            J(j, z) = 1.0;
            break;
        case ConstraintRef::MinRate:
            J(j, z) = -rate_coef_(cr.user);
            break;
        }
    }
    return J;
}

void ScaSubproblem::add_constraint_hessians(const RVec &, const RVec &weight, RMat &hess) const
{
    for (std::size_t j = 0; j < cons_.size(); ++j)
    {
        const auto &cr = cons_[j];
        if (cr.kind != ConstraintRef::Cone)
            continue;
        const Eigen::Index re = vi(cr.user, cr.group), im = nc_ + re;
        hess(re, re) += 2.0 * weight(j);
        hess(im, im) += 2.0 * weight(j);
    }
}

double ScaSubproblem::max_violation(const ScaPoint &p) const
{
    if (cons_.empty())
        return 0.0;
    return std::max(0.0, constraint_values(pack(p)).maxCoeff());
}

double ScaSubproblem::kkt_residual(const ScaPoint &p, const RVec &multipliers) const
{
    const RVec x = pack(p);
    RVec g = true_gradient(p);
    double res = 0.0;
    if (!cons_.empty())
    {
        if (multipliers.size() != static_cast<Eigen::Index>(cons_.size()))
            throw InvalidDimension("kkt_residual: one multiplier per constraint is required");
        const RVec c = constraint_values(x);
        g += constraint_jacobian(x).transpose() * multipliers;
        res = std::max(res, c.cwiseMax(0.0).maxCoeff());
        res = std::max(res, (-multipliers).cwiseMax(0.0).maxCoeff());
        res = std::max(res, multipliers.cwiseProduct(c).cwiseAbs().maxCoeff());
    }
    return std::max(res, g.cwiseAbs().maxCoeff());
}

double ScaSubproblem::kkt_residual(const ScaPoint &p) const
{
    const RVec x = pack(p);
    const RVec g = true_gradient(p);
    const RVec c = constraint_values(x);
    double res = 0.0;
    for (int i = 0; i < N_; ++i)
        for (int r = 0; r < R_; ++r)
            res = std::max({res, std::abs(g(wi(r, i))), std::abs(g(nc_ + wi(r, i)))});
    if (!cons_.empty())
        res = std::max(res, c.cwiseMax(0.0).maxCoeff());

    // Constraints touching each (user, group) pair; every constraint involves a single pair
    std::vector<std::vector<int>> touching(static_cast<std::size_t>(K_) * N_);
    for (std::size_t j = 0; j < cons_.size(); ++j)
        touching[static_cast<std::size_t>(cons_[j].group) * K_ + cons_[j].user].push_back(static_cast<int>(j));

    for (int i = 0; i < N_; ++i)
    {
        for (int u = 0; u < K_; ++u)
        {
            const Eigen::Index idx[3] = {vi(u, i), nc_ + vi(u, i), zi(u, i)};
            Eigen::Vector3d gp(g(idx[0]), g(idx[1]), g(idx[2]));
            const double scale = 1.0 + std::abs(x(idx[2]));
            std::vector<int> near;
            std::vector<Eigen::Vector3d> rows;
            for (int j : touching[static_cast<std::size_t>(i) * K_ + u])
            {
                if (-c(j) > 1e-6 * scale)
                    continue;
                const ConstraintRef &cr = cons_[j];
                if (cr.kind == ConstraintRef::Cone)
                    rows.emplace_back(2.0 * x(idx[0]), 2.0 * x(idx[1]), -1.0);
                else if (cr.kind == ConstraintRef::Leakage)
                    rows.emplace_back(0.0, 0.0, 1.0);
                else
                    rows.emplace_back(0.0, 0.0, -rate_coef_(u));
                near.push_back(j);
            }
            // Best nonnegative multipliers over every subset of the nearly active set
            double best = gp.cwiseAbs().maxCoeff();
            const int m = static_cast<int>(near.size());
            for (int mask = 1; mask < (1 << m); ++mask)
            {
                std::vector<int> sel;
                for (int k = 0; k < m; ++k)
                    if (mask & (1 << k))
                        sel.push_back(k);
                Eigen::MatrixXd A(3, sel.size());
                for (std::size_t k = 0; k < sel.size(); ++k)
                    A.col(static_cast<Eigen::Index>(k)) = rows[sel[k]];
                const RVec mu = A.colPivHouseholderQr().solve(-gp);
                if (!mu.allFinite() || mu.minCoeff() < 0.0)
                    continue;
                double r = (gp + A * mu).cwiseAbs().maxCoeff();
                for (std::size_t k = 0; k < sel.size(); ++k)
                    r = std::max(r, std::abs(mu(static_cast<Eigen::Index>(k)) * c(near[sel[k]])));
                best = std::min(best, r);
            }
            res = std::max(res, best);
        }
    }
    return res;
}

std::unique_ptr<ConvexProgram> ScaSubproblem::program(const Surrogate &s) const
{
    return std::make_unique<ScaProgram>(*this, s);
}

// ---------------------------------------------------------------------------------------------

InitialPoint initialize_feasible(const ScaSubproblem &sub, const CMat &W)
{
    const int N = sub.n_groups(), K = sub.n_users();
    const auto &layout = sub.layout();
    const double tau = sub.fixed().leakage;
    if (W.rows() != sub.n_rf() || W.cols() != N)
        throw InvalidDimension("initialize_feasible: W has the wrong shape");

    InitialPoint ip;
    ip.point.W = W;
    ip.point.V = sub.cascade() * W;
    for (int i = 0; i < N; ++i)
    {
        double worst = 0.0;
        for (int u = 0; u < K; ++u)
            if (layout.group_of(u) != i)
                worst = std::max(worst, std::norm(ip.point.V(u, i)));
        const double floor = 1e-9 * std::max(1.0, worst);
        if (worst + floor >= tau)
        {
            const double scale = std::sqrt(0.5 * tau / worst);
            ip.point.W.col(i) *= scale;
            ip.point.V.col(i) *= scale;
            ip.scaled_groups.push_back(i);
        }
    }

    ip.point.Z.resize(K, N);
    for (int u = 0; u < K; ++u)
    {
        for (int i = 0; i < N; ++i)
        {
            const double v2 = std::norm(ip.point.V(u, i));
            double z = v2 + 1e-9 * std::max(1.0, v2);
            if (layout.group_of(u) != i)
                z = std::min(z, 0.5 * (v2 + tau));
            ip.point.Z(u, i) = z;
        }
        const double rhs = sub.rate_rhs()(u);
        if (rhs > 0.0)
        {
            const double coef = sub.rate_coef()(u);
            if (!(coef > 0.0))
            {
                ip.relaxed = true;
                continue;
            }
            const double zmin = rhs / coef;
            const int n = layout.group_of(u);
            ip.point.Z(u, n) = std::max(ip.point.Z(u, n), zmin + 1e-9 * std::max(1.0, zmin));
        }
    }
    return ip;
}

ScaOptions ScaOptions::from(const SolverOptions &s)
{
    ScaOptions o;
    o.tol = s.sca_tol;
    o.max_iter = s.sca_max_iter;
    o.kkt_tol = s.sca_kkt_tol;
    o.barrier.tol = s.barrier_tol;
    o.barrier.mu = s.barrier_mu;
    return o;
}

// Rounding in the inner solver can raise the objective by this much near a stationary point
constexpr double kDescentSlack = 1e-10;

ScaResult sca_optimize(const ScaSubproblem &sub, const CMat &W0, const ScaOptions &opt)
{
    InitialPoint ip = initialize_feasible(sub, W0);
    ScaResult res;
    res.relaxed_start = ip.relaxed;
    if (ip.relaxed)
        throw SubproblemInfeasible("minimum rates cannot be met with the current power split");

    ScaPoint cur = ip.point;
    double obj = sub.true_objective(cur);
    res.multipliers = RVec::Zero(static_cast<Eigen::Index>(sub.constraints().size()));
    res.trace.push_back({0, obj, sub.kkt_residual(cur), sub.max_violation(cur)});

    RVec x = sub.pack(cur);
    const BarrierOptions &bo = opt.barrier;
    for (int it = 1; it <= opt.max_iter; ++it)
    {
        const Surrogate s = sub.linearize(cur);
        const auto prog = sub.program(s);
        const BarrierResult br = solve_barrier(*prog, x, bo);
        res.newton_steps += br.newton_steps;
        if (br.status == BarrierStatus::NumericalFailure)
            break;
        ScaPoint cand = sub.unpack(br.x);
        const double cobj = sub.true_objective(cand);
        if (!(cobj <= obj + kDescentSlack))
        {
            // No descent left at this accuracy
            res.converged = true;
            break;
        }
        const double dW = (cand.W - cur.W).squaredNorm();
        cur = std::move(cand);
        obj = cobj;
        x = br.x;
        res.multipliers = br.multipliers;
        res.iterations = it;
        const double kkt = sub.kkt_residual(cur);
        res.trace.push_back({it, obj, kkt, sub.max_violation(cur)});
        if (dW <= opt.tol && (opt.kkt_tol <= 0.0 || kkt <= opt.kkt_tol))
        {
            res.converged = true;
            break;
        }
    }

    res.point = cur;
    res.u = sub.optimal_u(cur);
    res.objective = obj;
    res.kkt = res.trace.back().kkt;
    res.pinch = (cur.Z - cur.V.cwiseAbs2()).cwiseAbs().maxCoeff();
    return res;
}

double penalized_objective(const BeamformingState &s, const ChannelSet &ch, const GroupLayout &layout,
                           const PowerSolution &powers, const DecodingOrder &order, double lambda, double noise)
{
    const int N = layout.n_groups(), K = layout.n_users();
    if (s.aux_v.rows() != K || s.aux_v.cols() != N || s.aux_z.rows() != K || s.aux_z.cols() != N ||
        static_cast<int>(s.aux_u.size()) != N)
        throw InvalidDimension("penalized_objective: auxiliaries have the wrong shape");
    double f = 0.0;
    for (int n = 0; n < N; ++n)
    {
        double acc = 0.0;
        for (int k : order[n])
        {
            const int u = layout.user(n, k);
            const double z = s.aux_z(u, n);
            const double a = z * acc + noise;
            acc += powers.user_powers(u);
            const double b = z * acc + noise;
            if (!(a > 0.0) || !(b > 0.0))
                throw DomainError("penalized objective: non-positive log argument");
            f += std::log2(a) - std::log2(b);
        }
    }
    double pen = (s.hybrid - s.analog * s.digital).squaredNorm();
    for (int i = 0; i < N; ++i)
    {
        pen += (s.aux_u[i] - ch.ap_ris * (s.analog * s.digital.col(i))).squaredNorm();
        for (int u = 0; u < K; ++u)
        {
            const cd c = ch.ris_user[u].dot(s.theta.cwiseProduct(s.aux_u[i]));
            pen += std::norm(s.aux_v(u, i) - c);
            pen += s.aux_z(u, i) - std::norm(s.aux_v(u, i));
        }
    }
    return f + lambda * pen;
}

} // namespace risnoma
