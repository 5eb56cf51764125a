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

#include <memory>
#include <vector>

#include "risnoma/barrier.hpp"
#include "risnoma/config.hpp"
#include "risnoma/rate_model.hpp"

namespace risnoma {

// Decision variables of the digital beamforming subproblem. The auxiliary u_i are eliminated
// in closed form: for fixed (w_i, v_i) the penalty terms in u_i form a ridge least-squares problem.
struct ScaPoint
{
    CMat W;  // N_RF x N
    CMat V;  // K x N, v(user, group)
    RMat Z;  // K x N, z(user, group)
};

// Concave parts replaced by their tangents at the anchor
struct Surrogate
{
    RVec log_slope;   // per user, d/dz log2(z * S_prev + noise) at the anchor
    RVec log_offset;  // per user, value minus slope * z at the anchor
    CMat v_anchor;    // tangent of -|v|^2 is |v~|^2 - 2 Re(v conj(v~))
};

struct ScaFixed
{
    CVec theta;
    CMat F;
    CMat D;
    PowerSolution powers;
    DecodingOrder order;
    RVec min_rates;
    double lambda = 100.0;
    double leakage = 1.0;   // tau
    double noise = 1.0;
};

struct ConstraintRef
{
    enum Kind
    {
        Cone,     // |v|^2 - z <= 0
        Leakage,  // z - tau <= 0, other-group beams
        MinRate   // (2^g - 1) noise - z (p - (2^g - 1) S_prev) <= 0
    } kind;
    int user;
    int group;
};

class ScaSubproblem
{
  public:
    ScaSubproblem(const ChannelSet &ch, const GroupLayout &layout, ScaFixed fixed);

    int n_rf() const { return R_; }
    int n_groups() const { return N_; }
    int n_users() const { return K_; }
    Eigen::Index dim() const { return 2 * nc_ + K_ * N_; }
    const std::vector<ConstraintRef> &constraints() const { return cons_; }
    const ScaFixed &fixed() const { return fix_; }
    const GroupLayout &layout() const { return layout_; }

    RVec pack(const ScaPoint &p) const;
    ScaPoint unpack(const RVec &x) const;

    // Minimizing u_i for the given (w_i, v_i)
    std::vector<CVec> optimal_u(const ScaPoint &p) const;

    Surrogate linearize(const ScaPoint &anchor) const;

    // Penalized objective with u at its minimizer
    double true_objective(const ScaPoint &p) const;
    RVec true_gradient(const ScaPoint &p) const;

    // Surrogate objective value, gradient and Hessian in packed coordinates
    double surrogate_objective(const RVec &x, const Surrogate &s, RVec *grad, RMat *hess) const;

    RVec constraint_values(const RVec &x) const;
    RMat constraint_jacobian(const RVec &x) const;
    void add_constraint_hessians(const RVec &x, const RVec &weight, RMat &hess) const;

    // Largest constraint violation (0 when feasible)
    double max_violation(const ScaPoint &p) const;

    // First-order residual of the penalized problem with the supplied multipliers
    double kkt_residual(const ScaPoint &p, const RVec &multipliers) const;

    // Same residual with nonnegative least-squares multipliers on the nearly active constraints
    double kkt_residual(const ScaPoint &p) const;

    std::unique_ptr<ConvexProgram> program(const Surrogate &s) const;

    // Per-user quantities in decoding order
    int own_group(int user) const { return layout_.group_of(user); }
    double power(int user) const { return p_(user); }
    double prev_power(int user) const { return s_prev_(user); }
    const RVec &rate_coef() const { return rate_coef_; }
    const RVec &rate_rhs() const { return rate_rhs_; }

    // v = B w for the exact cascade, B = C^H G F
    const CMat &cascade() const { return B_; }

  private:
    int zi(int user, int group) const { return static_cast<int>(2 * nc_) + group * K_ + user; }
    int vi(int user, int group) const { return R_ * N_ + group * K_ + user; }
    int wi(int r, int group) const { return group * R_ + r; }

    GroupLayout layout_;
    ScaFixed fix_;
    int R_ = 0, N_ = 0, K_ = 0;
    Eigen::Index nc_ = 0;  // complex unknowns (W and V)
    CMat C_;               // conj(theta) .* h per user, N_r x K
    CMat GF_;              // G F
    CMat B_;               // C^H G F, K x N_RF
    CMat M_;               // (I + C^H C)^-1
    CMat uproj_;           // (I + C C^H)^-1
    RMat Rq_;              // Real form of the quadratic penalty
    RVec bq_;              // Real form of the linear penalty term from D
    double cq_ = 0.0;
    RVec p_, s_prev_;
    std::vector<ConstraintRef> cons_;
    RVec rate_coef_;       // p - (2^g - 1) S_prev per user
    RVec rate_rhs_;        // (2^g - 1) noise per user
};

struct InitialPoint
{
    ScaPoint point;
    std::vector<int> scaled_groups;  // beams shrunk to meet the leakage threshold
    bool relaxed = false;            // some minimum rate cannot be met with these powers
};

// u = G F w, v = h^H Theta u, z slightly above |v|^2 and above the minimum-rate floor
InitialPoint initialize_feasible(const ScaSubproblem &sub, const CMat &W);

struct ScaTraceRow
{
    int iteration = 0;
    double objective = 0.0;
    double kkt = 0.0;
    double max_violation = 0.0;
};

struct ScaOptions
{
    double tol = 1e-5;       // on ||W(t+1) - W(t)||^2
    double kkt_tol = 1e-4;   // stationarity required as well; 0 disables
    int max_iter = 50;
    BarrierOptions barrier;

    static ScaOptions from(const SolverOptions &s);
};

struct ScaResult
{
    ScaPoint point;
    std::vector<CVec> u;
    RVec multipliers;
    int iterations = 0;
    int newton_steps = 0;
    bool converged = false;
    bool relaxed_start = false;
    double objective = 0.0;
    double kkt = 0.0;
    double pinch = 0.0;  // max |z - |v|^2|
    std::vector<ScaTraceRow> trace;
};

ScaResult sca_optimize(const ScaSubproblem &sub, const CMat &W0, const ScaOptions &opt);

// Penalized objective evaluated directly from a state with explicit auxiliaries
double penalized_objective(const BeamformingState &s, const ChannelSet &ch, const GroupLayout &layout,
                           const PowerSolution &powers, const DecodingOrder &order, double lambda, double noise);

} // namespace risnoma
