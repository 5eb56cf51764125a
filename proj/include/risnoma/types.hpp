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

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace risnoma {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using Rng = std::mt19937_64;

// ---------------------------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error
{
  public:
    using Error::Error;
};

class InvalidConfig : public Error
{
  public:
    using Error::Error;
};

class InvalidGeometry : public Error
{
  public:
    using Error::Error;
};

class DomainError : public Error
{
  public:
    using Error::Error;
};

class PreconditionViolation : public Error
{
  public:
    using Error::Error;
};

class RetractionSingularity : public Error
{
  public:
    using Error::Error;
};

// Base for every condition that makes a trial infeasible
class Infeasible : public Error
{
  public:
    using Error::Error;
};

class InfeasibleBudget : public Infeasible
{
  public:
    InfeasibleBudget(const std::string &what, double deficit) : Infeasible(what), deficit_(deficit) {}
    double deficit() const { return deficit_; }

  private:
    double deficit_;
};

class InfeasibleRates : public Infeasible
{
  public:
    using Infeasible::Infeasible;
};

class DegenerateGroup : public Infeasible
{
  public:
    using Infeasible::Infeasible;
};

class GlobalInfeasible : public Infeasible
{
  public:
    GlobalInfeasible(const std::string &what, double excess) : Infeasible(what), excess_(excess) {}
    double excess() const { return excess_; }

  private:
    double excess_;
};

class SubproblemInfeasible : public Infeasible
{
  public:
    using Infeasible::Infeasible;
};

// ---------------------------------------------------------------------------------------------
// Users are stored group-major: user index = offset(n) + k

class GroupLayout
{
  public:
    GroupLayout() = default;
    explicit GroupLayout(std::vector<int> sizes);

    int n_groups() const { return static_cast<int>(sizes_.size()); }
    int n_users() const { return n_users_; }
    int size(int n) const { return sizes_.at(n); }
    int offset(int n) const { return offsets_.at(n); }
    int user(int n, int k) const { return offsets_.at(n) + k; }
    int group_of(int user) const { return group_of_.at(user); }
    const std::vector<int> &sizes() const { return sizes_; }

  private:
    std::vector<int> sizes_;
    std::vector<int> offsets_;
    std::vector<int> group_of_;
    int n_users_ = 0;
};

// Circularly-symmetric complex Gaussian sample with the given variance
cd complex_gaussian(Rng &rng, double variance);

// Uniform sample on [0, 2*pi)
double uniform_angle(Rng &rng);

// Independent stream derived from a seed and a stream label
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace risnoma
