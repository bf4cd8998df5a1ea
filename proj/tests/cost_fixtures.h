// Copyright 2026 The Borinot Control Authors
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

// Random states, controls and costs shared by the unit and acceptance tests.

#ifndef BORINOT_TESTS_COST_FIXTURES_H_
#define BORINOT_TESTS_COST_FIXTURES_H_

#include <algorithm>
#include <cmath>
#include <random>

#include "borinot/costs.hpp"
#include "borinot/dynamics.hpp"

namespace borinot::testing_util {

inline State RandomState(const RobotModel& model, std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  State s;
  s.base = Exp(Tangent6(Vec3(n(rng), n(rng), n(rng)), 0.6 * Vec3(n(rng), n(rng), n(rng))));
  s.q = Eigen::VectorXd(model.n_joints());
  s.qd = Eigen::VectorXd(model.n_joints());
  for (int i = 0; i < model.n_joints(); ++i) {
    s.q[i] = 1.5 * n(rng);
    s.qd[i] = n(rng);
  }
  s.twist = Tangent6(Vec3(n(rng), n(rng), n(rng)), Vec3(n(rng), n(rng), n(rng)));
  return s;
}

inline Eigen::VectorXd RandomControl(const RobotModel& model, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Eigen::VectorXd lo = model.ControlLowerBound();
  const Eigen::VectorXd hi = model.ControlUpperBound();
  Eigen::VectorXd c(model.nu());
  for (int i = 0; i < model.nu(); ++i) c[i] = lo[i] + (hi[i] - lo[i]) * u(rng);
  return c;
}

/// One term of every kind with random positive weights and targets.
inline NodeCost RandomCost(const RobotModel& model, std::mt19937& rng) {
  std::uniform_real_distribution<double> w(0.1, 10.0);
  std::normal_distribution<double> n(0.0, 1.0);
  NodeCost c;
  c.kind = NodeKind::kTask;
  Eigen::VectorXd wx = DefaultStateWeights(model);
  for (int i = 0; i < wx.size(); ++i) wx[i] *= w(rng);
  c.terms.push_back(ResidualTerm::StateTracking(RandomState(model, rng), wx));
  Eigen::VectorXd wu = DefaultControlWeights(model);
  for (int i = 0; i < wu.size(); ++i) wu[i] *= w(rng);
  c.terms.push_back(ResidualTerm::ControlReg(wu, RandomControl(model, rng)));
  c.terms.push_back(ResidualTerm::EePosition(Vec3(n(rng), n(rng), n(rng)), w(rng)));
  c.terms.push_back(ResidualTerm::BasePitch(0.5 * n(rng), w(rng)));
  Eigen::VectorXd lo(model.n_joints()), hi(model.n_joints());
  for (int i = 0; i < model.n_joints(); ++i) {
    lo[i] = model.joints[i].lower;
    hi[i] = model.joints[i].upper;
  }
  c.terms.push_back(ResidualTerm::JointBarrier(lo, hi, w(rng)));
  return c;
}

/// Max |analytic - central difference| over the gradient, relative to the
/// gradient's largest component. Step 1e-6 in the tangent and control spaces.
inline double GradientRelativeError(const RobotModel& model, const NodeCost& c, const State& x,
                                    const Eigen::VectorXd& u, const QuadraticApprox& q) {
  const double h = 1e-6;
  const int ndx = static_cast<int>(q.lx.size());
  double err = 0.0;
  for (int i = 0; i < ndx; ++i) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(ndx);
    d[i] = h;
    const double fd = (Eval(model, c, StatePlus(x, d), u) - Eval(model, c, StatePlus(x, -d), u)) / (2 * h);
    err = std::max(err, std::abs(fd - q.lx[i]));
  }
  for (int i = 0; i < u.size(); ++i) {
    Eigen::VectorXd up = u, um = u;
    up[i] += h;
    um[i] -= h;
    const double fd = (Eval(model, c, x, up) - Eval(model, c, x, um)) / (2 * h);
    err = std::max(err, std::abs(fd - q.lu[i]));
  }
  const double scale = std::max({q.lx.cwiseAbs().maxCoeff(), q.lu.size() ? q.lu.cwiseAbs().maxCoeff() : 0.0, 1e-8});
  return err / scale;
}

}  // namespace borinot::testing_util

#endif  // BORINOT_TESTS_COST_FIXTURES_H_
