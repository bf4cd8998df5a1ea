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

#include "borinot/robot_ocp.hpp"

#include <stdexcept>
#include <utility>

namespace borinot {
namespace {

// Forward-difference step for the dynamics Jacobians.
constexpr double kFdStep = 1e-7;

}  // namespace

Eigen::VectorXd RobotStateManifold::Integrate(const Eigen::VectorXd& x,
                                              const Eigen::VectorXd& dx) const {
  return StatePlus(State::Unpack(x, nj_), dx).Pack();
}

Eigen::VectorXd RobotStateManifold::Diff(const Eigen::VectorXd& x0,
                                         const Eigen::VectorXd& x1) const {
  return StateMinus(State::Unpack(x1, nj_), State::Unpack(x0, nj_));
}

RobotActionModel::RobotActionModel(std::shared_ptr<const RobotModel> model, NodeCost cost,
                                   double dt, int substeps)
    : model_(std::move(model)),
      cost_(std::move(cost)),
      dt_(dt),
      substeps_(substeps),
      manifold_(model_->n_joints()) {
  if (!(dt_ > 0.0)) throw std::invalid_argument("node dt must be positive");
  if (substeps_ < 1) throw std::invalid_argument("substeps must be positive");
  cost_.Validate(*model_);
}

void RobotActionModel::Calc(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                            ActionData& d) const {
  const State s = State::Unpack(x, model_->n_joints());
  d.xnext = borinot::Integrate(*model_, s, u, dt_, substeps_).Pack();
  d.cost = Eval(*model_, cost_, s, u);
}

void RobotActionModel::CalcDiff(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                ActionData& d) const {
  const int nj = model_->n_joints();
  const int ndx = StateTangentDim(nj);
  const int nu = model_->nu();
  const State s = State::Unpack(x, nj);
  const State next = borinot::Integrate(*model_, s, u, dt_, substeps_);
  d.xnext = next.Pack();

  d.fx.resize(ndx, ndx);
  d.fu.resize(ndx, nu);
  Eigen::VectorXd dx = Eigen::VectorXd::Zero(ndx);
  for (int i = 0; i < ndx; ++i) {
    dx[i] = kFdStep;
    const State p = borinot::Integrate(*model_, StatePlus(s, dx), u, dt_, substeps_);
    d.fx.col(i) = StateMinus(p, next) / kFdStep;
    dx[i] = 0.0;
  }
  Eigen::VectorXd up = u;
  for (int j = 0; j < nu; ++j) {
    up[j] += kFdStep;
    const State p = borinot::Integrate(*model_, s, up, dt_, substeps_);
    d.fu.col(j) = StateMinus(p, next) / kFdStep;
    up[j] = u[j];
  }

  QuadraticApprox q = Quadratize(*model_, cost_, s, u);
  d.cost = q.cost;
  d.lx = std::move(q.lx);
  d.lu = std::move(q.lu);
  d.lxx = std::move(q.lxx);
  d.lxu = std::move(q.lxu);
  d.luu = std::move(q.luu);
}

RobotTerminalModel::RobotTerminalModel(std::shared_ptr<const RobotModel> model, NodeCost cost)
    : model_(std::move(model)), cost_(std::move(cost)), manifold_(model_->n_joints()) {
  if (cost_.UsesControl()) throw std::invalid_argument("terminal cost cannot use controls");
  cost_.Validate(*model_);
}

void RobotTerminalModel::Calc(const Eigen::VectorXd& x, const Eigen::VectorXd&,
                              ActionData& d) const {
  d.xnext.resize(0);
  d.cost = Eval(*model_, cost_, State::Unpack(x, model_->n_joints()), Eigen::VectorXd());
}

void RobotTerminalModel::CalcDiff(const Eigen::VectorXd& x, const Eigen::VectorXd&,
                                  ActionData& d) const {
  QuadraticApprox q = Quadratize(*model_, cost_, State::Unpack(x, model_->n_joints()),
                                 Eigen::VectorXd());
  d.xnext.resize(0);
  d.cost = q.cost;
  d.lx = std::move(q.lx);
  d.lxx = std::move(q.lxx);
}

}  // namespace borinot
