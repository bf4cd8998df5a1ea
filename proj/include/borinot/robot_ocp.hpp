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

// Shooting nodes for the aerial robot: packed states (State::Pack layout),
// controls [thrusts; torques], constant control over each node interval.

#ifndef BORINOT_ROBOT_OCP_HPP_
#define BORINOT_ROBOT_OCP_HPP_

#include <memory>

#include "borinot/costs.hpp"
#include "borinot/dynamics.hpp"
#include "borinot/fddp.hpp"
#include "borinot/robot_model.hpp"

namespace borinot {

class RobotStateManifold final : public StateManifold {
 public:
  explicit RobotStateManifold(int n_joints) : nj_(n_joints) {}
  int nx() const override { return StatePackedDim(nj_); }
  int ndx() const override { return StateTangentDim(nj_); }
  Eigen::VectorXd Integrate(const Eigen::VectorXd& x, const Eigen::VectorXd& dx) const override;
  Eigen::VectorXd Diff(const Eigen::VectorXd& x0, const Eigen::VectorXd& x1) const override;

 private:
  int nj_;
};

class RobotActionModel final : public ActionModel {
 public:
  /// The dynamics take `substeps` integration steps per node interval dt.
  RobotActionModel(std::shared_ptr<const RobotModel> model, NodeCost cost, double dt,
                   int substeps = 1);

  const StateManifold& state() const override { return manifold_; }
  int nu() const override { return model_->nu(); }
  void Calc(const Eigen::VectorXd& x, const Eigen::VectorXd& u, ActionData& d) const override;
  void CalcDiff(const Eigen::VectorXd& x, const Eigen::VectorXd& u, ActionData& d) const override;

  const NodeCost& cost() const { return cost_; }
  double dt() const { return dt_; }

 private:
  std::shared_ptr<const RobotModel> model_;
  NodeCost cost_;
  double dt_;
  int substeps_;
  RobotStateManifold manifold_;
};

class RobotTerminalModel final : public ActionModel {
 public:
  RobotTerminalModel(std::shared_ptr<const RobotModel> model, NodeCost cost);

  const StateManifold& state() const override { return manifold_; }
  int nu() const override { return 0; }
  void Calc(const Eigen::VectorXd& x, const Eigen::VectorXd& u, ActionData& d) const override;
  void CalcDiff(const Eigen::VectorXd& x, const Eigen::VectorXd& u, ActionData& d) const override;

  const NodeCost& cost() const { return cost_; }

 private:
  std::shared_ptr<const RobotModel> model_;
  NodeCost cost_;
  RobotStateManifold manifold_;
};

}  // namespace borinot

#endif  // BORINOT_ROBOT_OCP_HPP_
