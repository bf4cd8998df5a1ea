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

// Residual-based node costs, 0.5 * sum_i ||r_i||^2_{W_i}, with Gauss-Newton
// derivatives. State derivatives are taken with respect to a right
// perturbation x ⊕ dx in the StatePlus layout.

#ifndef BORINOT_COSTS_HPP_
#define BORINOT_COSTS_HPP_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "borinot/dynamics.hpp"
#include "borinot/robot_model.hpp"

namespace borinot {

enum class ResidualKind {
  kStateTracking,   // x ⊖ x_ref, diag weights over the tangent (12 + 2 nj)
  kControlReg,      // u - u_ref, diag weights over the controls
  kEePosition,      // p_ee(x) - target, scalar weight
  kBasePitch,       // pitch(x) - target, scalar weight
  kJointBarrier,    // one-sided violation of [lower, upper], scalar weight
};

struct ResidualTerm {
  ResidualKind kind = ResidualKind::kControlReg;
  Eigen::VectorXd weights;    // diagonal; size 1 for scalar-weighted kinds
  State x_ref;                // kStateTracking
  Eigen::VectorXd u_ref;      // kControlReg (empty means zero)
  Vec3 target = Vec3::Zero(); // kEePosition
  double pitch = 0.0;         // kBasePitch, rad
  Eigen::VectorXd lower;      // kJointBarrier, rad
  Eigen::VectorXd upper;

  static ResidualTerm StateTracking(const State& x_ref, const Eigen::VectorXd& weights);
  static ResidualTerm ControlReg(const Eigen::VectorXd& weights,
                                 const Eigen::VectorXd& u_ref = {});
  static ResidualTerm EePosition(const Vec3& target, double weight);
  static ResidualTerm BasePitch(double pitch, double weight);
  static ResidualTerm JointBarrier(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                   double weight);

  bool UsesControl() const { return kind == ResidualKind::kControlReg; }
  int Dim(const RobotModel& model) const;
  /// Same term with every weight multiplied by `s`.
  ResidualTerm Scaled(double s) const;
};

enum class NodeKind { kNavigation, kTask };

struct NodeCost {
  std::vector<ResidualTerm> terms;
  NodeKind kind = NodeKind::kNavigation;

  /// Throws std::invalid_argument on negative weights, size mismatches or a
  /// task node without a task residual.
  void Validate(const RobotModel& model) const;
  bool UsesControl() const;
  NodeCost Scaled(double s) const;
};

/// Residual vector and its Jacobians. Jx is over the state tangent, Ju over
/// the controls (zero for state-only terms).
struct ResidualData {
  Eigen::VectorXd r;
  Eigen::MatrixXd jx;
  Eigen::MatrixXd ju;
};

ResidualData EvalResidual(const RobotModel& model, const ResidualTerm& term, const State& x,
                          const Eigen::VectorXd& u, bool with_jacobians);

/// Scalar node cost. `u` may be empty for nodes that do not use controls.
double Eval(const RobotModel& model, const NodeCost& cost, const State& x,
            const Eigen::VectorXd& u);

struct QuadraticApprox {
  double cost = 0.0;
  Eigen::VectorXd lx;    // ndx
  Eigen::VectorXd lu;    // nu
  Eigen::MatrixXd lxx;
  Eigen::MatrixXd lxu;
  Eigen::MatrixXd luu;
};

QuadraticApprox Quadratize(const RobotModel& model, const NodeCost& cost, const State& x,
                           const Eigen::VectorXd& u);

/// Default diagonal tracking weights: 10 position, 10 orientation,
/// 1 velocities, 5 joint angles.
Eigen::VectorXd DefaultStateWeights(const RobotModel& model);
/// 0.1 on every control.
Eigen::VectorXd DefaultControlWeights(const RobotModel& model);

}  // namespace borinot

#endif  // BORINOT_COSTS_HPP_
