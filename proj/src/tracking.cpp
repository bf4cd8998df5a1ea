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

#include "borinot/tracking.hpp"

#include <algorithm>
#include <stdexcept>

namespace borinot {

TrackingGains TrackingGains::Zero() {
  TrackingGains g;
  g.kp_pose.setZero();
  g.kd_twist.setZero();
  g.joint_stiffness = 0.0;
  g.joint_damping = 0.0;
  return g;
}

void TrackingGains::Validate() const {
  if ((kp_pose.array() < 0).any() || (kd_twist.array() < 0).any() || joint_stiffness < 0 ||
      joint_damping < 0) {
    throw std::invalid_argument("tracking gains must be non-negative");
  }
}

Eigen::VectorXd LimbCommand::Torque(const RobotModel& model, const Eigen::VectorXd& q_meas,
                                    const Eigen::VectorXd& qd_meas) const {
  Eigen::VectorXd tau = torque + stiffness * (q - q_meas) + damping * (qd - qd_meas);
  for (int j = 0; j < model.n_joints(); ++j) {
    const double lim = model.joints[j].torque_limit;
    tau[j] = std::clamp(tau[j], -lim, lim);
  }
  return tau;
}

TrackingController::TrackingController(const RobotModel& model, TrackingGains gains)
    : model_(&model), allocation_(ComputeAllocationMap(model)), gains_(gains) {
  gains_.Validate();
}

ActuatorCommand TrackingController::Track(const State& x, const State& x_ref,
                                          const Eigen::VectorXd& u_ref) const {
  const RobotModel& m = *model_;
  const int np = m.n_props();
  const int nj = m.n_joints();

  // Body-frame errors; the allocation cannot produce lateral force, so those
  // components are dropped by the pseudo-inverse.
  const Vec6 pose_err = BoxMinus(x_ref.base, x.base).Vector();
  const Vec6 twist_err = (x_ref.twist - x.twist).Vector();
  const Vec6 wrench = gains_.kp_pose.cwiseProduct(pose_err) + gains_.kd_twist.cwiseProduct(twist_err);

  ActuatorCommand cmd;
  cmd.thrusts = u_ref.head(np) + allocation_.pseudo_inverse * wrench;
  for (int i = 0; i < np; ++i) {
    cmd.thrusts[i] = std::clamp(cmd.thrusts[i], m.min_thrust, m.propellers[i].max_thrust);
  }
  cmd.limb.torque = u_ref.tail(nj);
  cmd.limb.q = x_ref.q;
  cmd.limb.qd = x_ref.qd;
  cmd.limb.stiffness = gains_.joint_stiffness;
  cmd.limb.damping = gains_.joint_damping;
  return cmd;
}

}  // namespace borinot
