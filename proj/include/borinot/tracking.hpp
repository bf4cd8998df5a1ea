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

// Feed-forward plus PD tracking of a whole-body reference. The base error is
// taken in the body frame with the pose box-minus and mapped onto thrust
// corrections through the allocation pseudo-inverse; the limb receives the
// feed-forward torque and impedance targets.

#ifndef BORINOT_TRACKING_HPP_
#define BORINOT_TRACKING_HPP_

#include <Eigen/Core>

#include "borinot/dynamics.hpp"
#include "borinot/robot_model.hpp"

namespace borinot {

struct TrackingGains {
  Vec6 kp_pose = (Vec6() << 8, 8, 8, 6, 6, 3).finished();     // N/m, N m/rad
  Vec6 kd_twist = (Vec6() << 4, 4, 4, 2, 2, 1).finished();    // N s/m, N m s/rad
  double joint_stiffness = 3.0;    // N m/rad
  double joint_damping = 0.05;     // N m s/rad

  static TrackingGains Zero();
  /// Throws std::invalid_argument on negative gains.
  void Validate() const;
};

/// Variable-impedance joint command, evaluated by the joint driver.
struct LimbCommand {
  Eigen::VectorXd torque;      // feed-forward, N m
  Eigen::VectorXd q;           // desired angle, rad
  Eigen::VectorXd qd;          // desired rate, rad/s
  double stiffness = 0.0;
  double damping = 0.0;

  /// Impedance law clamped to each joint's torque limit.
  Eigen::VectorXd Torque(const RobotModel& model, const Eigen::VectorXd& q_meas,
                         const Eigen::VectorXd& qd_meas) const;
};

struct ActuatorCommand {
  Eigen::VectorXd thrusts;     // N, within [min_thrust, max_thrust]
  LimbCommand limb;
};

class TrackingController {
 public:
  TrackingController(const RobotModel& model, TrackingGains gains);

  ActuatorCommand Track(const State& x, const State& x_ref, const Eigen::VectorXd& u_ref) const;

  const TrackingGains& gains() const { return gains_; }

 private:
  const RobotModel* model_;
  AllocationMap allocation_;
  TrackingGains gains_;
};

}  // namespace borinot

#endif  // BORINOT_TRACKING_HPP_
