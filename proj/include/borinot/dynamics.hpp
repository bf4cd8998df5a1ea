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

// Whole-body floating-base dynamics.
//
// Generalized velocity is (base twist in the body frame, joint rates), with
// spatial vectors ordered (linear, angular). Gravity acts along world -z.
// Propeller thrusts enter as a base wrench through the allocation map; joint
// torques act on the limb joints.
//
// Two independent routes are provided: the articulated-body recursion
// (ForwardDynamics) and the explicit M(q), h(q, v) construction
// (MassMatrix / BiasForces). They must agree to round-off.

#ifndef BORINOT_DYNAMICS_HPP_
#define BORINOT_DYNAMICS_HPP_

#include <span>
#include <vector>

#include <Eigen/Core>

#include "borinot/liegroup.hpp"
#include "borinot/robot_model.hpp"

namespace borinot {

struct State {
  Pose base;
  Eigen::VectorXd q;    // rad
  Tangent6 twist;       // body frame, m/s and rad/s
  Eigen::VectorXd qd;   // rad/s

  /// Base at `position` with identity attitude, joints at zero, at rest.
  static State Rest(const RobotModel& model, const Vec3& position = Vec3::Zero());

  /// Packed layout [p(3), quat w x y z (4), q(nj), twist(6), qd(nj)].
  Eigen::VectorXd Pack() const;
  static State Unpack(const Eigen::VectorXd& x, int n_joints);
};

/// Tangent dimension of the state manifold.
inline int StateTangentDim(int n_joints) { return 12 + 2 * n_joints; }
inline int StatePackedDim(int n_joints) { return 13 + 2 * n_joints; }

/// x ⊕ dx with dx ordered [pose(6), q(nj), twist(6), qd(nj)].
State StatePlus(const State& x, const Eigen::VectorXd& dx);
/// a ⊖ b in the same layout (pose block via BoxMinus).
Eigen::VectorXd StateMinus(const State& a, const State& b);

/// Thrusts followed by joint torques.
struct Control {
  Eigen::VectorXd thrusts;   // N
  Eigen::VectorXd torques;   // N m

  static Control FromVector(const Eigen::VectorXd& u, int n_props);
  Eigen::VectorXd Vector() const;
};

struct Acceleration {
  Tangent6 base;            // d/dt of the body-frame twist
  Eigen::VectorXd joints;   // rad/s^2

  Eigen::VectorXd Vector() const;
};

/// Spatial forces applied to each link, expressed in the link frame at the
/// link origin, ordered (force, moment). Empty means none.
using LinkForces = std::vector<Vec6>;

/// Spatial inertia of a link at its frame origin.
Mat6 SpatialInertia(const Link& link);

/// World poses of every link frame.
std::vector<Pose> LinkPoses(const RobotModel& model, const State& x);

Vec3 CenterOfMass(const RobotModel& model, const State& x);
/// World-frame CoM velocity.
Vec3 CenterOfMassVelocity(const RobotModel& model, const State& x);
Vec3 EndEffectorPosition(const RobotModel& model, const State& x);
Vec3 EndEffectorVelocity(const RobotModel& model, const State& x);

/// Whole-body spatial momentum (linear, angular about the world origin),
/// world frame.
Vec6 WorldMomentum(const RobotModel& model, const State& x);
double KineticEnergy(const RobotModel& model, const State& x);
double PotentialEnergy(const RobotModel& model, const State& x);

/// Base wrench produced by the thrusts plus the joint torques, as generalized
/// forces (nv).
Eigen::VectorXd GeneralizedActuation(const RobotModel& model, const Eigen::VectorXd& u);

/// Articulated-body forward dynamics. u = [thrusts; torques].
Acceleration ForwardDynamics(const RobotModel& model, const State& x,
                             const Eigen::VectorXd& u, const LinkForces& fext = {});

/// Joint-space inertia M(q), nv x nv, composite rigid body algorithm.
Eigen::MatrixXd MassMatrix(const RobotModel& model, const State& x);
/// h(q, v): velocity products, gravity and external forces, so that
/// M a = GeneralizedActuation(u) - h.
Eigen::VectorXd BiasForces(const RobotModel& model, const State& x,
                           const LinkForces& fext = {});

/// One integration step of length h given the acceleration at x: velocities
/// first, then the configuration with the mean of old and new velocities.
State AdvanceState(const State& x, const Acceleration& a, double h);

/// Constant control over dt, split in `substeps` equal steps.
State Integrate(const RobotModel& model, const State& x, const Eigen::VectorXd& u,
                double dt, int substeps = 1);

/// Fourth-order Runge-Kutta-Munthe-Kaas step on the state manifold. Used as
/// a high-accuracy reference (conservation checks, integrator error
/// estimates); the OCP and the plant use Integrate.
State IntegrateRk4(const RobotModel& model, const State& x, const Eigen::VectorXd& u,
                   double dt, int substeps = 1, const LinkForces& fext = {});

/// X[0] = x0, X[k+1] = Integrate(X[k], U[k]).
std::vector<State> Rollout(const RobotModel& model, const State& x0,
                           std::span<const Eigen::VectorXd> controls, double dt,
                           int substeps = 1);

}  // namespace borinot

#endif  // BORINOT_DYNAMICS_HPP_
