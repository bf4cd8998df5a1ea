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

// Parametric description of a multirotor base carrying a tree of revolute
// limb joints. The model file schema is documented in docs/model_schema.md.

#ifndef BORINOT_ROBOT_MODEL_HPP_
#define BORINOT_ROBOT_MODEL_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "borinot/liegroup.hpp"

namespace borinot {

inline constexpr double kStandardGravity = 9.81;

/// Raised for any model file that violates the schema or a physical invariant.
/// The message starts with the offending field path.
class ModelError : public std::runtime_error {
 public:
  ModelError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct Link {
  std::string name;
  double mass = 0.0;              // kg
  Vec3 com = Vec3::Zero();        // m, link frame
  Mat3 inertia = Mat3::Zero();    // kg m^2, about the CoM, link frame axes
};

struct Joint {
  std::string name;
  int parent = 0;                 // link index
  int child = 0;                  // link index (always joint index + 1)
  Vec3 axis = Vec3::UnitY();      // unit, joint frame
  Pose origin;                    // joint frame in the parent link frame at q = 0
  double lower = 0.0;             // rad
  double upper = 0.0;             // rad
  double torque_limit = 0.0;      // N m
};

struct Propeller {
  Vec3 position = Vec3::Zero();   // m, base frame; thrust acts along +z
  int spin = 1;                   // sign of the reaction yaw torque
  double max_thrust = 0.0;        // N
  double torque_ratio = 0.0165;   // m, yaw torque per unit thrust
};

/// A point rigidly attached to a link, e.g. the limb tip.
struct EndEffector {
  int link = 0;
  Vec3 offset = Vec3::Zero();
};

class RobotModel {
 public:
  std::string name;
  double gravity = kStandardGravity;
  /// Links in topological order; links[0] is the floating base.
  std::vector<Link> links;
  /// joints[i] moves links[i + 1].
  std::vector<Joint> joints;
  std::vector<Propeller> propellers;
  double min_thrust = 0.0;
  EndEffector end_effector;

  int n_joints() const { return static_cast<int>(joints.size()); }
  int n_props() const { return static_cast<int>(propellers.size()); }
  /// Control dimension: thrusts followed by joint torques.
  int nu() const { return n_props() + n_joints(); }
  /// Generalized velocity dimension.
  int nv() const { return 6 + n_joints(); }

  double TotalMass() const;
  double TotalMaxThrust() const;

  Eigen::VectorXd ControlLowerBound() const;
  Eigen::VectorXd ControlUpperBound() const;
  /// Equal thrusts carrying the total weight, zero joint torques.
  Eigen::VectorXd HoverControl() const;

  /// Checks every invariant; throws ModelError.
  void Validate() const;
};

RobotModel LoadModel(const nlohmann::json& doc);
RobotModel LoadModelFile(const std::filesystem::path& path);

/// Linear map from per-propeller thrust to the base wrench
/// (force N, torque N m) in the base frame.
struct AllocationMap {
  Eigen::Matrix<double, 6, Eigen::Dynamic> matrix;
  Eigen::Matrix<double, Eigen::Dynamic, 6> pseudo_inverse;

  Vec6 Wrench(const Eigen::VectorXd& thrusts) const { return matrix * thrusts; }
};

AllocationMap ComputeAllocationMap(const RobotModel& model);

/// Total maximum thrust over total weight.
double ThrustToWeight(const RobotModel& model);
/// Fraction of the available thrust used while hovering, 1 / TWR.
double HoverThrottle(const RobotModel& model);

}  // namespace borinot

#endif  // BORINOT_ROBOT_MODEL_HPP_
