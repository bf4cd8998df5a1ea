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

// Missions: ordered navigation and task phases, discretized into an offline
// optimal control problem whose solution becomes the reference rail.

#ifndef BORINOT_MISSION_HPP_
#define BORINOT_MISSION_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "borinot/costs.hpp"
#include "borinot/dynamics.hpp"
#include "borinot/fddp.hpp"
#include "borinot/robot_model.hpp"

namespace borinot {

/// Malformed mission; field() names the offending entry.
class MissionError : public ModelError {
 public:
  using ModelError::ModelError;
};

/// Hover at a position with a yaw and a limb configuration.
struct Waypoint {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;                 // rad
  Eigen::VectorXd joints;           // empty: limb left free
};

struct TaskWeights {
  double waypoint = 100.0;          // multiplies the state weights
  double ee = 1000.0;
  double pitch = 100.0;
  double joints = 10.0;             // multiplies the joint state weights
};

struct Phase {
  NodeKind kind = NodeKind::kNavigation;
  double duration = 0.0;            // s; zero only for a final point task
  std::optional<Waypoint> waypoint;
  std::optional<Vec3> ee_position;  // m, world
  std::optional<double> pitch;      // rad
  std::optional<Eigen::VectorXd> joints;
  TaskWeights weights;
};

struct OfflineOptions {
  double thrust_weight = 0.1;       // around the hover thrust
  double torque_weight = 0.003;
  double navigation_weight = 0.01;  // weak state regularization, position excluded
  double barrier_weight = 100.0;
  double barrier_margin = 0.1;      // rad inside the joint limits
  int substeps = 1;
  SolverOptions solver{.max_iters = 400, .tol = 1e-5};
};

struct MpcConfig {
  int nodes = 35;
  double dt = 0.02;
  Eigen::VectorXd state_weights;    // empty: DefaultStateWeights
  Eigen::VectorXd control_weights;  // empty: DefaultControlWeights
  double terminal_scale = 10.0;
  int substeps = 1;
  SolverOptions solver{.max_iters = 5, .tol = 1e-6};
};

struct MissionSpec {
  std::string name;
  std::filesystem::path model_path;  // resolved against the mission file
  double dt = 0.02;
  Vec3 initial_position = Vec3::Zero();
  Eigen::VectorXd initial_joints;
  std::vector<Phase> phases;
  OfflineOptions offline;
  MpcConfig mpc;

  double Duration() const;
  /// Running nodes per phase at `dt`; throws MissionError if a duration is
  /// not a whole number of nodes.
  std::vector<int> NodesPerPhase(double dt) const;
  /// Throws MissionError.
  void Validate(const RobotModel& model) const;
  /// Rest state at the initial position with the initial joints.
  State InitialState(const RobotModel& model) const;
};

MissionSpec ParseMission(const nlohmann::json& doc);
MissionSpec LoadMissionFile(const std::filesystem::path& path);

/// Hover state at a waypoint.
State WaypointState(const RobotModel& model, const Waypoint& wp);

/// One running node per dt, terminal cost from the final task.
ShootingProblem BuildOcp(const MissionSpec& mission, std::shared_ptr<const RobotModel> model,
                         double dt);

/// Reference rail: states at t_k = k dt and the controls between them.
struct Rail {
  double dt = 0.02;
  int n_joints = 0;
  std::vector<Eigen::VectorXd> xs;   // packed, |us| + 1
  std::vector<Eigen::VectorXd> us;
  bool converged = false;
  int iterations = 0;
  std::vector<double> cost_trace;

  double Duration() const { return dt * static_cast<double>(us.size()); }
  /// Nearest node at time t, clamped to the rail.
  int NodeAt(double t) const;
  State StateAt(int k) const;
  void Validate() const;
};

/// Solves the offline problem. The rail carries the convergence flag.
Rail SolveOffline(const MissionSpec& mission, std::shared_ptr<const RobotModel> model);

/// Piecewise-linear initial guess through the waypoints at rest.
std::vector<Eigen::VectorXd> InitialGuess(const MissionSpec& mission, const RobotModel& model,
                                          double dt);

/// Columns t, x0.., u0..; the last row leaves the controls empty.
std::string RailCsv(const Rail& rail);

}  // namespace borinot

#endif  // BORINOT_MISSION_HPP_
