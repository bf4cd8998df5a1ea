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

// Sliding-window MPC along a reference rail. Every node tracks the rail
// state at its own time and regularizes the control towards the rail
// control; the terminal node tracks the rail with a scaled weight.

#ifndef BORINOT_MPC_HPP_
#define BORINOT_MPC_HPP_

#include <memory>
#include <optional>

#include "borinot/fddp.hpp"
#include "borinot/mission.hpp"
#include "borinot/robot_model.hpp"

namespace borinot {

struct MpcResult {
  SolverResult solution;
  int start_node = 0;    // rail node of the window's first node
  bool ok = true;        // false: solver failed, solution is the previous one
};

class MpcController {
 public:
  /// Throws std::invalid_argument if the rail spacing differs from config.dt.
  MpcController(std::shared_ptr<const RobotModel> model, std::shared_ptr<const Rail> rail,
                MpcConfig config);

  /// Window problem at time t with x0 = x. Nodes past the rail end hold the
  /// final rail state.
  ShootingProblem BuildProblem(const State& x, double t) const;

  /// Solves one window. Without `warm` the solver starts from a hover rollout.
  MpcResult Solve(const State& x, double t, const MpcResult* warm = nullptr) const;

  /// The rail window at time t as a solver guess.
  MpcResult RailGuess(double t) const;

  /// Solve warm-started from the previous Step shifted by the elapsed nodes;
  /// the first call starts from the rail window.
  MpcResult Step(const State& x, double t);

  void Reset() { last_.reset(); }
  const MpcConfig& config() const { return config_; }
  const Rail& rail() const { return *rail_; }

 private:
  std::shared_ptr<const RobotModel> model_;
  std::shared_ptr<const Rail> rail_;
  MpcConfig config_;
  Eigen::VectorXd wx_, wu_;
  std::optional<MpcResult> last_;
};

}  // namespace borinot

#endif  // BORINOT_MPC_HPP_
