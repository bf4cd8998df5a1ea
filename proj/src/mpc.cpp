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

#include "borinot/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "borinot/robot_ocp.hpp"

namespace borinot {
namespace {

bool AllFinite(const std::vector<Eigen::VectorXd>& v) {
  return std::all_of(v.begin(), v.end(), [](const Eigen::VectorXd& x) { return x.allFinite(); });
}

template <typename T>
std::vector<T> Shift(const std::vector<T>& v, int n) {
  std::vector<T> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = v[std::min(i + static_cast<std::size_t>(n), v.size() - 1)];
  }
  return out;
}

}  // namespace

MpcController::MpcController(std::shared_ptr<const RobotModel> model,
                             std::shared_ptr<const Rail> rail, MpcConfig config)
    : model_(std::move(model)), rail_(std::move(rail)), config_(std::move(config)) {
  rail_->Validate();
  if (config_.nodes < 2) throw std::invalid_argument("MPC needs at least 2 nodes");
  if (std::abs(config_.dt - rail_->dt) > 1e-12) {
    throw std::invalid_argument("MPC node dt must equal the rail spacing");
  }
  wx_ = config_.state_weights.size() ? config_.state_weights : DefaultStateWeights(*model_);
  wu_ = config_.control_weights.size() ? config_.control_weights : DefaultControlWeights(*model_);
}

ShootingProblem MpcController::BuildProblem(const State& x, double t) const {
  const Rail& r = *rail_;
  const int i0 = r.NodeAt(t);
  const int last_x = static_cast<int>(r.xs.size()) - 1;
  const int last_u = static_cast<int>(r.us.size()) - 1;
  ShootingProblem p;
  p.x0 = x.Pack();
  for (int k = 0; k < config_.nodes; ++k) {
    NodeCost c;
    c.terms.push_back(ResidualTerm::StateTracking(r.StateAt(std::min(i0 + k, last_x)), wx_));
    c.terms.push_back(ResidualTerm::ControlReg(wu_, r.us[std::min(i0 + k, last_u)]));
    p.running.push_back(std::make_shared<RobotActionModel>(model_, std::move(c), config_.dt,
                                                           config_.substeps));
  }
  NodeCost terminal;
  terminal.terms.push_back(ResidualTerm::StateTracking(
      r.StateAt(std::min(i0 + config_.nodes, last_x)), config_.terminal_scale * wx_));
  p.terminal = std::make_shared<RobotTerminalModel>(model_, std::move(terminal));
  p.lower = model_->ControlLowerBound();
  p.upper = model_->ControlUpperBound();
  p.u_default = model_->HoverControl();
  return p;
}

MpcResult MpcController::Solve(const State& x, double t, const MpcResult* warm) const {
  const ShootingProblem p = BuildProblem(x, t);
  FddpSolver solver(p, config_.solver);
  MpcResult out;
  out.start_node = rail_->NodeAt(t);
  if (warm == nullptr) {
    out.solution = solver.Solve();
  } else {
    const int elapsed = std::max(0, out.start_node - warm->start_node);
    std::vector<Eigen::VectorXd> xs = Shift(warm->solution.xs, elapsed);
    xs.front() = p.x0;
    out.solution = solver.Solve(xs, Shift(warm->solution.us, elapsed));
  }
  if (!AllFinite(out.solution.xs) || !AllFinite(out.solution.us)) {
    if (warm == nullptr) throw std::runtime_error("MPC solve diverged without a fallback");
    out.solution = warm->solution;
    out.ok = false;
  }
  return out;
}

MpcResult MpcController::RailGuess(double t) const {
  const Rail& r = *rail_;
  MpcResult g;
  g.start_node = r.NodeAt(t);
  const std::size_t last_x = r.xs.size() - 1, last_u = r.us.size() - 1;
  for (int k = 0; k <= config_.nodes; ++k) {
    const std::size_t i = static_cast<std::size_t>(g.start_node + k);
    g.solution.xs.push_back(r.xs[std::min(i, last_x)]);
    if (k < config_.nodes) g.solution.us.push_back(r.us[std::min(i, last_u)]);
  }
  return g;
}

MpcResult MpcController::Step(const State& x, double t) {
  if (!last_) last_ = RailGuess(t);
  MpcResult r = Solve(x, t, &*last_);
  if (r.ok) {
    last_ = r;
  } else {
    r.start_node = last_->start_node;
  }
  return r;
}

}  // namespace borinot
