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

#include "borinot/mission.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "borinot/robot_ocp.hpp"

namespace borinot {
namespace {

using nlohmann::json;

constexpr double kNodeRounding = 1e-6;

double Number(const json& obj, const std::string& path, const char* key, double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw MissionError(path + "." + key, "expected a number");
  return it->get<double>();
}

Eigen::VectorXd Vector(const json& v, const std::string& path) {
  if (!v.is_array()) throw MissionError(path, "expected an array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw MissionError(path, "expected an array of numbers");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

Vec3 Vector3(const json& v, const std::string& path) {
  const Eigen::VectorXd x = Vector(v, path);
  if (x.size() != 3) throw MissionError(path, "expected 3 numbers");
  return x;
}

double Degrees(double deg) { return deg * std::numbers::pi / 180.0; }

TaskWeights ParseWeights(const json& obj, const std::string& path) {
  TaskWeights w;
  if (!obj.is_object()) throw MissionError(path, "expected an object");
  w.waypoint = Number(obj, path, "waypoint", w.waypoint);
  w.ee = Number(obj, path, "ee", w.ee);
  w.pitch = Number(obj, path, "pitch", w.pitch);
  w.joints = Number(obj, path, "joints", w.joints);
  return w;
}

Phase ParsePhase(const json& jp, const std::string& path) {
  if (!jp.is_object()) throw MissionError(path, "expected an object");
  Phase p;
  const std::string kind = jp.value("kind", std::string());
  if (kind == "navigation") {
    p.kind = NodeKind::kNavigation;
  } else if (kind == "task") {
    p.kind = NodeKind::kTask;
  } else {
    throw MissionError(path + ".kind", "expected 'navigation' or 'task'");
  }
  p.duration = Number(jp, path, "duration", 0.0);
  if (auto it = jp.find("waypoint"); it != jp.end()) {
    const std::string wpath = path + ".waypoint";
    Waypoint wp;
    if (!it->contains("position")) throw MissionError(wpath + ".position", "missing required field");
    wp.position = Vector3(it->at("position"), wpath + ".position");
    wp.yaw = Degrees(Number(*it, wpath, "yaw_deg", 0.0));
    if (it->contains("joints")) wp.joints = Vector(it->at("joints"), wpath + ".joints");
    p.waypoint = wp;
  }
  if (auto it = jp.find("ee_position"); it != jp.end()) {
    p.ee_position = Vector3(*it, path + ".ee_position");
  }
  if (jp.contains("pitch_deg")) p.pitch = Degrees(Number(jp, path, "pitch_deg", 0.0));
  if (auto it = jp.find("joints"); it != jp.end()) p.joints = Vector(*it, path + ".joints");
  if (auto it = jp.find("weights"); it != jp.end()) p.weights = ParseWeights(*it, path + ".weights");
  return p;
}

void ParseSolver(const json& obj, const std::string& path, SolverOptions& s) {
  s.max_iters = static_cast<int>(Number(obj, path, "max_iters", s.max_iters));
  s.tol = Number(obj, path, "tol", s.tol);
}

// Task residuals of a phase; controls and barriers are added by the caller.
std::vector<ResidualTerm> TaskTerms(const Phase& p, const RobotModel& model) {
  const int nj = model.n_joints();
  const Eigen::VectorXd wx = DefaultStateWeights(model);
  std::vector<ResidualTerm> terms;
  if (p.waypoint) {
    Eigen::VectorXd w = p.weights.waypoint * wx;
    if (p.waypoint->joints.size() == 0) w.segment(6, nj).setZero();
    terms.push_back(ResidualTerm::StateTracking(WaypointState(model, *p.waypoint), w));
  }
  if (p.ee_position) terms.push_back(ResidualTerm::EePosition(*p.ee_position, p.weights.ee));
  if (p.pitch) terms.push_back(ResidualTerm::BasePitch(*p.pitch, p.weights.pitch));
  if (p.joints) {
    State ref = State::Rest(model);
    ref.q = *p.joints;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(StateTangentDim(nj));
    w.segment(6, nj) = p.weights.joints * wx.segment(6, nj);
    terms.push_back(ResidualTerm::StateTracking(ref, w));
  }
  return terms;
}

}  // namespace

double MissionSpec::Duration() const {
  double t = 0.0;
  for (const Phase& p : phases) t += p.duration;
  return t;
}

std::vector<int> MissionSpec::NodesPerPhase(double node_dt) const {
  std::vector<int> n;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const double exact = phases[i].duration / node_dt;
    const double whole = std::round(exact);
    if (std::abs(exact - whole) > kNodeRounding * std::max(1.0, whole)) {
      throw MissionError("phases[" + std::to_string(i) + "].duration",
                         "not a whole number of nodes at dt " + std::to_string(node_dt));
    }
    n.push_back(static_cast<int>(whole));
  }
  return n;
}

void MissionSpec::Validate(const RobotModel& model) const {
  if (phases.empty()) throw MissionError("phases", "mission has no phases");
  if (!(dt > 0.0)) throw MissionError("dt", "must be positive");
  const int nj = model.n_joints();
  if (initial_joints.size() != 0 && initial_joints.size() != nj) {
    throw MissionError("initial.joints", "expected " + std::to_string(nj) + " values");
  }
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const Phase& p = phases[i];
    const std::string path = "phases[" + std::to_string(i) + "]";
    const bool last = i + 1 == phases.size();
    if (!(p.duration > 0.0) && !(last && p.kind == NodeKind::kTask && p.duration == 0.0)) {
      throw MissionError(path + ".duration", "must be positive (zero only for a final task)");
    }
    const bool has_task = p.waypoint || p.ee_position || p.pitch || p.joints;
    if (p.kind == NodeKind::kTask && !has_task) throw MissionError(path, "task phase without residuals");
    if (p.kind == NodeKind::kNavigation && has_task) {
      throw MissionError(path, "navigation phases carry no task residuals");
    }
    if (p.waypoint && p.waypoint->joints.size() != 0 && p.waypoint->joints.size() != nj) {
      throw MissionError(path + ".waypoint.joints", "expected " + std::to_string(nj) + " values");
    }
    if (p.joints && p.joints->size() != nj) {
      throw MissionError(path + ".joints", "expected " + std::to_string(nj) + " values");
    }
    const TaskWeights& w = p.weights;
    if (w.waypoint < 0 || w.ee < 0 || w.pitch < 0 || w.joints < 0) {
      throw MissionError(path + ".weights", "weights must be non-negative");
    }
  }
  if (phases.back().kind != NodeKind::kTask) {
    throw MissionError("phases", "the last phase must be a task (it defines the terminal cost)");
  }
  NodesPerPhase(dt);
  if (offline.substeps < 1) throw MissionError("offline.substeps", "must be at least 1");
  if (mpc.substeps < 1) throw MissionError("mpc.substeps", "must be at least 1");
  if (mpc.nodes < 2) throw MissionError("mpc.nodes", "must be at least 2");
  if (!(mpc.dt > 0.0)) throw MissionError("mpc.dt", "must be positive");
  if (Duration() + 1e-9 < mpc.nodes * mpc.dt) {
    throw MissionError("phases", "mission is shorter than the MPC horizon");
  }
  if (mpc.state_weights.size() != 0 && mpc.state_weights.size() != StateTangentDim(nj)) {
    throw MissionError("mpc.state_weights", "expected " + std::to_string(StateTangentDim(nj)) + " values");
  }
  if (mpc.control_weights.size() != 0 && mpc.control_weights.size() != model.nu()) {
    throw MissionError("mpc.control_weights", "expected " + std::to_string(model.nu()) + " values");
  }
}

State MissionSpec::InitialState(const RobotModel& model) const {
  State s = State::Rest(model, initial_position);
  if (initial_joints.size() != 0) s.q = initial_joints;
  return s;
}

MissionSpec ParseMission(const json& doc) {
  if (!doc.is_object()) throw MissionError("$", "mission document must be a JSON object");
  MissionSpec m;
  m.name = doc.value("name", std::string("mission"));
  if (auto it = doc.find("model"); it != doc.end()) m.model_path = it->get<std::string>();
  m.dt = Number(doc, "$", "dt", m.dt);
  if (auto it = doc.find("initial"); it != doc.end()) {
    if (it->contains("position")) m.initial_position = Vector3(it->at("position"), "initial.position");
    if (it->contains("joints")) m.initial_joints = Vector(it->at("joints"), "initial.joints");
  }
  auto jphases = doc.find("phases");
  if (jphases == doc.end() || !jphases->is_array()) {
    throw MissionError("phases", "missing or not an array");
  }
  for (std::size_t i = 0; i < jphases->size(); ++i) {
    m.phases.push_back(ParsePhase((*jphases)[i], "phases[" + std::to_string(i) + "]"));
  }
  if (auto it = doc.find("offline"); it != doc.end()) {
    OfflineOptions& o = m.offline;
    o.thrust_weight = Number(*it, "offline", "thrust_weight", o.thrust_weight);
    o.torque_weight = Number(*it, "offline", "torque_weight", o.torque_weight);
    o.navigation_weight = Number(*it, "offline", "navigation_weight", o.navigation_weight);
    o.barrier_weight = Number(*it, "offline", "barrier_weight", o.barrier_weight);
    o.barrier_margin = Number(*it, "offline", "barrier_margin", o.barrier_margin);
    o.substeps = static_cast<int>(Number(*it, "offline", "substeps", o.substeps));
    ParseSolver(*it, "offline", o.solver);
  }
  if (auto it = doc.find("mpc"); it != doc.end()) {
    MpcConfig& c = m.mpc;
    c.nodes = static_cast<int>(Number(*it, "mpc", "nodes", c.nodes));
    c.dt = Number(*it, "mpc", "dt", c.dt);
    c.terminal_scale = Number(*it, "mpc", "terminal_scale", c.terminal_scale);
    c.substeps = static_cast<int>(Number(*it, "mpc", "substeps", c.substeps));
    if (it->contains("state_weights")) c.state_weights = Vector(it->at("state_weights"), "mpc.state_weights");
    if (it->contains("control_weights")) {
      c.control_weights = Vector(it->at("control_weights"), "mpc.control_weights");
    }
    ParseSolver(*it, "mpc", c.solver);
  }
  return m;
}

MissionSpec LoadMissionFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissionError("file", "cannot open '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw MissionError("file", path.string() + ": " + e.what());
  }
  MissionSpec m;
  try {
    m = ParseMission(doc);
  } catch (const json::exception& e) {
    throw MissionError("$", e.what());
  }
  if (!m.model_path.empty() && m.model_path.is_relative()) {
    m.model_path = path.parent_path() / m.model_path;
  }
  return m;
}

State WaypointState(const RobotModel& model, const Waypoint& wp) {
  State s = State::Rest(model, wp.position);
  s.base = Pose(Rotation::FromRpy(0.0, 0.0, wp.yaw), wp.position);
  if (wp.joints.size() != 0) s.q = wp.joints;
  return s;
}

ShootingProblem BuildOcp(const MissionSpec& mission, std::shared_ptr<const RobotModel> model,
                         double dt) {
  mission.Validate(*model);
  const RobotModel& m = *model;
  const int nj = m.n_joints();
  const OfflineOptions& o = mission.offline;
  const std::vector<int> nodes = mission.NodesPerPhase(dt);

  std::vector<ResidualTerm> common;
  Eigen::VectorXd wu(m.nu());
  wu << Eigen::VectorXd::Constant(m.n_props(), o.thrust_weight),
      Eigen::VectorXd::Constant(nj, o.torque_weight);
  common.push_back(ResidualTerm::ControlReg(wu, m.HoverControl()));
  if (nj > 0 && o.barrier_weight > 0.0) {
    Eigen::VectorXd lo(nj), hi(nj);
    for (int j = 0; j < nj; ++j) {
      lo[j] = m.joints[j].lower + o.barrier_margin;
      hi[j] = m.joints[j].upper - o.barrier_margin;
    }
    common.push_back(ResidualTerm::JointBarrier(lo, hi, o.barrier_weight));
  }

  // Weak regularization on every node: upright, at rest, limb straight;
  // position left free.
  Eigen::VectorXd wreg = o.navigation_weight * DefaultStateWeights(m);
  wreg.head<3>().setZero();
  if (o.navigation_weight > 0.0) {
    common.push_back(ResidualTerm::StateTracking(State::Rest(m), wreg));
  }
  NodeCost nav;
  nav.kind = NodeKind::kNavigation;
  nav.terms = common;

  ShootingProblem p;
  p.x0 = mission.InitialState(m).Pack();
  for (std::size_t i = 0; i < mission.phases.size(); ++i) {
    const Phase& ph = mission.phases[i];
    std::shared_ptr<const ActionModel> node;
    if (ph.kind == NodeKind::kNavigation) {
      node = std::make_shared<RobotActionModel>(model, nav, dt, o.substeps);
    } else {
      NodeCost task;
      task.kind = NodeKind::kTask;
      task.terms = common;
      for (ResidualTerm& t : TaskTerms(ph, m)) task.terms.push_back(std::move(t));
      node = std::make_shared<RobotActionModel>(model, task, dt, o.substeps);
    }
    for (int k = 0; k < nodes[i]; ++k) p.running.push_back(node);
  }
  if (p.running.empty()) throw MissionError("phases", "mission has no running nodes");

  NodeCost terminal;
  terminal.kind = NodeKind::kTask;
  terminal.terms = TaskTerms(mission.phases.back(), m);
  p.terminal = std::make_shared<RobotTerminalModel>(model, terminal);
  p.lower = m.ControlLowerBound();
  p.upper = m.ControlUpperBound();
  p.u_default = m.HoverControl();
  p.Validate();
  return p;
}

int Rail::NodeAt(double t) const {
  const double k = std::round(t / dt);
  if (!(k > 0.0)) return 0;
  const double last = static_cast<double>(xs.size()) - 1.0;
  return static_cast<int>(std::min(k, last));
}

State Rail::StateAt(int k) const { return State::Unpack(xs.at(static_cast<std::size_t>(k)), n_joints); }

void Rail::Validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("rail dt must be positive");
  if (xs.size() != us.size() + 1) throw std::invalid_argument("rail needs |xs| = |us| + 1");
}

std::vector<Eigen::VectorXd> InitialGuess(const MissionSpec& mission, const RobotModel& model,
                                          double dt) {
  // Keyframes: the initial position, then each waypoint over its task phase.
  std::vector<std::pair<double, Vec3>> keys{{0.0, mission.initial_position}};
  double t = 0.0;
  for (const Phase& p : mission.phases) {
    if (p.waypoint) {
      keys.emplace_back(t, p.waypoint->position);
      keys.emplace_back(t + p.duration, p.waypoint->position);
    }
    t += p.duration;
  }
  const std::vector<int> nodes = mission.NodesPerPhase(dt);
  int n = 0;
  for (int k : nodes) n += k;
  const State x0 = mission.InitialState(model);
  std::vector<Eigen::VectorXd> xs;
  for (int k = 0; k <= n; ++k) {
    const double tk = k * dt;
    Vec3 pos = keys.back().second;
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
      if (tk <= keys[i + 1].first) {
        const double span = keys[i + 1].first - keys[i].first;
        const double a = span > 0.0 ? (tk - keys[i].first) / span : 1.0;
        pos = (1.0 - a) * keys[i].second + a * keys[i + 1].second;
        break;
      }
    }
    State s = x0;
    s.base = Pose(Rotation(), pos);
    xs.push_back(s.Pack());
  }
  xs.front() = x0.Pack();
  return xs;
}

Rail SolveOffline(const MissionSpec& mission, std::shared_ptr<const RobotModel> model) {
  const ShootingProblem p = BuildOcp(mission, model, mission.dt);
  FddpSolver solver(p, mission.offline.solver);
  const std::vector<Eigen::VectorXd> us(p.T(), model->HoverControl());
  SolverResult r = solver.Solve(InitialGuess(mission, *model, mission.dt), us);
  Rail rail;
  rail.dt = mission.dt;
  rail.n_joints = model->n_joints();
  rail.xs = std::move(r.xs);
  rail.us = std::move(r.us);
  rail.converged = r.converged;
  rail.iterations = r.iterations;
  rail.cost_trace = std::move(r.cost_trace);
  return rail;
}

std::string RailCsv(const Rail& rail) {
  const std::size_t nx = rail.xs.front().size();
  const std::size_t nu = rail.us.empty() ? 0 : rail.us.front().size();
  std::string out = "t";
  for (std::size_t i = 0; i < nx; ++i) out += ",x" + std::to_string(i);
  for (std::size_t i = 0; i < nu; ++i) out += ",u" + std::to_string(i);
  out += '\n';
  char buf[32];
  for (std::size_t k = 0; k < rail.xs.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.6f", static_cast<double>(k) * rail.dt);
    out += buf;
    for (std::size_t i = 0; i < nx; ++i) {
      std::snprintf(buf, sizeof(buf), ",%.10g", rail.xs[k][static_cast<Eigen::Index>(i)]);
      out += buf;
    }
    for (std::size_t i = 0; i < nu; ++i) {
      if (k < rail.us.size()) {
        std::snprintf(buf, sizeof(buf), ",%.10g", rail.us[k][static_cast<Eigen::Index>(i)]);
        out += buf;
      } else {
        out += ',';
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace borinot
