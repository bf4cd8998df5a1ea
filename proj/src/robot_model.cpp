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

#include "borinot/robot_model.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <nlohmann/json.hpp>

namespace borinot {
namespace {

using nlohmann::json;

std::string At(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

const json& Require(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) throw ModelError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ModelError(path + "." + key, "missing required field");
  return *it;
}

double Number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ModelError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ModelError(path, "must be finite");
  return x;
}

Vec3 Vector3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) throw ModelError(path, "expected an array of 3 numbers");
  return {Number(v[0], At(path, 0)), Number(v[1], At(path, 1)), Number(v[2], At(path, 2))};
}

// Accepts a 3x3 nested array or a 3-element diagonal.
Mat3 Inertia(const json& v, const std::string& path) {
  if (v.is_array() && v.size() == 3 && v[0].is_number()) {
    return Vector3(v, path).asDiagonal();
  }
  if (!v.is_array() || v.size() != 3) throw ModelError(path, "expected a 3x3 matrix or a diagonal");
  Mat3 m;
  for (std::size_t r = 0; r < 3; ++r) m.row(static_cast<Eigen::Index>(r)) = Vector3(v[r], At(path, r)).transpose();
  return m;
}

Pose Origin(const json& obj, const std::string& path) {
  Vec3 xyz = Vec3::Zero();
  Vec3 rpy = Vec3::Zero();
  if (auto it = obj.find("xyz"); it != obj.end()) xyz = Vector3(*it, path + ".xyz");
  if (auto it = obj.find("rpy"); it != obj.end()) rpy = Vector3(*it, path + ".rpy");
  return {Rotation::FromRpy(rpy.x(), rpy.y(), rpy.z()), xyz};
}

void CheckInertia(const Mat3& inertia, const std::string& path) {
  if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ModelError(path, "inertia matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw ModelError(path, "inertia matrix is not positive definite");
  }
}

}  // namespace

double RobotModel::TotalMass() const {
  double m = 0.0;
  for (const auto& l : links) m += l.mass;
  return m;
}

double RobotModel::TotalMaxThrust() const {
  double t = 0.0;
  for (const auto& p : propellers) t += p.max_thrust;
  return t;
}

Eigen::VectorXd RobotModel::ControlLowerBound() const {
  Eigen::VectorXd lb(nu());
  for (int i = 0; i < n_props(); ++i) lb[i] = min_thrust;
  for (int j = 0; j < n_joints(); ++j) lb[n_props() + j] = -joints[j].torque_limit;
  return lb;
}

Eigen::VectorXd RobotModel::ControlUpperBound() const {
  Eigen::VectorXd ub(nu());
  for (int i = 0; i < n_props(); ++i) ub[i] = propellers[i].max_thrust;
  for (int j = 0; j < n_joints(); ++j) ub[n_props() + j] = joints[j].torque_limit;
  return ub;
}

Eigen::VectorXd RobotModel::HoverControl() const {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(nu());
  u.head(n_props()).setConstant(TotalMass() * gravity / n_props());
  return u;
}

void RobotModel::Validate() const {
  if (links.empty()) throw ModelError("links", "at least the base link is required");
  if (!(gravity > 0.0)) throw ModelError("gravity", "must be positive");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string path = At("links", i);
    if (!(links[i].mass > 0.0)) throw ModelError(path + ".mass", "mass must be positive");
    CheckInertia(links[i].inertia, path + ".inertia");
  }
  for (std::size_t j = 0; j < joints.size(); ++j) {
    const std::string path = At("joints", j);
    const Joint& jt = joints[j];
    if (jt.child != static_cast<int>(j) + 1 || jt.parent < 0 || jt.parent >= jt.child) {
      throw ModelError(path, "joints are not in topological order");
    }
    if (std::abs(jt.axis.norm() - 1.0) > 1e-9) throw ModelError(path + ".axis", "axis must be a unit vector");
    if (!(jt.lower < jt.upper)) throw ModelError(path + ".limits", "lower limit must be below upper limit");
    if (!(jt.torque_limit > 0.0)) throw ModelError(path + ".limits.torque", "torque limit must be positive");
  }
  if (links.size() != joints.size() + 1) throw ModelError("joints", "every non-base link needs exactly one joint");
  if (propellers.empty()) throw ModelError("propellers", "at least one propeller is required");
  for (std::size_t i = 0; i < propellers.size(); ++i) {
    const std::string path = At("propellers", i);
    if (std::abs(propellers[i].spin) != 1) throw ModelError(path + ".spin", "spin must be +1 or -1");
    if (!(propellers[i].max_thrust > min_thrust)) {
      throw ModelError(path + ".max_thrust", "must exceed the minimum thrust");
    }
  }
  if (end_effector.link < 0 || end_effector.link >= static_cast<int>(links.size())) {
    throw ModelError("end_effector.link", "unknown link");
  }
}

RobotModel LoadModel(const json& doc) {
  if (!doc.is_object()) throw ModelError("$", "model document must be a JSON object");
  RobotModel model;
  model.name = doc.value("name", std::string("unnamed"));
  if (auto it = doc.find("gravity"); it != doc.end()) model.gravity = Number(*it, "gravity");

  // Links, in file order for now; links[0] is the floating base.
  const json& jlinks = Require(doc, "$", "links");
  if (!jlinks.is_array() || jlinks.empty()) throw ModelError("links", "expected a non-empty array");
  std::vector<Link> file_links;
  std::map<std::string, int> link_index;
  for (std::size_t i = 0; i < jlinks.size(); ++i) {
    const std::string path = At("links", i);
    const json& jl = jlinks[i];
    Link l;
    const json& name = Require(jl, path, "name");
    if (!name.is_string()) throw ModelError(path + ".name", "expected a string");
    l.name = name.get<std::string>();
    l.mass = Number(Require(jl, path, "mass"), path + ".mass");
    if (!(l.mass > 0.0)) throw ModelError(path + ".mass", "mass must be positive");
    if (auto it = jl.find("com"); it != jl.end()) l.com = Vector3(*it, path + ".com");
    l.inertia = Inertia(Require(jl, path, "inertia"), path + ".inertia");
    CheckInertia(l.inertia, path + ".inertia");
    if (!link_index.emplace(l.name, static_cast<int>(i)).second) {
      throw ModelError(path + ".name", "duplicate link name '" + l.name + "'");
    }
    file_links.push_back(std::move(l));
  }

  // Joints: resolve names, check tree structure.
  struct RawJoint {
    Joint joint;
    int parent_file = 0;
    int child_file = 0;
  };
  std::vector<RawJoint> raw;
  std::vector<int> parent_of(file_links.size(), -1);
  std::vector<int> joint_of(file_links.size(), -1);
  const json jjoints = doc.contains("joints") ? doc.at("joints") : json::array();
  if (!jjoints.is_array()) throw ModelError("joints", "expected an array");
  for (std::size_t j = 0; j < jjoints.size(); ++j) {
    const std::string path = At("joints", j);
    const json& jj = jjoints[j];
    RawJoint rj;
    rj.joint.name = jj.value("name", "joint" + std::to_string(j));
    const json& type = jj.contains("type") ? jj.at("type") : json("revolute");
    if (type != "revolute") throw ModelError(path + ".type", "only revolute joints are supported");
    const auto parent = Require(jj, path, "parent").get<std::string>();
    const auto child = Require(jj, path, "child").get<std::string>();
    auto pit = link_index.find(parent);
    if (pit == link_index.end()) throw ModelError(path + ".parent", "unknown link '" + parent + "'");
    auto cit = link_index.find(child);
    if (cit == link_index.end()) throw ModelError(path + ".child", "unknown link '" + child + "'");
    rj.parent_file = pit->second;
    rj.child_file = cit->second;
    if (rj.child_file == 0) throw ModelError(path + ".child", "the base link cannot be a joint child");
    if (rj.child_file == rj.parent_file) throw ModelError(path, "joint connects a link to itself");
    if (parent_of[rj.child_file] != -1) {
      throw ModelError(path + ".child", "link '" + child + "' has more than one parent joint");
    }
    parent_of[rj.child_file] = rj.parent_file;
    joint_of[rj.child_file] = static_cast<int>(j);
    Vec3 axis = Vector3(Require(jj, path, "axis"), path + ".axis");
    if (axis.norm() < 1e-12) throw ModelError(path + ".axis", "axis must be non-zero");
    rj.joint.axis = axis.normalized();
    if (auto it = jj.find("origin"); it != jj.end()) rj.joint.origin = Origin(*it, path + ".origin");
    const json& lim = Require(jj, path, "limits");
    rj.joint.lower = Number(Require(lim, path + ".limits", "lower"), path + ".limits.lower");
    rj.joint.upper = Number(Require(lim, path + ".limits", "upper"), path + ".limits.upper");
    rj.joint.torque_limit = Number(Require(lim, path + ".limits", "torque"), path + ".limits.torque");
    raw.push_back(std::move(rj));
  }

  // Every non-base link must reach the base without revisiting a link.
  for (std::size_t i = 1; i < file_links.size(); ++i) {
    std::vector<bool> seen(file_links.size(), false);
    int cur = static_cast<int>(i);
    while (cur != 0) {
      if (seen[cur]) {
        throw ModelError("joints", "kinematic loop through link '" + file_links[i].name + "'");
      }
      seen[cur] = true;
      if (parent_of[cur] == -1) {
        throw ModelError(At("links", static_cast<std::size_t>(cur)),
                         "link '" + file_links[cur].name + "' is not connected to the base");
      }
      cur = parent_of[cur];
    }
  }

  // Breadth-first renumbering: parents precede children, joint i moves link i+1.
  std::vector<int> new_index(file_links.size(), -1);
  std::vector<int> order{0};
  new_index[0] = 0;
  std::queue<int> frontier;
  frontier.push(0);
  while (!frontier.empty()) {
    const int p = frontier.front();
    frontier.pop();
    for (const auto& rj : raw) {
      if (rj.parent_file == p && new_index[rj.child_file] == -1) {
        new_index[rj.child_file] = static_cast<int>(order.size());
        order.push_back(rj.child_file);
        frontier.push(rj.child_file);
      }
    }
  }
  for (int file_i : order) model.links.push_back(file_links[file_i]);
  for (std::size_t k = 1; k < order.size(); ++k) {
    RawJoint rj = raw[joint_of[order[k]]];
    rj.joint.parent = new_index[rj.parent_file];
    rj.joint.child = static_cast<int>(k);
    model.joints.push_back(rj.joint);
  }

  // Propellers and global limits.
  double default_max = 0.0;
  if (auto it = doc.find("limits"); it != doc.end()) {
    if (auto t = it->find("min_thrust"); t != it->end()) model.min_thrust = Number(*t, "limits.min_thrust");
    if (auto t = it->find("max_thrust"); t != it->end()) default_max = Number(*t, "limits.max_thrust");
  }
  const json& jprops = Require(doc, "$", "propellers");
  if (!jprops.is_array() || jprops.empty()) throw ModelError("propellers", "expected a non-empty array");
  for (std::size_t i = 0; i < jprops.size(); ++i) {
    const std::string path = At("propellers", i);
    const json& jp = jprops[i];
    Propeller p;
    p.position = Vector3(Require(jp, path, "position"), path + ".position");
    const double spin = Number(Require(jp, path, "spin"), path + ".spin");
    if (spin != 1.0 && spin != -1.0) throw ModelError(path + ".spin", "spin must be +1 or -1");
    p.spin = static_cast<int>(spin);
    p.max_thrust = default_max;
    if (auto it = jp.find("max_thrust"); it != jp.end()) p.max_thrust = Number(*it, path + ".max_thrust");
    if (!(p.max_thrust > 0.0)) throw ModelError(path + ".max_thrust", "must be positive (or set limits.max_thrust)");
    if (auto it = jp.find("torque_ratio"); it != jp.end()) p.torque_ratio = Number(*it, path + ".torque_ratio");
    model.propellers.push_back(p);
  }

  if (auto it = doc.find("end_effector"); it != doc.end()) {
    const auto lname = Require(*it, "end_effector", "link").get<std::string>();
    auto lit = link_index.find(lname);
    if (lit == link_index.end()) throw ModelError("end_effector.link", "unknown link '" + lname + "'");
    model.end_effector.link = new_index[lit->second];
    if (auto o = it->find("offset"); o != it->end()) model.end_effector.offset = Vector3(*o, "end_effector.offset");
  } else {
    model.end_effector.link = static_cast<int>(model.links.size()) - 1;
  }

  model.Validate();
  return model;
}

RobotModel LoadModelFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("file", "cannot open '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ModelError("file", path.string() + ": " + e.what());
  }
  try {
    return LoadModel(doc);
  } catch (const json::exception& e) {
    throw ModelError("$", e.what());
  }
}

AllocationMap ComputeAllocationMap(const RobotModel& model) {
  const int n = model.n_props();
  AllocationMap a;
  a.matrix.setZero(6, n);
  for (int i = 0; i < n; ++i) {
    const Propeller& p = model.propellers[i];
    const Vec3 f = Vec3::UnitZ();
    a.matrix.block<3, 1>(0, i) = f;
    a.matrix.block<3, 1>(3, i) = p.position.cross(f) + p.spin * p.torque_ratio * f;
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a.matrix);
  a.pseudo_inverse = cod.pseudoInverse();
  return a;
}

double ThrustToWeight(const RobotModel& model) {
  return model.TotalMaxThrust() / (model.TotalMass() * model.gravity);
}

double HoverThrottle(const RobotModel& model) { return 1.0 / ThrustToWeight(model); }

}  // namespace borinot
