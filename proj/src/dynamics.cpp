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

#include "borinot/dynamics.hpp"

#include <stdexcept>

#include <Eigen/Cholesky>

namespace borinot {
namespace {

// Spatial cross products for (linear, angular) ordering.
Mat6 MotionCross(const Vec6& v) {
  Mat6 m = Mat6::Zero();
  const Mat3 wx = skew(v.tail<3>());
  m.topLeftCorner<3, 3>() = wx;
  m.topRightCorner<3, 3>() = skew(v.head<3>());
  m.bottomRightCorner<3, 3>() = wx;
  return m;
}

Vec6 ForceCross(const Vec6& v, const Vec6& f) {
  // crf(v) = -crm(v)^T
  const Vec3 w = v.tail<3>();
  const Vec3 lin = v.head<3>();
  Vec6 out;
  out.head<3>() = w.cross(f.head<3>());
  out.tail<3>() = w.cross(f.tail<3>()) + lin.cross(f.head<3>());
  return out;
}

// Motion transform from parent coordinates to child coordinates, given the
// child frame pose in the parent frame.
Mat6 MotionTransform(const Pose& child_in_parent) {
  const Mat3 rt = child_in_parent.rotation().Matrix().transpose();
  Mat6 x = Mat6::Zero();
  x.topLeftCorner<3, 3>() = rt;
  x.topRightCorner<3, 3>() = -rt * skew(child_in_parent.translation());
  x.bottomRightCorner<3, 3>() = rt;
  return x;
}

Vec6 JointSubspace(const Joint& j) {
  Vec6 s = Vec6::Zero();
  s.tail<3>() = j.axis;
  return s;
}

Pose JointPlacement(const Joint& j, double q) {
  return j.origin * Pose(Rotation::Exp(j.axis * q), Vec3::Zero());
}

// Per-link quantities shared by every recursion.
struct Kinematics {
  std::vector<Mat6> xup;     // parent -> link, xup[0] unused
  std::vector<Pose> world;   // link frame in world
  std::vector<Vec6> v;       // link spatial velocity, link frame
  std::vector<Vec6> c;       // velocity-product acceleration
};

Kinematics ForwardPass(const RobotModel& model, const State& x) {
  const size_t n = model.links.size();
  Kinematics k;
  k.xup.resize(n);
  k.world.resize(n);
  k.v.resize(n);
  k.c.assign(n, Vec6::Zero());
  k.world[0] = x.base;
  k.v[0] = x.twist.Vector();
  for (size_t i = 1; i < n; ++i) {
    const Joint& j = model.joints[i - 1];
    const Pose placement = JointPlacement(j, x.q[i - 1]);
    k.xup[i] = MotionTransform(placement);
    k.world[i] = k.world[j.parent] * placement;
    const Vec6 vj = JointSubspace(j) * x.qd[i - 1];
    k.v[i] = k.xup[i] * k.v[j.parent] + vj;
    k.c[i] = MotionCross(k.v[i]) * vj;
  }
  return k;
}

// Gravity plus user forces on every link, link frame.
std::vector<Vec6> ExternalForces(const RobotModel& model, const Kinematics& k,
                                 const LinkForces& fext) {
  const size_t n = model.links.size();
  if (!fext.empty() && fext.size() != n) {
    throw std::invalid_argument("external forces must cover every link");
  }
  const Vec3 g_world(0.0, 0.0, -model.gravity);
  std::vector<Vec6> f(n);
  for (size_t i = 0; i < n; ++i) {
    const Link& link = model.links[i];
    const Vec3 force = link.mass * (k.world[i].rotation().Inverse() * g_world);
    f[i].head<3>() = force;
    f[i].tail<3>() = link.com.cross(force);
    if (!fext.empty()) f[i] += fext[i];
  }
  return f;
}

Vec6 ThrustWrench(const RobotModel& model, const Eigen::VectorXd& u) {
  Vec6 w = Vec6::Zero();
  for (int p = 0; p < model.n_props(); ++p) {
    const Propeller& prop = model.propellers[p];
    const Vec3 f(0.0, 0.0, u[p]);
    w.head<3>() += f;
    w.tail<3>() += prop.position.cross(f);
    w[5] += prop.spin * prop.torque_ratio * u[p];
  }
  return w;
}

void CheckDims(const RobotModel& model, const State& x) {
  if (x.q.size() != model.n_joints() || x.qd.size() != model.n_joints()) {
    throw std::invalid_argument("state joint dimension does not match the model");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// State

State State::Rest(const RobotModel& model, const Vec3& position) {
  State s;
  s.base = Pose(Rotation(), position);
  s.q = Eigen::VectorXd::Zero(model.n_joints());
  s.qd = Eigen::VectorXd::Zero(model.n_joints());
  return s;
}

Eigen::VectorXd State::Pack() const {
  const int nj = static_cast<int>(q.size());
  Eigen::VectorXd x(StatePackedDim(nj));
  const Eigen::Quaterniond& quat = base.rotation().Quaternion();
  x.head<3>() = base.translation();
  x.segment<4>(3) << quat.w(), quat.x(), quat.y(), quat.z();
  x.segment(7, nj) = q;
  x.segment<6>(7 + nj) = twist.Vector();
  x.tail(nj) = qd;
  return x;
}

State State::Unpack(const Eigen::VectorXd& x, int n_joints) {
  if (x.size() != StatePackedDim(n_joints)) {
    throw std::invalid_argument("packed state has the wrong size");
  }
  State s;
  s.base = Pose(Rotation::FromQuaternion(x[3], x[4], x[5], x[6]), x.head<3>());
  s.q = x.segment(7, n_joints);
  s.twist = Tangent6::FromVector(x.segment<6>(7 + n_joints));
  s.qd = x.tail(n_joints);
  return s;
}

State StatePlus(const State& x, const Eigen::VectorXd& dx) {
  const int nj = static_cast<int>(x.q.size());
  State out;
  out.base = BoxPlus(x.base, Tangent6::FromVector(dx.head<6>()));
  out.q = x.q + dx.segment(6, nj);
  out.twist = x.twist + Tangent6::FromVector(dx.segment<6>(6 + nj));
  out.qd = x.qd + dx.tail(nj);
  return out;
}

Eigen::VectorXd StateMinus(const State& a, const State& b) {
  const int nj = static_cast<int>(a.q.size());
  Eigen::VectorXd d(StateTangentDim(nj));
  d.head<6>() = BoxMinus(a.base, b.base).Vector();
  d.segment(6, nj) = a.q - b.q;
  d.segment<6>(6 + nj) = (a.twist - b.twist).Vector();
  d.tail(nj) = a.qd - b.qd;
  return d;
}

Control Control::FromVector(const Eigen::VectorXd& u, int n_props) {
  return {u.head(n_props), u.tail(u.size() - n_props)};
}

Eigen::VectorXd Control::Vector() const {
  Eigen::VectorXd u(thrusts.size() + torques.size());
  u << thrusts, torques;
  return u;
}

Eigen::VectorXd Acceleration::Vector() const {
  Eigen::VectorXd a(6 + joints.size());
  a << base.linear, base.angular, joints;
  return a;
}

// ---------------------------------------------------------------------------
// Kinematic quantities

Mat6 SpatialInertia(const Link& link) {
  const Mat3 cx = skew(link.com);
  Mat6 inertia;
  inertia.topLeftCorner<3, 3>() = link.mass * Mat3::Identity();
  inertia.topRightCorner<3, 3>() = -link.mass * cx;
  inertia.bottomLeftCorner<3, 3>() = link.mass * cx;
  inertia.bottomRightCorner<3, 3>() = link.inertia - link.mass * cx * cx;
  return inertia;
}

std::vector<Pose> LinkPoses(const RobotModel& model, const State& x) {
  CheckDims(model, x);
  std::vector<Pose> world(model.links.size());
  world[0] = x.base;
  for (size_t i = 1; i < world.size(); ++i) {
    const Joint& j = model.joints[i - 1];
    world[i] = world[j.parent] * JointPlacement(j, x.q[i - 1]);
  }
  return world;
}

Vec3 CenterOfMass(const RobotModel& model, const State& x) {
  const std::vector<Pose> world = LinkPoses(model, x);
  Vec3 acc = Vec3::Zero();
  for (size_t i = 0; i < world.size(); ++i) {
    acc += model.links[i].mass * world[i].Act(model.links[i].com);
  }
  return acc / model.TotalMass();
}

Vec3 CenterOfMassVelocity(const RobotModel& model, const State& x) {
  CheckDims(model, x);
  const Kinematics k = ForwardPass(model, x);
  Vec3 acc = Vec3::Zero();
  for (size_t i = 0; i < k.v.size(); ++i) {
    const Link& link = model.links[i];
    const Vec3 local = k.v[i].head<3>() + k.v[i].tail<3>().cross(link.com);
    acc += link.mass * (k.world[i].rotation() * local);
  }
  return acc / model.TotalMass();
}

Vec3 EndEffectorPosition(const RobotModel& model, const State& x) {
  const std::vector<Pose> world = LinkPoses(model, x);
  return world[model.end_effector.link].Act(model.end_effector.offset);
}

Vec3 EndEffectorVelocity(const RobotModel& model, const State& x) {
  CheckDims(model, x);
  const Kinematics k = ForwardPass(model, x);
  const int l = model.end_effector.link;
  const Vec3 local = k.v[l].head<3>() + k.v[l].tail<3>().cross(model.end_effector.offset);
  return k.world[l].rotation() * local;
}

Vec6 WorldMomentum(const RobotModel& model, const State& x) {
  CheckDims(model, x);
  const Kinematics k = ForwardPass(model, x);
  Vec6 total = Vec6::Zero();
  for (size_t i = 0; i < k.v.size(); ++i) {
    const Vec6 h = SpatialInertia(model.links[i]) * k.v[i];
    const Rotation& r = k.world[i].rotation();
    const Vec3 f = r * Vec3(h.head<3>());
    total.head<3>() += f;
    total.tail<3>() += r * Vec3(h.tail<3>()) + k.world[i].translation().cross(f);
  }
  return total;
}

double KineticEnergy(const RobotModel& model, const State& x) {
  CheckDims(model, x);
  const Kinematics k = ForwardPass(model, x);
  double e = 0.0;
  for (size_t i = 0; i < k.v.size(); ++i) {
    e += 0.5 * k.v[i].dot(SpatialInertia(model.links[i]) * k.v[i]);
  }
  return e;
}

double PotentialEnergy(const RobotModel& model, const State& x) {
  const std::vector<Pose> world = LinkPoses(model, x);
  double e = 0.0;
  for (size_t i = 0; i < world.size(); ++i) {
    e += model.links[i].mass * model.gravity * world[i].Act(model.links[i].com).z();
  }
  return e;
}

// ---------------------------------------------------------------------------
// Dynamics

Eigen::VectorXd GeneralizedActuation(const RobotModel& model, const Eigen::VectorXd& u) {
  if (u.size() != model.nu()) {
    throw std::invalid_argument("control dimension does not match the model");
  }
  Eigen::VectorXd tau(model.nv());
  tau.head<6>() = ThrustWrench(model, u);
  tau.tail(model.n_joints()) = u.tail(model.n_joints());
  return tau;
}

Acceleration ForwardDynamics(const RobotModel& model, const State& x,
                             const Eigen::VectorXd& u, const LinkForces& fext) {
  CheckDims(model, x);
  if (u.size() != model.nu()) {
    throw std::invalid_argument("control dimension does not match the model");
  }
  const size_t n = model.links.size();
  const Kinematics k = ForwardPass(model, x);
  std::vector<Vec6> f = ExternalForces(model, k, fext);
  f[0] += ThrustWrench(model, u);

  std::vector<Mat6> ia(n);
  std::vector<Vec6> pa(n);
  for (size_t i = 0; i < n; ++i) {
    ia[i] = SpatialInertia(model.links[i]);
    pa[i] = ForceCross(k.v[i], ia[i] * k.v[i]) - f[i];
  }

  std::vector<Vec6> uu(n);
  std::vector<double> d(n), uj(n);
  for (size_t i = n - 1; i >= 1; --i) {
    const Joint& j = model.joints[i - 1];
    const Vec6 s = JointSubspace(j);
    uu[i] = ia[i] * s;
    d[i] = s.dot(uu[i]);
    uj[i] = u[model.n_props() + i - 1] - s.dot(pa[i]);
    const Mat6 ia_art = ia[i] - uu[i] * uu[i].transpose() / d[i];
    const Vec6 pa_art = pa[i] + ia_art * k.c[i] + uu[i] * (uj[i] / d[i]);
    ia[j.parent] += k.xup[i].transpose() * ia_art * k.xup[i];
    pa[j.parent] += k.xup[i].transpose() * pa_art;
  }

  std::vector<Vec6> a(n);
  a[0] = -ia[0].ldlt().solve(pa[0]);
  Acceleration out;
  out.base = Tangent6::FromVector(a[0]);
  out.joints.resize(model.n_joints());
  for (size_t i = 1; i < n; ++i) {
    const Joint& j = model.joints[i - 1];
    a[i] = k.xup[i] * a[j.parent] + k.c[i];
    const double qdd = (uj[i] - uu[i].dot(a[i])) / d[i];
    a[i] += JointSubspace(j) * qdd;
    out.joints[i - 1] = qdd;
  }
  return out;
}

Eigen::MatrixXd MassMatrix(const RobotModel& model, const State& x) {
  CheckDims(model, x);
  const size_t n = model.links.size();
  const Kinematics k = ForwardPass(model, x);
  std::vector<Mat6> ic(n);
  for (size_t i = 0; i < n; ++i) ic[i] = SpatialInertia(model.links[i]);
  for (size_t i = n - 1; i >= 1; --i) {
    const int p = model.joints[i - 1].parent;
    ic[p] += k.xup[i].transpose() * ic[i] * k.xup[i];
  }

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(model.nv(), model.nv());
  m.topLeftCorner<6, 6>() = ic[0];
  for (size_t i = 1; i < n; ++i) {
    const int col = 6 + static_cast<int>(i) - 1;
    Vec6 f = ic[i] * JointSubspace(model.joints[i - 1]);
    m(col, col) = JointSubspace(model.joints[i - 1]).dot(f);
    size_t j = i;
    while (j != 0) {
      f = k.xup[j].transpose() * f;
      j = model.joints[j - 1].parent;
      if (j == 0) {
        m.block<6, 1>(0, col) = f;
        m.block<1, 6>(col, 0) = f.transpose();
      } else {
        const int row = 6 + static_cast<int>(j) - 1;
        m(row, col) = JointSubspace(model.joints[j - 1]).dot(f);
        m(col, row) = m(row, col);
      }
    }
  }
  return m;
}

Eigen::VectorXd BiasForces(const RobotModel& model, const State& x, const LinkForces& fext) {
  CheckDims(model, x);
  const size_t n = model.links.size();
  const Kinematics k = ForwardPass(model, x);
  const std::vector<Vec6> fx = ExternalForces(model, k, fext);

  std::vector<Vec6> a(n), f(n);
  a[0] = Vec6::Zero();
  for (size_t i = 0; i < n; ++i) {
    if (i > 0) a[i] = k.xup[i] * a[model.joints[i - 1].parent] + k.c[i];
    const Mat6 inertia = SpatialInertia(model.links[i]);
    f[i] = inertia * a[i] + ForceCross(k.v[i], inertia * k.v[i]) - fx[i];
  }

  Eigen::VectorXd h(model.nv());
  for (size_t i = n - 1; i >= 1; --i) {
    const Joint& j = model.joints[i - 1];
    h[6 + i - 1] = JointSubspace(j).dot(f[i]);
    f[j.parent] += k.xup[i].transpose() * f[i];
  }
  h.head<6>() = f[0];
  return h;
}

// ---------------------------------------------------------------------------
// Integration

State AdvanceState(const State& x, const Acceleration& a, double h) {
  State out;
  out.twist = x.twist + h * a.base;
  out.qd = x.qd + h * a.joints;
  out.base = BoxPlus(x.base, (0.5 * h) * (x.twist + out.twist));
  out.q = x.q + (0.5 * h) * (x.qd + out.qd);
  return out;
}

State Integrate(const RobotModel& model, const State& x, const Eigen::VectorXd& u,
                double dt, int substeps) {
  if (substeps < 1) throw std::invalid_argument("substeps must be positive");
  const double h = dt / substeps;
  State s = x;
  for (int i = 0; i < substeps; ++i) {
    s = AdvanceState(s, ForwardDynamics(model, s, u), h);
  }
  return s;
}

namespace {

// Time derivative in local coordinates around x: the pose block follows
// psi' = Jr(psi)^-1 v.
Eigen::VectorXd LocalRate(const RobotModel& model, const State& x, const Eigen::VectorXd& psi,
                          const Eigen::VectorXd& u, const LinkForces& fext) {
  const int nj = model.n_joints();
  const State s = StatePlus(x, psi);
  const Acceleration a = ForwardDynamics(model, s, u, fext);
  Eigen::VectorXd d(StateTangentDim(nj));
  d.head<6>() = Se3RightJacobianInverse(Tangent6::FromVector(psi.head<6>())) * s.twist.Vector();
  d.segment(6, nj) = s.qd;
  d.segment<6>(6 + nj) = a.base.Vector();
  d.tail(nj) = a.joints;
  return d;
}

}  // namespace

State IntegrateRk4(const RobotModel& model, const State& x, const Eigen::VectorXd& u,
                   double dt, int substeps, const LinkForces& fext) {
  if (substeps < 1) throw std::invalid_argument("substeps must be positive");
  const double h = dt / substeps;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(StateTangentDim(model.n_joints()));
  State s = x;
  for (int i = 0; i < substeps; ++i) {
    const Eigen::VectorXd k1 = LocalRate(model, s, zero, u, fext);
    const Eigen::VectorXd k2 = LocalRate(model, s, 0.5 * h * k1, u, fext);
    const Eigen::VectorXd k3 = LocalRate(model, s, 0.5 * h * k2, u, fext);
    const Eigen::VectorXd k4 = LocalRate(model, s, h * k3, u, fext);
    s = StatePlus(s, (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  }
  return s;
}

std::vector<State> Rollout(const RobotModel& model, const State& x0,
                           std::span<const Eigen::VectorXd> controls, double dt,
                           int substeps) {
  std::vector<State> xs;
  xs.reserve(controls.size() + 1);
  xs.push_back(x0);
  for (const Eigen::VectorXd& u : controls) {
    xs.push_back(Integrate(model, xs.back(), u, dt, substeps));
  }
  return xs;
}

}  // namespace borinot
