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

#include "borinot/costs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace borinot {

ResidualTerm ResidualTerm::StateTracking(const State& x_ref, const Eigen::VectorXd& weights) {
  ResidualTerm t;
  t.kind = ResidualKind::kStateTracking;
  t.x_ref = x_ref;
  t.weights = weights;
  return t;
}

ResidualTerm ResidualTerm::ControlReg(const Eigen::VectorXd& weights,
                                      const Eigen::VectorXd& u_ref) {
  ResidualTerm t;
  t.kind = ResidualKind::kControlReg;
  t.weights = weights;
  t.u_ref = u_ref;
  return t;
}

ResidualTerm ResidualTerm::EePosition(const Vec3& target, double weight) {
  ResidualTerm t;
  t.kind = ResidualKind::kEePosition;
  t.target = target;
  t.weights = Eigen::VectorXd::Constant(1, weight);
  return t;
}

ResidualTerm ResidualTerm::BasePitch(double pitch, double weight) {
  ResidualTerm t;
  t.kind = ResidualKind::kBasePitch;
  t.pitch = pitch;
  t.weights = Eigen::VectorXd::Constant(1, weight);
  return t;
}

ResidualTerm ResidualTerm::JointBarrier(const Eigen::VectorXd& lower,
                                        const Eigen::VectorXd& upper, double weight) {
  ResidualTerm t;
  t.kind = ResidualKind::kJointBarrier;
  t.lower = lower;
  t.upper = upper;
  t.weights = Eigen::VectorXd::Constant(1, weight);
  return t;
}

int ResidualTerm::Dim(const RobotModel& model) const {
  switch (kind) {
    case ResidualKind::kStateTracking: return StateTangentDim(model.n_joints());
    case ResidualKind::kControlReg: return model.nu();
    case ResidualKind::kEePosition: return 3;
    case ResidualKind::kBasePitch: return 1;
    case ResidualKind::kJointBarrier: return model.n_joints();
  }
  return 0;
}

ResidualTerm ResidualTerm::Scaled(double s) const {
  ResidualTerm t = *this;
  t.weights *= s;
  return t;
}

void NodeCost::Validate(const RobotModel& model) const {
  bool has_task = false;
  for (const ResidualTerm& t : terms) {
    if ((t.weights.array() < 0.0).any()) throw std::invalid_argument("negative cost weight");
    const bool diag = t.kind == ResidualKind::kStateTracking || t.kind == ResidualKind::kControlReg;
    if (t.weights.size() != (diag ? t.Dim(model) : 1)) {
      throw std::invalid_argument("cost weight size does not match the residual");
    }
    if (t.kind == ResidualKind::kControlReg && t.u_ref.size() != 0 && t.u_ref.size() != model.nu()) {
      throw std::invalid_argument("control reference size does not match the model");
    }
    if (t.kind == ResidualKind::kJointBarrier &&
        (t.lower.size() != model.n_joints() || t.upper.size() != model.n_joints())) {
      throw std::invalid_argument("barrier limits size does not match the model");
    }
    if (t.kind != ResidualKind::kControlReg) has_task = true;
  }
  if (kind == NodeKind::kTask && !has_task) {
    throw std::invalid_argument("task node without a task residual");
  }
}

bool NodeCost::UsesControl() const {
  return std::any_of(terms.begin(), terms.end(), [](const ResidualTerm& t) { return t.UsesControl(); });
}

NodeCost NodeCost::Scaled(double s) const {
  NodeCost c = *this;
  for (ResidualTerm& t : c.terms) t = t.Scaled(s);
  return c;
}

ResidualData EvalResidual(const RobotModel& model, const ResidualTerm& term, const State& x,
                          const Eigen::VectorXd& u, bool with_jacobians) {
  const int nj = model.n_joints();
  const int ndx = StateTangentDim(nj);
  const int nu = static_cast<int>(u.size());
  const int nr = term.Dim(model);
  ResidualData d;
  if (with_jacobians) {
    d.jx = Eigen::MatrixXd::Zero(nr, ndx);
    d.ju = Eigen::MatrixXd::Zero(nr, nu);
  }

  switch (term.kind) {
    case ResidualKind::kStateTracking: {
      d.r = StateMinus(x, term.x_ref);
      if (with_jacobians) {
        d.jx.setIdentity();
        d.jx.topLeftCorner<6, 6>() = Se3RightJacobianInverse(Tangent6::FromVector(d.r.head<6>()));
      }
      break;
    }
    case ResidualKind::kControlReg: {
      if (nu != model.nu()) throw std::invalid_argument("control regularization needs a control");
      d.r = term.u_ref.size() == 0 ? u : Eigen::VectorXd(u - term.u_ref);
      if (with_jacobians) d.ju.setIdentity();
      break;
    }
    case ResidualKind::kEePosition: {
      const std::vector<Pose> world = LinkPoses(model, x);
      const int ee = model.end_effector.link;
      const Vec3 p = world[ee].Act(model.end_effector.offset);
      d.r = p - term.target;
      if (with_jacobians) {
        const Mat3 rb = x.base.rotation().Matrix();
        const Vec3 s = x.base.Inverse().Act(p);
        d.jx.block<3, 3>(0, 0) = rb;
        d.jx.block<3, 3>(0, 3) = -rb * skew(s);
        for (int link = ee; link != 0; link = model.joints[link - 1].parent) {
          const Joint& j = model.joints[link - 1];
          const Vec3 axis = world[link].rotation() * j.axis;
          d.jx.block<3, 1>(0, 6 + link - 1) = axis.cross(p - world[link].translation());
        }
      }
      break;
    }
    case ResidualKind::kBasePitch: {
      const Mat3 r = x.base.rotation().Matrix();
      const double s = std::clamp(-r(2, 0), -1.0, 1.0);
      d.r = Eigen::VectorXd::Constant(1, std::asin(s) - term.pitch);
      if (with_jacobians) {
        const double c = std::sqrt(std::max(1.0 - s * s, 1e-12));
        // d r20 = r21 dphi_z - r22 dphi_y for a body-frame rotation dphi.
        d.jx(0, 4) = r(2, 2) / c;
        d.jx(0, 5) = -r(2, 1) / c;
      }
      break;
    }
    case ResidualKind::kJointBarrier: {
      d.r = Eigen::VectorXd::Zero(nj);
      for (int i = 0; i < nj; ++i) {
        if (x.q[i] > term.upper[i]) {
          d.r[i] = x.q[i] - term.upper[i];
        } else if (x.q[i] < term.lower[i]) {
          d.r[i] = x.q[i] - term.lower[i];
        } else {
          continue;
        }
        if (with_jacobians) d.jx(i, 6 + i) = 1.0;
      }
      break;
    }
  }
  return d;
}

namespace {

// Diagonal weight vector expanded to the residual size.
Eigen::VectorXd ExpandWeights(const ResidualTerm& t, int nr) {
  if (t.weights.size() == nr) return t.weights;
  return Eigen::VectorXd::Constant(nr, t.weights[0]);
}

}  // namespace

double Eval(const RobotModel& model, const NodeCost& cost, const State& x,
            const Eigen::VectorXd& u) {
  double total = 0.0;
  for (const ResidualTerm& t : cost.terms) {
    const ResidualData d = EvalResidual(model, t, x, u, false);
    total += 0.5 * d.r.dot(ExpandWeights(t, static_cast<int>(d.r.size())).cwiseProduct(d.r));
  }
  return total;
}

QuadraticApprox Quadratize(const RobotModel& model, const NodeCost& cost, const State& x,
                           const Eigen::VectorXd& u) {
  const int ndx = StateTangentDim(model.n_joints());
  const int nu = static_cast<int>(u.size());
  QuadraticApprox q;
  q.lx = Eigen::VectorXd::Zero(ndx);
  q.lu = Eigen::VectorXd::Zero(nu);
  q.lxx = Eigen::MatrixXd::Zero(ndx, ndx);
  q.lxu = Eigen::MatrixXd::Zero(ndx, nu);
  q.luu = Eigen::MatrixXd::Zero(nu, nu);
  for (const ResidualTerm& t : cost.terms) {
    const ResidualData d = EvalResidual(model, t, x, u, true);
    const Eigen::VectorXd w = ExpandWeights(t, static_cast<int>(d.r.size()));
    const Eigen::VectorXd wr = w.cwiseProduct(d.r);
    q.cost += 0.5 * d.r.dot(wr);
    if (t.UsesControl()) {
      // Pure control residual with identity Jacobian.
      q.lu += wr;
      q.luu.diagonal() += w;
    } else {
      const Eigen::MatrixXd wj = w.asDiagonal() * d.jx;
      q.lx.noalias() += d.jx.transpose() * wr;
      q.lxx.noalias() += d.jx.transpose() * wj;
    }
  }
  return q;
}

Eigen::VectorXd DefaultStateWeights(const RobotModel& model) {
  const int nj = model.n_joints();
  Eigen::VectorXd w(StateTangentDim(nj));
  w.head<3>().setConstant(10.0);
  w.segment<3>(3).setConstant(10.0);
  w.segment(6, nj).setConstant(5.0);
  w.tail(6 + nj).setConstant(1.0);
  return w;
}

Eigen::VectorXd DefaultControlWeights(const RobotModel& model) {
  return Eigen::VectorXd::Constant(model.nu(), 0.1);
}

}  // namespace borinot
