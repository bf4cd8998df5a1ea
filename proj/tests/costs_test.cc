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

// Tests for costs.

#include "borinot/costs.hpp"

#include <cmath>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "cost_fixtures.h"

namespace borinot {
namespace {

class CostsTest : public ::testing::Test {
 protected:
  void SetUp() override {
    model_ = LoadModelFile(std::string(BORINOT_DATA_DIR) + "/models/borinot.json");
  }
  RobotModel model_;
};

TEST_F(CostsTest, ZeroAtReference) {
  std::mt19937 rng(1);
  const State ref = testing_util::RandomState(model_, rng);
  NodeCost c;
  c.terms.push_back(ResidualTerm::StateTracking(ref, DefaultStateWeights(model_)));
  c.terms.push_back(ResidualTerm::ControlReg(DefaultControlWeights(model_)));
  const Eigen::VectorXd u = Eigen::VectorXd::Zero(model_.nu());
  EXPECT_NEAR(Eval(model_, c, ref, u), 0.0, 1e-24);
  const QuadraticApprox q = Quadratize(model_, c, ref, u);
  EXPECT_LT(q.lx.norm(), 1e-12);
  EXPECT_EQ(q.lu.norm(), 0.0);
}

TEST_F(CostsTest, BarrierIsQuadraticOutsideLimits) {
  const double w = 7.0;
  NodeCost c;
  c.terms.push_back(ResidualTerm::JointBarrier(Eigen::Vector2d(-1.4, -2.4),
                                               Eigen::Vector2d(1.4, 2.4), w));
  State x = State::Rest(model_);
  const Eigen::VectorXd none;
  EXPECT_EQ(Eval(model_, c, x, none), 0.0);
  x.q[0] = 1.4 + 0.1;
  EXPECT_NEAR(Eval(model_, c, x, none), 0.5 * w * 0.01, 1e-15);
  x.q[0] = 0.3;
  x.q[1] = -2.4 - 0.1;
  EXPECT_NEAR(Eval(model_, c, x, none), 0.5 * w * 0.01, 1e-15);
}

// Straight-line recomputation of every residual from its definition.
double OracleCost(const RobotModel& model, const NodeCost& c, const State& x,
                  const Eigen::VectorXd& u) {
  double total = 0.0;
  for (const ResidualTerm& t : c.terms) {
    switch (t.kind) {
      case ResidualKind::kStateTracking: {
        const Tangent6 dp = Log(t.x_ref.base.Inverse() * x.base);
        Eigen::VectorXd r(t.weights.size());
        r << dp.linear, dp.angular, x.q - t.x_ref.q,
            x.twist.linear - t.x_ref.twist.linear, x.twist.angular - t.x_ref.twist.angular,
            x.qd - t.x_ref.qd;
        for (int i = 0; i < r.size(); ++i) total += 0.5 * t.weights[i] * r[i] * r[i];
        break;
      }
      case ResidualKind::kControlReg:
        for (int i = 0; i < u.size(); ++i) {
          const double r = u[i] - (t.u_ref.size() ? t.u_ref[i] : 0.0);
          total += 0.5 * t.weights[i] * r * r;
        }
        break;
      case ResidualKind::kEePosition: {
        const Vec3 r = EndEffectorPosition(model, x) - t.target;
        total += 0.5 * t.weights[0] * r.squaredNorm();
        break;
      }
      case ResidualKind::kBasePitch: {
        const double r = x.base.rotation().Rpy().y() - t.pitch;
        total += 0.5 * t.weights[0] * r * r;
        break;
      }
      case ResidualKind::kJointBarrier:
        for (int i = 0; i < x.q.size(); ++i) {
          const double r = std::max(0.0, x.q[i] - t.upper[i]) + std::min(0.0, x.q[i] - t.lower[i]);
          total += 0.5 * t.weights[0] * r * r;
        }
        break;
    }
  }
  return total;
}

TEST_F(CostsTest, EvalMatchesStraightLineOracle) {
  std::mt19937 rng(2);
  for (int i = 0; i < 100; ++i) {
    const NodeCost c = testing_util::RandomCost(model_, rng);
    const State x = testing_util::RandomState(model_, rng);
    const Eigen::VectorXd u = testing_util::RandomControl(model_, rng);
    const double expected = OracleCost(model_, c, x, u);
    EXPECT_NEAR(Eval(model_, c, x, u), expected, 1e-10 * std::max(1.0, expected));
  }
}

TEST_F(CostsTest, GradientMatchesCentralDifferences) {
  std::mt19937 rng(3);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const NodeCost c = testing_util::RandomCost(model_, rng);
    const State x = testing_util::RandomState(model_, rng);
    const Eigen::VectorXd u = testing_util::RandomControl(model_, rng);
    const QuadraticApprox q = Quadratize(model_, c, x, u);
    worst = std::max(worst, testing_util::GradientRelativeError(model_, c, x, u, q));
  }
  EXPECT_LT(worst, 1e-5);
}

TEST_F(CostsTest, GaussNewtonHessianIsPsd) {
  std::mt19937 rng(4);
  for (int i = 0; i < 20; ++i) {
    const NodeCost c = testing_util::RandomCost(model_, rng);
    const State x = testing_util::RandomState(model_, rng);
    const Eigen::VectorXd u = testing_util::RandomControl(model_, rng);
    const QuadraticApprox q = Quadratize(model_, c, x, u);
    const int ndx = static_cast<int>(q.lx.size());
    const int nu = static_cast<int>(q.lu.size());
    Eigen::MatrixXd h(ndx + nu, ndx + nu);
    h << q.lxx, q.lxu, q.lxu.transpose(), q.luu;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-9 * std::max(1.0, es.eigenvalues().maxCoeff()));
  }
}

TEST_F(CostsTest, ControlRegHessianIsWeight) {
  Eigen::VectorXd w(model_.nu());
  w << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8;
  NodeCost c;
  c.terms.push_back(ResidualTerm::ControlReg(w, model_.HoverControl()));
  std::mt19937 rng(5);
  const QuadraticApprox q = Quadratize(model_, c, testing_util::RandomState(model_, rng),
                                       testing_util::RandomControl(model_, rng));
  EXPECT_EQ(q.luu, Eigen::MatrixXd(w.asDiagonal()));
  EXPECT_EQ(q.lxx.norm(), 0.0);
}

TEST_F(CostsTest, ScalingWeightsScalesCost) {
  std::mt19937 rng(6);
  const NodeCost c = testing_util::RandomCost(model_, rng);
  const State x = testing_util::RandomState(model_, rng);
  const Eigen::VectorXd u = testing_util::RandomControl(model_, rng);
  const double base = Eval(model_, c, x, u);
  EXPECT_NEAR(Eval(model_, c.Scaled(10.0), x, u), 10.0 * base, 1e-12 * base);
  EXPECT_NEAR(Eval(model_, c.Scaled(0.1), x, u), 0.1 * base, 1e-12 * base);
}

TEST_F(CostsTest, ValidationRejectsBadTerms) {
  NodeCost c;
  c.terms.push_back(ResidualTerm::ControlReg(-DefaultControlWeights(model_)));
  EXPECT_THROW(c.Validate(model_), std::invalid_argument);

  NodeCost task;
  task.kind = NodeKind::kTask;
  task.terms.push_back(ResidualTerm::ControlReg(DefaultControlWeights(model_)));
  EXPECT_THROW(task.Validate(model_), std::invalid_argument);
  task.terms.push_back(ResidualTerm::EePosition(Vec3::Zero(), 1.0));
  EXPECT_NO_THROW(task.Validate(model_));

  NodeCost wrong;
  wrong.terms.push_back(ResidualTerm::StateTracking(State::Rest(model_), Eigen::VectorXd::Ones(3)));
  EXPECT_THROW(wrong.Validate(model_), std::invalid_argument);
}

TEST_F(CostsTest, NonNegativeEverywhere) {
  std::mt19937 rng(7);
  for (int i = 0; i < 100; ++i) {
    const NodeCost c = testing_util::RandomCost(model_, rng);
    EXPECT_GE(Eval(model_, c, testing_util::RandomState(model_, rng),
                   testing_util::RandomControl(model_, rng)), 0.0);
  }
}

}  // namespace
}  // namespace borinot
