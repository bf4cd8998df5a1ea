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

#include "borinot/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "borinot/dynamics.hpp"

namespace borinot {
namespace {

const std::string kDataDir = BORINOT_DATA_DIR;

class TrackingTest : public testing::Test {
 protected:
  TrackingTest() : model_(LoadModelFile(kDataDir + "/models/borinot.json")) {}

  State Hover() const { return State::Rest(model_, Vec3(0.0, 0.0, 1.5)); }
  State Shifted(const State& s, const Vec3& dp) const {
    State o = s;
    o.base = Pose(s.base.rotation(), s.base.translation() + dp);
    return o;
  }

  RobotModel model_;
};

TEST_F(TrackingTest, ZeroErrorPassesFeedForwardThrough) {
  const TrackingController tc(model_, TrackingGains{});
  Eigen::VectorXd u = model_.HoverControl();
  u[6] = 0.4;
  u[7] = -0.2;
  const ActuatorCommand cmd = tc.Track(Hover(), Hover(), u);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(cmd.thrusts[i], u[i]);
  EXPECT_EQ(cmd.limb.torque[0], 0.4);
  EXPECT_EQ(cmd.limb.torque[1], -0.2);
  const Eigen::VectorXd tau = cmd.limb.Torque(model_, Hover().q, Hover().qd);
  EXPECT_EQ(tau[0], 0.4);
  EXPECT_EQ(tau[1], -0.2);
}

TEST_F(TrackingTest, VerticalErrorAddsEqualThrust) {
  TrackingGains g = TrackingGains::Zero();
  g.kp_pose[2] = 10.0;
  const TrackingController tc(model_, g);
  const Eigen::VectorXd u = model_.HoverControl();
  const ActuatorCommand cmd = tc.Track(Shifted(Hover(), Vec3(0, 0, -0.1)), Hover(), u);
  const Eigen::VectorXd delta = cmd.thrusts - u.head(6);
  EXPECT_NEAR(delta.sum(), 1.0, 1e-9);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(delta[i], 1.0 / 6.0, 1e-9);
  // The allocated wrench is a pure vertical force.
  const Vec6 w = ComputeAllocationMap(model_).Wrench(delta);
  EXPECT_NEAR(w[2], 1.0, 1e-9);
  EXPECT_NEAR(w.tail<3>().norm(), 0.0, 1e-9);
}

TEST_F(TrackingTest, ThrustsStayWithinBounds) {
  TrackingGains g;
  g.kp_pose.setConstant(500.0);
  const TrackingController tc(model_, g);
  const Eigen::VectorXd u = model_.HoverControl();
  for (double dz : {-5.0, 5.0}) {
    const ActuatorCommand cmd = tc.Track(Shifted(Hover(), Vec3(0.3, -0.2, dz)), Hover(), u);
    for (int i = 0; i < 6; ++i) {
      EXPECT_GE(cmd.thrusts[i], model_.min_thrust);
      EXPECT_GE(cmd.thrusts[i], 0.0);
      EXPECT_LE(cmd.thrusts[i], model_.propellers[i].max_thrust);
    }
  }
}

TEST_F(TrackingTest, LimbTorqueIsClampedToTheLimit) {
  const TrackingController tc(model_, TrackingGains{});
  State ref = Hover();
  ref.q << 1.0, -1.0;
  Eigen::VectorXd u = model_.HoverControl();
  u[6] = 2.5;
  u[7] = -2.5;
  const ActuatorCommand cmd = tc.Track(Hover(), ref, u);
  const Eigen::VectorXd tau = cmd.limb.Torque(model_, Hover().q, Hover().qd);
  EXPECT_DOUBLE_EQ(tau[0], model_.joints[0].torque_limit);
  EXPECT_DOUBLE_EQ(tau[1], -model_.joints[1].torque_limit);
}

TEST_F(TrackingTest, ZeroGainsArePureFeedForward) {
  const TrackingController tc(model_, TrackingGains::Zero());
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(-0.5, 0.5);
  const Eigen::VectorXd u = model_.HoverControl();
  for (int n = 0; n < 20; ++n) {
    State x = Shifted(Hover(), Vec3(d(rng), d(rng), d(rng)));
    x.twist = Tangent6(Vec3(d(rng), d(rng), d(rng)), Vec3(d(rng), d(rng), d(rng)));
    x.q << d(rng), d(rng);
    const ActuatorCommand cmd = tc.Track(x, Hover(), u);
    EXPECT_EQ((cmd.thrusts - u.head(6)).norm(), 0.0);
    EXPECT_EQ((cmd.limb.Torque(model_, x.q, x.qd) - u.tail(2)).norm(), 0.0);
  }
}

TEST_F(TrackingTest, OutputIsContinuousInTheState) {
  const TrackingController tc(model_, TrackingGains{});
  const Eigen::VectorXd u = model_.HoverControl();
  const State x = Shifted(Hover(), Vec3(0.02, -0.01, 0.03));
  const ActuatorCommand a = tc.Track(x, Hover(), u);
  for (double eps : {1e-3, 1e-5, 1e-7}) {
    const ActuatorCommand b = tc.Track(Shifted(x, Vec3(eps, eps, eps)), Hover(), u);
    EXPECT_LT((a.thrusts - b.thrusts).norm(), 100.0 * eps);
  }
}

TEST_F(TrackingTest, RejectsNegativeGains) {
  TrackingGains g;
  g.kd_twist[3] = -1.0;
  EXPECT_THROW(TrackingController(model_, g), std::invalid_argument);
}

// Tracking alone on a vertical offset behaves as a damped oscillator with
// omega = sqrt(kp / m) and zeta = kd / (2 sqrt(kp m)); it must settle within
// four time constants 4 / (zeta omega). The 2 s hover regulation with the
// MPC in the loop is covered in sim_test.
TEST_F(TrackingTest, VerticalOffsetSettlesAsADampedOscillator) {
  const TrackingGains gains;
  const TrackingController tc(model_, gains);
  const State ref = Hover();
  const Eigen::VectorXd u_ref = model_.HoverControl();
  State x = Shifted(ref, Vec3(0.0, 0.0, 0.05));
  const double m = model_.TotalMass();
  const double omega = std::sqrt(gains.kp_pose[2] / m);
  const double zeta = gains.kd_twist[2] / (2.0 * std::sqrt(gains.kp_pose[2] * m));
  const double settle = 4.0 / (zeta * omega);
  const double tick = 0.0005;
  double peak_overshoot = 0.0;
  ActuatorCommand cmd;
  for (int k = 0; k * tick < settle; ++k) {
    // Tracking at 400 Hz, plant at 2 kHz.
    if (k % 5 == 0) cmd = tc.Track(x, ref, u_ref);
    Eigen::VectorXd u(8);
    u << cmd.thrusts, cmd.limb.Torque(model_, x.q, x.qd);
    x = Integrate(model_, x, u, tick);
    peak_overshoot = std::max(peak_overshoot, ref.base.translation().z() - x.base.translation().z());
  }
  EXPECT_LT((x.base.translation() - ref.base.translation()).norm(), 0.005);
  // Overshoot of a second-order system, exp(-zeta pi / sqrt(1 - zeta^2)).
  const double expected = 0.05 * std::exp(-zeta * M_PI / std::sqrt(1.0 - zeta * zeta));
  EXPECT_NEAR(peak_overshoot, expected, 0.2 * expected);
}

}  // namespace
}  // namespace borinot
