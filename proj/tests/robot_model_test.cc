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

// Tests for robot_model.

#include "borinot/robot_model.hpp"

#include <fstream>
#include <string>

#include <gmock/gmock.h>
#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace borinot {
namespace {

using ::testing::HasSubstr;
using json = nlohmann::json;

const std::string kModelDir = std::string(BORINOT_DATA_DIR) + "/models/";

json ReferenceDoc() {
  std::ifstream in(kModelDir + "borinot.json");
  return json::parse(in);
}

TEST(RobotModelTest, ReferenceModelMass) {
  const RobotModel m = LoadModelFile(kModelDir + "borinot.json");
  EXPECT_NEAR(m.TotalMass(), 2.854, 1e-9);
  EXPECT_EQ(m.n_props(), 6);
  EXPECT_EQ(m.n_joints(), 2);
  EXPECT_EQ(m.nu(), 8);
  EXPECT_EQ(m.nv(), 8);
}

TEST(RobotModelTest, PlatformAloneMass) {
  const RobotModel m = LoadModelFile(kModelDir + "borinot_platform.json");
  EXPECT_NEAR(m.TotalMass(), 2.112, 1e-9);
  EXPECT_EQ(m.n_joints(), 0);
}

TEST(RobotModelTest, JointTorqueLimit) {
  const RobotModel m = LoadModelFile(kModelDir + "borinot.json");
  for (const Joint& j : m.joints) EXPECT_DOUBLE_EQ(j.torque_limit, 2.7);
}

TEST(RobotModelTest, ThrustToWeight) {
  const RobotModel m = LoadModelFile(kModelDir + "borinot.json");
  EXPECT_NEAR(m.TotalMaxThrust(), 96.6, 1e-9);
  EXPECT_NEAR(ThrustToWeight(m), 3.45, 0.05);
  EXPECT_NEAR(ThrustToWeight(m), 96.6 / (2.854 * 9.81), 1e-12);
  EXPECT_NEAR(HoverThrottle(m), 1.0 / ThrustToWeight(m), 1e-15);
  EXPECT_NEAR(HoverThrottle(m) * 100.0, 28.6, 0.5);

  const RobotModel platform = LoadModelFile(kModelDir + "borinot_platform.json");
  EXPECT_NEAR(ThrustToWeight(platform), 4.66, 0.05);
}

TEST(RobotModelTest, TwrDecreasesWithPayload) {
  RobotModel m = LoadModelFile(kModelDir + "borinot.json");
  double last = ThrustToWeight(m);
  for (int i = 0; i < 5; ++i) {
    m.links.back().mass += 0.1;
    const double twr = ThrustToWeight(m);
    EXPECT_LT(twr, last);
    last = twr;
  }
}

TEST(RobotModelTest, EqualThrustsGivePureLift) {
  const RobotModel m = LoadModelFile(kModelDir + "borinot.json");
  const AllocationMap a = ComputeAllocationMap(m);
  const double t = 3.7;
  const Vec6 w = a.Wrench(Eigen::VectorXd::Constant(6, t));
  EXPECT_NEAR(w[2], 6 * t, 1e-12);
  EXPECT_LT(w.head<2>().norm(), 1e-12);
  EXPECT_LT(w.tail<3>().norm(), 1e-12);
}

TEST(RobotModelTest, SingleFrontPropellerPitchTorque) {
  const RobotModel m = LoadModelFile(kModelDir + "borinot.json");
  const AllocationMap a = ComputeAllocationMap(m);
  Eigen::VectorXd thrusts = Eigen::VectorXd::Zero(6);
  thrusts[0] = 2.0;  // the +x arm
  const Vec6 w = a.Wrench(thrusts);
  EXPECT_NEAR(std::abs(w[4]), 0.185 * 2.0, 1e-12);
  EXPECT_NEAR(w[3], 0.0, 1e-15);
  EXPECT_NEAR(w[5], m.propellers[0].spin * m.propellers[0].torque_ratio * 2.0, 1e-15);
}

TEST(RobotModelTest, HoverThrustsCarryWeight) {
  const RobotModel m = LoadModelFile(kModelDir + "borinot.json");
  const AllocationMap a = ComputeAllocationMap(m);
  const Eigen::VectorXd u = m.HoverControl();
  EXPECT_NEAR(a.Wrench(u.head(6))[2], 27.998, 1e-3);
  EXPECT_NEAR(u.head(6).sum(), 2.854 * 9.81, 1e-12);
  EXPECT_EQ(u.tail(2).norm(), 0.0);
}

TEST(RobotModelTest, PseudoInverseRecoversWrench) {
  const RobotModel m = LoadModelFile(kModelDir + "borinot.json");
  const AllocationMap a = ComputeAllocationMap(m);
  Vec6 w;
  w << 0, 0, 20.0, 0.3, -0.2, 0.05;  // fully actuated rows
  const Eigen::VectorXd t = a.pseudo_inverse * w;
  EXPECT_LT((a.Wrench(t) - w).norm(), 1e-10);
}

TEST(RobotModelTest, MirroredLayoutNegatesRollColumn) {
  json doc = ReferenceDoc();
  const AllocationMap a = ComputeAllocationMap(LoadModel(doc));
  for (auto& p : doc["propellers"]) p["position"][1] = -p["position"][1].get<double>();
  const AllocationMap b = ComputeAllocationMap(LoadModel(doc));
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(b.matrix(3, i), -a.matrix(3, i), 1e-15);
}

TEST(RobotModelTest, NegativeMassRejected) {
  json doc = ReferenceDoc();
  doc["links"][1]["mass"] = -0.1;
  try {
    LoadModel(doc);
    FAIL() << "expected ModelError";
  } catch (const ModelError& e) {
    EXPECT_EQ(e.field(), "links[1].mass");
  }
}

TEST(RobotModelTest, JointCycleRejected) {
  json doc = ReferenceDoc();
  // link1 -> link2 -> link1, with link1 no longer attached to the base.
  doc["joints"][0]["parent"] = "link2";
  EXPECT_THROW(LoadModel(doc), ModelError);
  try {
    LoadModel(doc);
  } catch (const ModelError& e) {
    EXPECT_THAT(e.what(), HasSubstr("loop"));
  }
}

TEST(RobotModelTest, NonSpdInertiaRejected) {
  json doc = ReferenceDoc();
  doc["links"][2]["inertia"] = {1e-3, 1e-3, -1e-4};
  EXPECT_THROW(LoadModel(doc), ModelError);
  doc["links"][2]["inertia"] = {{1e-3, 1e-4, 0}, {0, 1e-3, 0}, {0, 0, 1e-3}};
  EXPECT_THROW(LoadModel(doc), ModelError);
}

TEST(RobotModelTest, BadSpinRejected) {
  json doc = ReferenceDoc();
  doc["propellers"][2]["spin"] = 2;
  try {
    LoadModel(doc);
    FAIL() << "expected ModelError";
  } catch (const ModelError& e) {
    EXPECT_EQ(e.field(), "propellers[2].spin");
  }
}

TEST(RobotModelTest, MissingFieldNamed) {
  json doc = ReferenceDoc();
  doc["joints"][1].erase("axis");
  try {
    LoadModel(doc);
    FAIL() << "expected ModelError";
  } catch (const ModelError& e) {
    EXPECT_EQ(e.field(), "joints[1].axis");
  }
}

TEST(RobotModelTest, MissingFileReported) {
  EXPECT_THROW(LoadModelFile(kModelDir + "does_not_exist.json"), ModelError);
}

TEST(RobotModelTest, LinksReorderedTopologically) {
  json doc = ReferenceDoc();
  std::swap(doc["links"][1], doc["links"][2]);
  const RobotModel m = LoadModel(doc);
  EXPECT_EQ(m.links[1].name, "link1");
  EXPECT_EQ(m.links[2].name, "link2");
  EXPECT_EQ(m.joints[1].parent, 1);
  EXPECT_EQ(m.end_effector.link, 2);
}

TEST(RobotModelTest, ControlBounds) {
  const RobotModel m = LoadModelFile(kModelDir + "borinot.json");
  const Eigen::VectorXd lo = m.ControlLowerBound();
  const Eigen::VectorXd hi = m.ControlUpperBound();
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(lo[i], 0.0);
    EXPECT_EQ(hi[i], 16.1);
  }
  EXPECT_EQ(lo[6], -2.7);
  EXPECT_EQ(hi[7], 2.7);
}

}  // namespace
}  // namespace borinot
