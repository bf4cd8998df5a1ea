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

#include <memory>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "borinot/mpc.hpp"
#include "borinot/robot_ocp.hpp"

namespace borinot {
namespace {

using nlohmann::json;

const std::string kDataDir = BORINOT_DATA_DIR;

std::shared_ptr<const RobotModel> Model() {
  static const auto model =
      std::make_shared<const RobotModel>(LoadModelFile(kDataDir + "/models/borinot.json"));
  return model;
}

json NavThenWaypoint(double nav) {
  return json::parse(R"({
    "name": "t", "dt": 0.02,
    "initial": {"position": [0, 0, 1.5], "joints": [0, 0]},
    "phases": [
      {"kind": "navigation", "duration": )" + std::to_string(nav) + R"(},
      {"kind": "task", "duration": 0, "waypoint": {"position": [1, 0, 1.5]}}
    ]})");
}

const RobotActionModel& Running(const ShootingProblem& p, int k) {
  return dynamic_cast<const RobotActionModel&>(*p.running[k]);
}

const RobotTerminalModel& Terminal(const ShootingProblem& p) {
  return dynamic_cast<const RobotTerminalModel&>(*p.terminal);
}

bool Has(const NodeCost& c, ResidualKind kind) {
  for (const auto& t : c.terms) {
    if (t.kind == kind) return true;
  }
  return false;
}

TEST(MissionTest, OneNodePerStepPlusTerminal) {
  const MissionSpec m = ParseMission(NavThenWaypoint(1.0));
  const ShootingProblem p = BuildOcp(m, Model(), 0.02);
  EXPECT_EQ(p.T(), 50);
  ASSERT_NE(p.terminal, nullptr);
  EXPECT_TRUE(Has(Terminal(p).cost(), ResidualKind::kStateTracking));
  EXPECT_EQ(Terminal(p).cost().kind, NodeKind::kTask);
}

TEST(MissionTest, SagittalMissionHas230Nodes) {
  const MissionSpec m = LoadMissionFile(kDataDir + "/missions/sagittal_2.0.json");
  EXPECT_NEAR(m.Duration(), 4.6, 1e-12);
  const ShootingProblem p = BuildOcp(m, Model(), m.dt);
  EXPECT_EQ(p.T(), 230);
  // Task nodes carry the strong waypoint residual, navigation nodes only the
  // weak regularization.
  int task_nodes = 0;
  for (int k = 0; k < p.T(); ++k) {
    const NodeCost& c = Running(p, k).cost();
    EXPECT_TRUE(Has(c, ResidualKind::kControlReg));
    EXPECT_TRUE(Has(c, ResidualKind::kJointBarrier));
    if (c.kind == NodeKind::kTask) ++task_nodes;
  }
  EXPECT_EQ(task_nodes, 30);
  EXPECT_EQ(Running(p, 0).cost().kind, NodeKind::kNavigation);
  EXPECT_EQ(Running(p, 100).cost().kind, NodeKind::kTask);
  EXPECT_EQ(Running(p, 129).cost().kind, NodeKind::kTask);
  EXPECT_EQ(Running(p, 130).cost().kind, NodeKind::kNavigation);
}

TEST(MissionTest, TaskResidualsOutweighNavigationRegularization) {
  const MissionSpec m = LoadMissionFile(kDataDir + "/missions/sagittal_2.0.json");
  const ShootingProblem p = BuildOcp(m, Model(), m.dt);
  auto max_tracking = [](const NodeCost& c) {
    double w = 0.0;
    for (const auto& t : c.terms) {
      if (t.kind == ResidualKind::kStateTracking) w = std::max(w, t.weights.maxCoeff());
    }
    return w;
  };
  EXPECT_GT(max_tracking(Running(p, 110).cost()), 100.0 * max_tracking(Running(p, 10).cost()));
}

TEST(MissionTest, EmptyMissionIsRejected) {
  json doc = NavThenWaypoint(1.0);
  doc["phases"] = json::array();
  const MissionSpec m = ParseMission(doc);
  EXPECT_THROW(BuildOcp(m, Model(), 0.02), MissionError);
  doc.erase("phases");
  EXPECT_THROW(ParseMission(doc), MissionError);
}

TEST(MissionTest, MalformedPhasesAreRejected) {
  json doc = NavThenWaypoint(1.0);
  doc["phases"][0]["duration"] = -1.0;
  EXPECT_THROW(ParseMission(doc).Validate(*Model()), MissionError);

  doc = NavThenWaypoint(1.01);
  EXPECT_THROW(ParseMission(doc).NodesPerPhase(0.02), MissionError);

  doc = NavThenWaypoint(1.0);
  doc["phases"][1]["kind"] = "navigation";
  EXPECT_THROW(ParseMission(doc).Validate(*Model()), MissionError);

  doc = NavThenWaypoint(1.0);
  doc["phases"].push_back({{"kind", "navigation"}, {"duration", 1.0}});
  EXPECT_THROW(ParseMission(doc).Validate(*Model()), MissionError);
}

TEST(MissionTest, ErrorNamesTheField) {
  json doc = NavThenWaypoint(1.0);
  doc["phases"][1]["waypoint"]["joints"] = {0.0};
  try {
    ParseMission(doc).Validate(*Model());
    FAIL() << "expected MissionError";
  } catch (const MissionError& e) {
    EXPECT_NE(std::string(e.field()).find("phases[1]"), std::string::npos);
  }
}

TEST(MissionTest, InitialGuessInterpolatesWaypoints) {
  const MissionSpec m = ParseMission(NavThenWaypoint(1.0));
  const auto xs = InitialGuess(m, *Model(), 0.02);
  ASSERT_EQ(xs.size(), 51u);
  const State first = State::Unpack(xs.front(), 2);
  const State mid = State::Unpack(xs[25], 2);
  const State last = State::Unpack(xs.back(), 2);
  EXPECT_NEAR(first.base.translation().x(), 0.0, 1e-12);
  EXPECT_NEAR(mid.base.translation().x(), 0.5, 1e-12);
  EXPECT_NEAR(last.base.translation().x(), 1.0, 1e-12);
}

class HoverRailTest : public testing::Test {
 protected:
  static void SetUpTestSuite() {
    mission_ = new MissionSpec(LoadMissionFile(kDataDir + "/missions/hover.json"));
    rail_ = std::make_shared<const Rail>(SolveOffline(*mission_, Model()));
  }
  static void TearDownTestSuite() {
    delete mission_;
    rail_.reset();
  }

  static MissionSpec* mission_;
  static std::shared_ptr<const Rail> rail_;
};

MissionSpec* HoverRailTest::mission_ = nullptr;
std::shared_ptr<const Rail> HoverRailTest::rail_;

TEST_F(HoverRailTest, RailIsTheHoverFixedPoint) {
  ASSERT_TRUE(rail_->converged);
  rail_->Validate();
  EXPECT_EQ(rail_->xs.size(), rail_->us.size() + 1);
  const RobotModel& m = *Model();
  // Weight shared by six propellers, computed from the link masses.
  double mass = 0.0;
  for (const auto& l : m.links) mass += l.mass;
  const double per_prop = mass * m.gravity / 6.0;
  const State x0 = mission_->InitialState(m);
  for (std::size_t k = 0; k < rail_->us.size(); ++k) {
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(rail_->us[k][i], per_prop, 1e-6);
    EXPECT_NEAR(rail_->us[k].tail(2).norm(), 0.0, 1e-6);
    EXPECT_LT(StateMinus(rail_->StateAt(static_cast<int>(k)), x0).norm(), 1e-6);
  }
}

TEST_F(HoverRailTest, NodeLookupRoundsAndClamps) {
  EXPECT_EQ(rail_->NodeAt(0.0), 0);
  EXPECT_EQ(rail_->NodeAt(0.029), 1);
  EXPECT_EQ(rail_->NodeAt(0.031), 2);
  EXPECT_EQ(rail_->NodeAt(-1.0), 0);
  EXPECT_EQ(rail_->NodeAt(100.0), static_cast<int>(rail_->us.size()));
}

TEST_F(HoverRailTest, CsvHasOneRowPerState) {
  std::istringstream csv(RailCsv(*rail_));
  std::string line;
  int rows = 0;
  std::getline(csv, line);
  EXPECT_EQ(line.rfind("t,", 0), 0u);
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, static_cast<int>(rail_->xs.size()));
}

TEST_F(HoverRailTest, MpcRejectsMismatchedSpacing) {
  MpcConfig c = mission_->mpc;
  c.dt = 0.01;
  EXPECT_THROW(MpcController(Model(), rail_, c), std::invalid_argument);
}

TEST_F(HoverRailTest, MpcProblemsOnlyTrackTheRail) {
  const MpcController mpc(Model(), rail_, mission_->mpc);
  const ShootingProblem p = mpc.BuildProblem(rail_->StateAt(0), 0.5);
  ASSERT_EQ(p.T(), 35);
  const int i0 = rail_->NodeAt(0.5);
  for (int k = 0; k < p.T(); ++k) {
    const NodeCost& c = Running(p, k).cost();
    ASSERT_EQ(c.terms.size(), 2u);
    EXPECT_EQ(c.terms[0].kind, ResidualKind::kStateTracking);
    EXPECT_EQ(c.terms[1].kind, ResidualKind::kControlReg);
    // Node k references the rail at t + k dt.
    EXPECT_LT(StateMinus(c.terms[0].x_ref, rail_->StateAt(i0 + k)).norm(), 1e-12);
    EXPECT_LT((c.terms[1].u_ref - rail_->us[i0 + k]).norm(), 1e-12);
  }
  const NodeCost& tc = Terminal(p).cost();
  ASSERT_EQ(tc.terms.size(), 1u);
  EXPECT_EQ(tc.terms[0].kind, ResidualKind::kStateTracking);
  const NodeCost& c0 = Running(p, 0).cost();
  EXPECT_NEAR(tc.terms[0].weights.maxCoeff(), 10.0 * c0.terms[0].weights.maxCoeff(), 1e-12);
}

TEST_F(HoverRailTest, WindowPastTheEndHoldsTheFinalState) {
  const MpcController mpc(Model(), rail_, mission_->mpc);
  const ShootingProblem p = mpc.BuildProblem(rail_->StateAt(0), rail_->Duration() + 1.0);
  const int last = static_cast<int>(rail_->xs.size()) - 1;
  for (int k = 0; k < p.T(); ++k) {
    EXPECT_LT(StateMinus(Running(p, k).cost().terms[0].x_ref, rail_->StateAt(last)).norm(), 1e-12);
  }
}

TEST_F(HoverRailTest, OnRailFirstControlMatchesTheRail) {
  MpcController mpc(Model(), rail_, mission_->mpc);
  const MpcResult r = mpc.Step(rail_->StateAt(10), 10 * rail_->dt);
  ASSERT_TRUE(r.ok);
  EXPECT_LT((r.solution.us[0] - rail_->us[10]).cwiseAbs().maxCoeff(), 1e-3);
}

TEST_F(HoverRailTest, DisplacedStateContractsTowardTheRail) {
  MpcController mpc(Model(), rail_, mission_->mpc);
  State x = rail_->StateAt(0);
  x = State{Pose(x.base.rotation(), x.base.translation() + Vec3(0.1, 0.0, 0.0)), x.q, x.twist, x.qd};
  const MpcResult r = mpc.Step(x, 0.0);
  ASSERT_TRUE(r.ok);
  const State xn = State::Unpack(r.solution.xs.back(), 2);
  const double initial = (x.base.translation() - rail_->StateAt(0).base.translation()).norm();
  const double terminal =
      (xn.base.translation() - rail_->StateAt(r.start_node + 35).base.translation()).norm();
  EXPECT_LT(terminal, initial);
}

TEST_F(HoverRailTest, WarmStartIsNoWorseThanColdStart) {
  MpcController mpc(Model(), rail_, mission_->mpc);
  State x = rail_->StateAt(0);
  x = State{Pose(x.base.rotation(), x.base.translation() + Vec3(0.0, 0.1, -0.1)), x.q, x.twist, x.qd};
  const MpcResult first = mpc.Step(x, 0.0);
  const State next = State::Unpack(first.solution.xs[1], 2);
  const MpcResult warm = mpc.Step(next, 0.02);
  const MpcResult cold = mpc.Solve(next, 0.02);
  ASSERT_TRUE(warm.ok);
  ASSERT_TRUE(cold.ok);
  // Both stop once the expected improvement drops below the tolerance.
  EXPECT_LE(warm.solution.cost, cold.solution.cost + mission_->mpc.solver.tol);
}

}  // namespace
}  // namespace borinot
