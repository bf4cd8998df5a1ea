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

// Deterministic multi-rate simulation: plant on a fixed base tick, tracking
// and MPC scheduled on multiples of it, plus a ground-contact world with an
// optional vertical guide rail for the jump experiments.

#ifndef BORINOT_SIM_HPP_
#define BORINOT_SIM_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "borinot/actuation.hpp"
#include "borinot/dynamics.hpp"
#include "borinot/mission.hpp"
#include "borinot/robot_model.hpp"
#include "borinot/tracking.hpp"

namespace borinot {

struct PlantConfig {
  double mass_scale = 1.03;          // base link mass and inertia
  Vec3 com_offset = Vec3::Zero();    // m, added to the base CoM
  double thrust_bias = 0.0;          // fraction, actual = (1 + bias) commanded
  double thrust_lag = 0.005;         // s, first-order; 0 disables
  double noise_std = 0.0;            // m on position, rad on joints
  bool ground_effect = false;
  double ground_effect_gain = 1.0;
  double rotor_radius = 0.089;       // m
  double tick = 0.0005;              // s
  double voltage = 22.2;             // V, for power accounting

  /// No mismatch, no lag, no noise.
  static PlantConfig Ideal();
  /// Throws std::invalid_argument.
  void Validate() const;
  /// Copy of `model` with the perturbations applied.
  RobotModel Perturb(const RobotModel& model) const;
};

struct Rates {
  double mpc_hz = 100.0;
  double tracking_hz = 400.0;
};

struct ContactWorld {
  double ground_z = 0.0;
  double stiffness = 1e4;            // N/m
  double damping = 100.0;            // N s/m
  double mu = 0.8;
  double slip_velocity = 0.01;       // m/s, friction regularization
  bool rail = false;                 // base restricted to vertical translation
  double carriage_mass = 0.7;        // kg, added to the base on the rail

  void Validate() const;
};

/// Normal and friction force on a point, world frame; zero above ground.
Vec3 ContactForce(const ContactWorld& world, const Vec3& point, const Vec3& velocity);

/// Per-tick series and scalar summary of one experiment.
struct ExperimentMetrics {
  std::string name;
  double tick = 0.0005;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::map<std::string, double> scalars;
  bool aborted = false;
  std::string abort_reason;

  std::vector<double> Column(const std::string& name) const;
  std::string Csv() const;
  std::string SummaryJson() const;
};

struct ClosedLoopOptions {
  PlantConfig plant;
  Rates rates;
  TrackingGains gains;
  double extra_time = 0.5;           // s simulated after the rail ends
  Vec3 initial_offset = Vec3::Zero(); // m, added to the starting base position
  double saturation_fraction = 0.98; // |tau| above this fraction of the limit
  std::uint64_t seed = 0;
};

/// Offline rail, then the MPC + tracking + plant loop along it. The rail is
/// solved with the nominal model; the plant uses the perturbed one.
ExperimentMetrics RunClosedLoop(const MissionSpec& mission, std::shared_ptr<const RobotModel> model,
                                const ClosedLoopOptions& options, const CurrentCurve& current);

/// Same loop on an existing rail.
ExperimentMetrics RunOnRail(const MissionSpec& mission, std::shared_ptr<const RobotModel> model,
                            std::shared_ptr<const Rail> rail, const ClosedLoopOptions& options,
                            const CurrentCurve& current);

/// Closed loop on a mission with an EE task; adds the window statistics.
ExperimentMetrics RunEeHold(const MissionSpec& mission, std::shared_ptr<const RobotModel> model,
                            const ClosedLoopOptions& options, const CurrentCurve& current);

struct JumpConfig {
  double beta = 0.5;                 // thrust as a fraction of the moving weight
  ContactWorld world{.rail = true};
  Eigen::Vector2d crouch{0.9, -1.8};
  Eigen::Vector2d refold{0.5, -1.0};
  double stretch_tolerance = 0.05;   // rad
  double crouch_time = 0.3;          // s settling before the push
  double refold_stiffness = 1.5;     // N m/rad
  double refold_damping = 0.02;      // N m s/rad
  double settle_time = 0.3;          // s after touchdown
  double max_time = 6.0;
  double tick = 0.0005;
  double voltage = 22.2;

  void Validate() const;
};

/// Scripted crouch, full-torque push, airborne refold, compliant landing.
/// Needs a two-joint planar leg.
ExperimentMetrics RunJump(const JumpConfig& config, const RobotModel& model,
                          const CurrentCurve& current);

enum class Aggressiveness { kGentle, kGraceful, kAggressive };
std::string ToString(Aggressiveness a);

struct AggressivenessThresholds {
  double gentle_peak = 0.5;          // peak control over its range
  double graceful_duty = 5.0;        // % of time with a saturated joint
};

/// Uses the scalars torque_saturation_duty and peak_control_fraction.
Aggressiveness ClassifyAggressiveness(const ExperimentMetrics& metrics,
                                      const AggressivenessThresholds& thresholds = {});

}  // namespace borinot

#endif  // BORINOT_SIM_HPP_
