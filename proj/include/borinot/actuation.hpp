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

// Motor identification: thrust surface over (command, voltage), its inverse,
// the current-vs-thrust curve and electrical power accounting.

#ifndef BORINOT_ACTUATION_HPP_
#define BORINOT_ACTUATION_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

namespace borinot {

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BenchSample {
  double command = 0.0;   // duty fraction
  double voltage = 0.0;   // V
  double thrust = 0.0;    // N
  double current = 0.0;   // A
  double speed = 0.0;     // rad/s, 0 when not measured
};

std::vector<BenchSample> ParseBenchCsv(const std::string& text);
std::vector<BenchSample> ReadBenchCsv(const std::filesystem::path& path);
std::string BenchCsv(const std::vector<BenchSample>& samples);

/// Ground truth behind the shipped synthetic bench set: thrust
/// K V (c - 0.05)(c + 0.15), scaled so that c = 1 at 25.2 V gives 16.1 N, and
/// current 0.621 T + 0.0964 T^2, through 5 A at 28/6 N and 35 A at 16.1 N.
double SyntheticThrust(double command, double voltage);
double SyntheticCurrent(double thrust);
/// Commands 0.05..1.0 by 0.05 at 19.8, 21.0, 22.2, 23.4, 24.6 and 25.2 V.
std::vector<BenchSample> SyntheticBench();

/// Full cubic in (c, v) with v = (V - 22.5) / 2.7, ten terms in the order
/// 1, c, v, c^2, c v, v^2, c^3, c^2 v, c v^2, v^3.
struct ThrustMap {
  static constexpr double kVoltageCenter = 22.5;
  static constexpr double kVoltageScale = 2.7;

  Eigen::Matrix<double, 10, 1> coeffs = Eigen::Matrix<double, 10, 1>::Zero();
  double rmse = 0.0;
  double v_min = 19.8;
  double v_max = 25.2;

  static Eigen::Matrix<double, 10, 1> Basis(double command, double voltage);
  double Thrust(double command, double voltage) const;

  nlohmann::json ToJson() const;
  static ThrustMap FromJson(const nlohmann::json& doc);
};

/// Least squares. Throws FitError when the design is rank deficient (fewer
/// than four distinct voltages or commands) or the fit is not monotone in
/// the command over the fitted voltage range.
ThrustMap FitThrustSurface(const std::vector<BenchSample>& samples);

struct CommandResult {
  double command = 0.0;
  bool saturated = false;   // thrust above what the motor gives at this voltage
};

/// Bisection on the monotone slice at `voltage`, tolerance 1e-10 on command.
CommandResult CommandForThrust(const ThrustMap& map, double thrust, double voltage);

/// Current against thrust, polynomial coefficients in increasing degree.
struct CurrentCurve {
  Eigen::VectorXd coeffs;
  double rmse = 0.0;
  double thrust_max = 0.0;

  /// Zero for non-positive thrust; clamped at zero elsewhere.
  double Current(double thrust) const;
  nlohmann::json ToJson() const;
  static CurrentCurve FromJson(const nlohmann::json& doc);
};

/// Throws FitError on a negative current anywhere in [0, max thrust].
CurrentCurve FitCurrentCurve(const std::vector<BenchSample>& samples, int degree = 2);

struct PowerSample {
  Eigen::VectorXd thrusts;      // N
  Eigen::VectorXd torques;      // N m
  Eigen::VectorXd joint_rates;  // rad/s
  double voltage = 22.2;        // V
};

struct PowerTrace {
  std::vector<double> power;    // W
  double energy = 0.0;          // J, trapezoidal
};

/// V sum I(T_i) plus sum |tau_j omega_j| (no regeneration).
double ElectricalPower(const CurrentCurve& curve, const PowerSample& s);
PowerTrace PowerEnergy(const CurrentCurve& curve, const std::vector<PowerSample>& trace, double dt);
double TrapezoidalEnergy(const std::vector<double>& power, double dt);

/// Minutes of hover from a capacity in Ah and a draw in A.
double HoverEndurance(double capacity_ah, double current_a, double usable_fraction = 1.0);

}  // namespace borinot

#endif  // BORINOT_ACTUATION_HPP_
