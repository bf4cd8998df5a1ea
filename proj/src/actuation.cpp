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

#include "borinot/actuation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <Eigen/QR>
#include <nlohmann/json.hpp>

namespace borinot {
namespace {

using nlohmann::json;

constexpr double kSyntheticGain = 16.1 / (25.2 * 0.95 * 1.15);
constexpr double kCurrentLinear = 0.62143491;
constexpr double kCurrentQuadratic = 0.09642721;

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::size_t CountDistinct(const std::vector<BenchSample>& s, double BenchSample::*field) {
  std::set<long long> keys;
  for (const BenchSample& x : s) keys.insert(std::llround(x.*field * 1e6));
  return keys.size();
}

}  // namespace

std::vector<BenchSample> ParseBenchCsv(const std::string& text) {
  std::stringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FitError("bench CSV is empty");
  const std::vector<std::string> header = SplitCsv(line);
  int col[5] = {-1, -1, -1, -1, -1};
  const char* names[5] = {"command", "voltage", "thrust", "current", "speed"};
  for (std::size_t i = 0; i < header.size(); ++i) {
    for (int k = 0; k < 5; ++k) {
      if (Trim(header[i]) == names[k]) col[k] = static_cast<int>(i);
    }
  }
  for (int k = 0; k < 4; ++k) {
    if (col[k] < 0) throw FitError(std::string("bench CSV lacks column '") + names[k] + "'");
  }
  std::vector<BenchSample> out;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (Trim(line).empty()) continue;
    const std::vector<std::string> cells = SplitCsv(line);
    auto get = [&](int k) {
      if (col[k] < 0 || col[k] >= static_cast<int>(cells.size()) || Trim(cells[col[k]]).empty()) {
        return 0.0;
      }
      try {
        return std::stod(cells[col[k]]);
      } catch (const std::exception&) {
        throw FitError("bench CSV row " + std::to_string(row) + ": bad number in '" + names[k] + "'");
      }
    };
    BenchSample s{get(0), get(1), get(2), get(3), get(4)};
    if (s.command < 0.0 || s.command > 1.0) {
      throw FitError("bench CSV row " + std::to_string(row) + ": command outside [0, 1]");
    }
    if (s.thrust < 0.0) throw FitError("bench CSV row " + std::to_string(row) + ": negative thrust");
    out.push_back(s);
  }
  return out;
}

std::vector<BenchSample> ReadBenchCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseBenchCsv(ss.str());
}

std::string BenchCsv(const std::vector<BenchSample>& samples) {
  std::string out = "command,voltage,thrust,current,speed\n";
  char buf[160];
  for (const BenchSample& s : samples) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.command, s.voltage, s.thrust,
                  s.current, s.speed);
    out += buf;
  }
  return out;
}

double SyntheticThrust(double command, double voltage) {
  return std::max(0.0, kSyntheticGain * voltage * (command - 0.05) * (command + 0.15));
}

double SyntheticCurrent(double thrust) {
  return kCurrentLinear * thrust + kCurrentQuadratic * thrust * thrust;
}

std::vector<BenchSample> SyntheticBench() {
  std::vector<BenchSample> out;
  for (double v : {19.8, 21.0, 22.2, 23.4, 24.6, 25.2}) {
    for (int i = 1; i <= 20; ++i) {
      BenchSample s;
      s.command = 0.05 * i;
      s.voltage = v;
      s.thrust = SyntheticThrust(s.command, v);
      s.current = SyntheticCurrent(s.thrust);
      out.push_back(s);
    }
  }
  return out;
}

Eigen::Matrix<double, 10, 1> ThrustMap::Basis(double c, double voltage) {
  const double v = (voltage - kVoltageCenter) / kVoltageScale;
  Eigen::Matrix<double, 10, 1> b;
  b << 1.0, c, v, c * c, c * v, v * v, c * c * c, c * c * v, c * v * v, v * v * v;
  return b;
}

double ThrustMap::Thrust(double command, double voltage) const {
  return coeffs.dot(Basis(command, voltage));
}

json ThrustMap::ToJson() const {
  json j;
  j["basis"] = "1,c,v,c2,cv,v2,c3,c2v,cv2,v3";
  j["voltage_center"] = kVoltageCenter;
  j["voltage_scale"] = kVoltageScale;
  j["coefficients"] = std::vector<double>(coeffs.data(), coeffs.data() + 10);
  j["rmse"] = rmse;
  j["voltage_range"] = {v_min, v_max};
  return j;
}

ThrustMap ThrustMap::FromJson(const json& doc) {
  ThrustMap m;
  const std::vector<double> c = doc.at("coefficients").get<std::vector<double>>();
  if (c.size() != 10) throw FitError("thrust map needs 10 coefficients");
  for (int i = 0; i < 10; ++i) m.coeffs[i] = c[static_cast<std::size_t>(i)];
  m.rmse = doc.value("rmse", 0.0);
  if (doc.contains("voltage_range")) {
    m.v_min = doc.at("voltage_range").at(0).get<double>();
    m.v_max = doc.at("voltage_range").at(1).get<double>();
  }
  return m;
}

ThrustMap FitThrustSurface(const std::vector<BenchSample>& samples) {
  if (samples.size() < 10) throw FitError("need at least 10 samples, got " + std::to_string(samples.size()));
  const std::size_t nv = CountDistinct(samples, &BenchSample::voltage);
  const std::size_t nc = CountDistinct(samples, &BenchSample::command);
  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd a(n, 10);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const BenchSample& s = samples[static_cast<std::size_t>(i)];
    a.row(i) = ThrustMap::Basis(s.command, s.voltage).transpose();
    y[i] = s.thrust;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < 10) {
    throw FitError("rank-deficient design (rank " + std::to_string(qr.rank()) + " of 10): samples cover " +
                   std::to_string(nv) + " voltage(s) and " + std::to_string(nc) +
                   " command(s); a cubic surface needs at least 4 of each");
  }
  ThrustMap m;
  m.coeffs = qr.solve(y);
  m.rmse = std::sqrt((a * m.coeffs - y).squaredNorm() / static_cast<double>(n));
  m.v_min = m.v_max = samples.front().voltage;
  for (const BenchSample& s : samples) {
    m.v_min = std::min(m.v_min, s.voltage);
    m.v_max = std::max(m.v_max, s.voltage);
  }
  // Monotone in the command wherever the fitted slice produces thrust.
  for (int iv = 0; iv <= 10; ++iv) {
    const double v = m.v_min + (m.v_max - m.v_min) * iv / 10.0;
    double prev = m.Thrust(0.0, v);
    for (int ic = 1; ic <= 100; ++ic) {
      const double t = m.Thrust(ic / 100.0, v);
      if (t < prev - 1e-9 && t > 0.0) {
        throw FitError("fitted thrust decreases with command near c=" + std::to_string(ic / 100.0) +
                       ", V=" + std::to_string(v));
      }
      prev = t;
    }
  }
  return m;
}

CommandResult CommandForThrust(const ThrustMap& map, double thrust, double voltage) {
  if (thrust > map.Thrust(1.0, voltage)) return {1.0, true};
  double lo = 0.0, hi = 1.0;
  if (map.Thrust(lo, voltage) >= thrust) return {0.0, false};
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (map.Thrust(mid, voltage) < thrust ? lo : hi) = mid;
  }
  return {0.5 * (lo + hi), false};
}

double CurrentCurve::Current(double thrust) const {
  // A stopped motor draws nothing, whatever the fitted intercept.
  if (thrust <= 0.0) return 0.0;
  double i = 0.0, p = 1.0;
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
    i += coeffs[k] * p;
    p *= thrust;
  }
  return std::max(0.0, i);
}

json CurrentCurve::ToJson() const {
  json j;
  j["coefficients"] = std::vector<double>(coeffs.data(), coeffs.data() + coeffs.size());
  j["rmse"] = rmse;
  j["thrust_max"] = thrust_max;
  return j;
}

CurrentCurve CurrentCurve::FromJson(const json& doc) {
  CurrentCurve c;
  const std::vector<double> v = doc.at("coefficients").get<std::vector<double>>();
  c.coeffs = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  c.rmse = doc.value("rmse", 0.0);
  c.thrust_max = doc.value("thrust_max", 0.0);
  return c;
}

CurrentCurve FitCurrentCurve(const std::vector<BenchSample>& samples, int degree) {
  if (degree < 1) throw FitError("current curve degree must be at least 1");
  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  if (n < degree + 1) throw FitError("not enough samples for the current curve");
  Eigen::MatrixXd a(n, degree + 1);
  Eigen::VectorXd y(n);
  CurrentCurve c;
  for (Eigen::Index i = 0; i < n; ++i) {
    const BenchSample& s = samples[static_cast<std::size_t>(i)];
    double p = 1.0;
    for (int k = 0; k <= degree; ++k, p *= s.thrust) a(i, k) = p;
    y[i] = s.current;
    c.thrust_max = std::max(c.thrust_max, s.thrust);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < degree + 1) throw FitError("current samples do not span enough thrust levels");
  c.coeffs = qr.solve(y);
  c.rmse = std::sqrt((a * c.coeffs - y).squaredNorm() / static_cast<double>(n));
  for (int k = 0; k <= 100; ++k) {
    const double t = c.thrust_max * k / 100.0;
    double i = 0.0, p = 1.0;
    for (Eigen::Index j = 0; j < c.coeffs.size(); ++j, p *= t) i += c.coeffs[j] * p;
    if (i < -1e-6) throw FitError("fitted current is negative at " + std::to_string(t) + " N");
  }
  return c;
}

double ElectricalPower(const CurrentCurve& curve, const PowerSample& s) {
  double current = 0.0;
  for (Eigen::Index i = 0; i < s.thrusts.size(); ++i) current += curve.Current(s.thrusts[i]);
  double mech = 0.0;
  for (Eigen::Index j = 0; j < s.torques.size(); ++j) mech += std::abs(s.torques[j] * s.joint_rates[j]);
  return s.voltage * current + mech;
}

double TrapezoidalEnergy(const std::vector<double>& power, double dt) {
  double e = 0.0;
  for (std::size_t k = 1; k < power.size(); ++k) e += 0.5 * (power[k - 1] + power[k]) * dt;
  return e;
}

PowerTrace PowerEnergy(const CurrentCurve& curve, const std::vector<PowerSample>& trace, double dt) {
  PowerTrace out;
  out.power.reserve(trace.size());
  for (const PowerSample& s : trace) out.power.push_back(ElectricalPower(curve, s));
  out.energy = TrapezoidalEnergy(out.power, dt);
  return out;
}

double HoverEndurance(double capacity_ah, double current_a, double usable_fraction) {
  return 60.0 * capacity_ah * usable_fraction / current_a;
}

}  // namespace borinot
