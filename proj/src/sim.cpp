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

#include "borinot/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <nlohmann/json.hpp>

#include "borinot/mpc.hpp"

namespace borinot {
namespace {

// Whole number of ticks per period; throws if the rates do not divide.
int TicksPer(double hz, double tick, const char* what) {
  const double n = 1.0 / (hz * tick);
  const double r = std::round(n);
  if (r < 1.0 || std::abs(n - r) > 1e-6) {
    throw std::invalid_argument(std::string(what) + " period is not a whole number of ticks");
  }
  return static_cast<int>(r);
}

State Interpolate(const State& a, const State& b, double s) {
  return StatePlus(a, s * StateMinus(b, a));
}

double GroundEffect(const PlantConfig& p, double height) {
  if (!p.ground_effect || height <= 0.0) return 1.0;
  const double r = p.rotor_radius / (4.0 * height);
  return std::min(1.25, 1.0 + p.ground_effect_gain * r * r);
}

// Least-squares slope of y against x.
double Slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

class Recorder {
 public:
  Recorder(ExperimentMetrics& m, const RobotModel& model) : m_(m) {
    m_.columns = {"t",  "x",  "y",  "z",  "roll", "pitch", "yaw", "wx", "wy",  "wz",
                  "vx", "vy", "vz", "ee_x", "ee_y", "ee_z", "ee_speed", "base_speed", "com_z", "com_vz"};
    for (int j = 0; j < model.n_joints(); ++j) m_.columns.push_back("q" + std::to_string(j));
    for (int j = 0; j < model.n_joints(); ++j) m_.columns.push_back("qd" + std::to_string(j));
    for (int j = 0; j < model.n_joints(); ++j) m_.columns.push_back("tau" + std::to_string(j));
    for (int i = 0; i < model.n_props(); ++i) m_.columns.push_back("thrust" + std::to_string(i));
    for (const char* c : {"prop_tx", "prop_ty", "prop_tz", "power"}) m_.columns.push_back(c);
  }

  void Add(double t, const RobotModel& model, const AllocationMap& alloc, const State& x,
           const Eigen::VectorXd& thrusts, const Eigen::VectorXd& tau, double power) {
    std::vector<double> r;
    r.reserve(m_.columns.size());
    const Vec3 p = x.base.translation();
    const Vec3 rpy = x.base.rotation().Rpy();
    const Vec3 v = x.base.rotation() * x.twist.linear;
    const Vec3 ee = EndEffectorPosition(model, x);
    const Vec3 com = CenterOfMass(model, x);
    const Vec3 comv = CenterOfMassVelocity(model, x);
    r.push_back(t);
    r.insert(r.end(), {p.x(), p.y(), p.z(), rpy.x(), rpy.y(), rpy.z()});
    r.insert(r.end(), {x.twist.angular.x(), x.twist.angular.y(), x.twist.angular.z()});
    r.insert(r.end(), {v.x(), v.y(), v.z(), ee.x(), ee.y(), ee.z()});
    r.push_back(EndEffectorVelocity(model, x).norm());
    r.push_back(v.norm());
    r.push_back(com.z());
    r.push_back(comv.z());
    for (Eigen::Index j = 0; j < x.q.size(); ++j) r.push_back(x.q[j]);
    for (Eigen::Index j = 0; j < x.qd.size(); ++j) r.push_back(x.qd[j]);
    for (Eigen::Index j = 0; j < tau.size(); ++j) r.push_back(tau[j]);
    for (Eigen::Index i = 0; i < thrusts.size(); ++i) r.push_back(thrusts[i]);
    const Vec6 w = alloc.Wrench(thrusts);
    // Differential torque only: the yaw drag term is excluded from tx, ty.
    r.insert(r.end(), {w[3], w[4], w[5], power});
    m_.rows.push_back(std::move(r));
  }

 private:
  ExperimentMetrics& m_;
};

double MaxAbs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void FlightScalars(ExperimentMetrics& m, const RobotModel& model, double saturation_fraction) {
  m.scalars["peak_roll_rate"] = MaxAbs(m.Column("wx"));
  m.scalars["peak_pitch_rate"] = MaxAbs(m.Column("wy"));
  m.scalars["peak_prop_roll_torque"] = MaxAbs(m.Column("prop_tx"));
  m.scalars["peak_prop_pitch_torque"] = MaxAbs(m.Column("prop_ty"));
  double peak = 0.0;
  for (int i = 0; i < model.n_props(); ++i) {
    peak = std::max(peak, MaxAbs(m.Column("thrust" + std::to_string(i))) /
                              model.propellers[i].max_thrust);
  }
  for (int j = 0; j < model.n_joints(); ++j) {
    const std::vector<double> tau = m.Column("tau" + std::to_string(j));
    const double lim = model.joints[j].torque_limit;
    peak = std::max(peak, MaxAbs(tau) / lim);
    m.scalars["peak_joint" + std::to_string(j + 1) + "_torque"] = MaxAbs(tau);
  }
  m.scalars["peak_control_fraction"] = peak;
  if (model.n_joints() > 0) {
    const std::vector<double> tau = m.Column("tau0");
    const double lim = saturation_fraction * model.joints[0].torque_limit;
    const auto sat = std::count_if(tau.begin(), tau.end(), [&](double v) { return std::abs(v) >= lim; });
    m.scalars["torque_saturation_duty"] = 100.0 * static_cast<double>(sat) / static_cast<double>(tau.size());
  } else {
    m.scalars["torque_saturation_duty"] = 0.0;
  }
  m.scalars["total_energy"] = TrapezoidalEnergy(m.Column("power"), m.tick);
  m.scalars["duration"] = m.rows.empty() ? 0.0 : m.rows.back()[0];
}

std::string Format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

PlantConfig PlantConfig::Ideal() {
  PlantConfig p;
  p.mass_scale = 1.0;
  p.thrust_lag = 0.0;
  return p;
}

void PlantConfig::Validate() const {
  if (!(tick > 0.0) || tick > 1e-3) throw std::invalid_argument("plant tick must be in (0, 1 ms]");
  if (std::abs(mass_scale - 1.0) > 0.2) throw std::invalid_argument("mass perturbation beyond 20%");
  if (std::abs(thrust_bias) > 0.2) throw std::invalid_argument("thrust bias beyond 20%");
  if (com_offset.norm() > 0.05) throw std::invalid_argument("CoM offset beyond 5 cm");
  if (thrust_lag < 0.0 || noise_std < 0.0) throw std::invalid_argument("lag and noise must be non-negative");
}

RobotModel PlantConfig::Perturb(const RobotModel& model) const {
  RobotModel m = model;
  m.links[0].mass *= mass_scale;
  m.links[0].inertia *= mass_scale;
  m.links[0].com += com_offset;
  return m;
}

void ContactWorld::Validate() const {
  if (!(stiffness > 0.0) || !(damping > 0.0)) throw std::invalid_argument("contact stiffness and damping must be positive");
  if (mu < 0.0 || carriage_mass < 0.0) throw std::invalid_argument("friction and carriage mass must be non-negative");
}

Vec3 ContactForce(const ContactWorld& w, const Vec3& p, const Vec3& v) {
  const double depth = w.ground_z - p.z();
  if (depth <= 0.0) return Vec3::Zero();
  const double fn = std::max(0.0, w.stiffness * depth - w.damping * v.z());
  Vec3 f(0.0, 0.0, fn);
  const Eigen::Vector2d vt(v.x(), v.y());
  const double speed = vt.norm();
  if (speed > 0.0) {
    const Eigen::Vector2d ft = -w.mu * fn * std::tanh(speed / w.slip_velocity) * vt / speed;
    f.x() = ft.x();
    f.y() = ft.y();
  }
  return f;
}

std::vector<double> ExperimentMetrics::Column(const std::string& col) const {
  const auto it = std::find(columns.begin(), columns.end(), col);
  if (it == columns.end()) throw std::out_of_range("no column '" + col + "'");
  const std::size_t i = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[i]);
  return out;
}

std::string ExperimentMetrics::Csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += Format(r[i]);
    }
    out += '\n';
  }
  return out;
}

std::string ExperimentMetrics::SummaryJson() const {
  nlohmann::json j;
  j["experiment"] = name;
  j["aborted"] = aborted;
  if (aborted) j["abort_reason"] = abort_reason;
  j["samples"] = rows.size();
  j["tick"] = tick;
  for (const auto& [k, v] : scalars) j["scalars"][k] = v;
  return j.dump(2) + "\n";
}

ExperimentMetrics RunOnRail(const MissionSpec& mission, std::shared_ptr<const RobotModel> model,
                            std::shared_ptr<const Rail> rail, const ClosedLoopOptions& options,
                            const CurrentCurve& current) {
  const PlantConfig& pc = options.plant;
  pc.Validate();
  const double h = pc.tick;
  const int mpc_every = TicksPer(options.rates.mpc_hz, h, "MPC");
  const int track_every = TicksPer(options.rates.tracking_hz, h, "tracking");

  const RobotModel plant = pc.Perturb(*model);
  const AllocationMap alloc = ComputeAllocationMap(plant);
  MpcController mpc(model, rail, mission.mpc);
  const TrackingController tracker(*model, options.gains);
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  auto measure = [&](const State& s) {
    if (pc.noise_std <= 0.0) return s;
    State m = s;
    Vec3 p = s.base.translation();
    for (int i = 0; i < 3; ++i) p[i] += pc.noise_std * noise(rng);
    m.base = Pose(s.base.rotation(), p);
    for (Eigen::Index j = 0; j < m.q.size(); ++j) m.q[j] += pc.noise_std * noise(rng);
    return m;
  };

  ExperimentMetrics out;
  out.name = mission.name;
  out.tick = h;
  Recorder rec(out, plant);
  out.scalars["rail_converged"] = rail->converged ? 1.0 : 0.0;
  out.scalars["rail_iterations"] = rail->iterations;

  const int np = plant.n_props();
  const int nj = plant.n_joints();
  State x = mission.InitialState(*model);
  x.base = Pose(x.base.rotation(), x.base.translation() + options.initial_offset);
  Eigen::VectorXd thrust = rail->us.front().head(np);
  SolverResult sol;
  double t_mpc = 0.0;
  ActuatorCommand cmd;
  int mpc_failures = 0;
  double max_err = 0.0;
  const long n_ticks = std::lround((rail->Duration() + options.extra_time) / h);
  const double lag = pc.thrust_lag > 0.0 ? 1.0 - std::exp(-h / pc.thrust_lag) : 1.0;

  for (long i = 0; i <= n_ticks; ++i) {
    const double t = static_cast<double>(i) * h;
    if (i % mpc_every == 0) {
      const MpcResult r = mpc.Step(measure(x), t);
      if (!r.ok) ++mpc_failures;
      sol = r.solution;
      t_mpc = r.ok ? t : t_mpc;
    }
    if (i % track_every == 0) {
      const double s = std::clamp((t - t_mpc) / mission.mpc.dt, 0.0, 1.0);
      const State ref = Interpolate(State::Unpack(sol.xs[0], nj), State::Unpack(sol.xs[1], nj), s);
      cmd = tracker.Track(measure(x), ref, sol.us[0]);
    }
    const double ge = GroundEffect(pc, x.base.translation().z());
    thrust += lag * ((1.0 + pc.thrust_bias) * cmd.thrusts - thrust);
    const Eigen::VectorXd tau = cmd.limb.Torque(plant, x.q, x.qd);
    Eigen::VectorXd u(plant.nu());
    u << ge * thrust, tau;

    PowerSample ps{thrust, tau, x.qd, pc.voltage};
    rec.Add(t, plant, alloc, x, ge * thrust, tau, ElectricalPower(current, ps));

    const Vec3 ref_p = rail->StateAt(rail->NodeAt(t)).base.translation();
    const double err = (x.base.translation() - ref_p).norm();
    max_err = std::max(max_err, err);
    if (i == n_ticks) break;
    x = AdvanceState(x, ForwardDynamics(plant, x, u), h);
    if (!x.Pack().allFinite() || err > 5.0) {
      out.aborted = true;
      out.abort_reason = "diverged at t=" + Format(t);
      break;
    }
  }
  FlightScalars(out, plant, options.saturation_fraction);
  out.scalars["mpc_failures"] = mpc_failures;
  out.scalars["max_rail_error"] = max_err;
  const Vec3 p0 = mission.InitialState(*model).base.translation();
  double drift = 0.0;
  for (const auto& r : out.rows) drift = std::max(drift, (Vec3(r[1], r[2], r[3]) - p0).norm());
  out.scalars["max_drift_from_start"] = drift;
  const Vec3 pf = rail->StateAt(static_cast<int>(rail->xs.size()) - 1).base.translation();
  out.scalars["final_position_error"] = (x.base.translation() - pf).norm();
  return out;
}

ExperimentMetrics RunClosedLoop(const MissionSpec& mission, std::shared_ptr<const RobotModel> model,
                                const ClosedLoopOptions& options, const CurrentCurve& current) {
  auto rail = std::make_shared<const Rail>(SolveOffline(mission, model));
  return RunOnRail(mission, model, rail, options, current);
}

ExperimentMetrics RunEeHold(const MissionSpec& mission, std::shared_ptr<const RobotModel> model,
                            const ClosedLoopOptions& options, const CurrentCurve& current) {
  double t0 = 0.0;
  const Phase* task = nullptr;
  for (const Phase& p : mission.phases) {
    if (p.ee_position) {
      task = &p;
      break;
    }
    t0 += p.duration;
  }
  if (task == nullptr) throw MissionError("phases", "mission has no EE task");
  ExperimentMetrics m = RunClosedLoop(mission, model, options, current);
  const double t1 = t0 + task->duration;
  const std::vector<double> t = m.Column("t"), ee = m.Column("ee_speed"), base = m.Column("base_speed"),
                            vz = m.Column("vz"), ex = m.Column("ee_x"), ey = m.Column("ee_y"),
                            ez = m.Column("ee_z");
  double se = 0, sb = 0, err_sum = 0, err_max = 0;
  int n = 0, sign_changes = 0;
  double apex_t = -1.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t0 - 1e-9 || t[i] > t1 + 1e-9) continue;
    se += ee[i];
    sb += base[i];
    const double e = (Vec3(ex[i], ey[i], ez[i]) - *task->ee_position).norm();
    err_sum += e;
    err_max = std::max(err_max, e);
    ++n;
    if (i > 0 && t[i - 1] >= t0 - 1e-9 && vz[i - 1] > 0.0 && vz[i] <= 0.0) {
      ++sign_changes;
      if (apex_t < 0) apex_t = t[i];
    }
  }
  m.scalars["task_start"] = t0;
  m.scalars["task_end"] = t1;
  m.scalars["ee_window_speed"] = n ? se / n : 0.0;
  m.scalars["base_window_speed"] = n ? sb / n : 0.0;
  m.scalars["ee_speed_ratio"] = sb > 0 ? se / sb : 0.0;
  m.scalars["vz_apex_in_window"] = sign_changes > 0 ? 1.0 : 0.0;
  m.scalars["apex_time"] = apex_t;
  m.scalars["ee_hold_error_mean"] = n ? err_sum / n : 0.0;
  m.scalars["ee_hold_error_max"] = err_max;
  return m;
}

void JumpConfig::Validate() const {
  if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("beta must be in [0, 1)");
  if (!world.rail) throw std::invalid_argument("the jump runs on the guide rail");
  world.Validate();
  if (!(tick > 0.0) || tick > 1e-3) throw std::invalid_argument("jump tick must be in (0, 1 ms]");
}

ExperimentMetrics RunJump(const JumpConfig& cfg, const RobotModel& robot, const CurrentCurve& current) {
  cfg.Validate();
  if (robot.n_joints() != 2) throw std::invalid_argument("the jump script needs a two-joint leg");
  RobotModel model = robot;
  model.links[0].mass += cfg.world.carriage_mass;
  const double h = cfg.tick;
  const int nj = 2;
  const int ee_link = model.end_effector.link;
  const double weight = model.TotalMass() * model.gravity;
  const Eigen::VectorXd thrust = Eigen::VectorXd::Constant(model.n_props(), cfg.beta * weight / model.n_props());
  const AllocationMap alloc = ComputeAllocationMap(model);

  // Start crouched with the foot on the ground.
  State x = State::Rest(model);
  x.q = cfg.crouch;
  const double foot = EndEffectorPosition(model, x).z();
  x.base = Pose(Rotation(), Vec3(0.0, 0.0, cfg.world.ground_z - foot));

  // Reduced coordinates on the rail: base vertical velocity and the joints.
  const std::vector<int> idx{2, 6, 7};

  enum class Phase { kCrouch, kPush, kAirborne, kLanded };
  Phase phase = Phase::kCrouch;
  double t_push = -1, t_liftoff = -1, t_touchdown = -1, z_push = 0;

  ExperimentMetrics out;
  out.name = "jump";
  out.tick = h;
  Recorder rec(out, model);
  std::vector<double> air_t, air_vz;
  const long n_max = std::lround(cfg.max_time / h);
  for (long i = 0; i <= n_max; ++i) {
    const double t = static_cast<double>(i) * h;
    const Vec3 p_ee = EndEffectorPosition(model, x);
    const Vec3 v_ee = EndEffectorVelocity(model, x);
    const Vec3 f = ContactForce(cfg.world, p_ee, v_ee);
    const bool contact = f.z() > 0.0;

    // Phase machine.
    if (phase == Phase::kCrouch && t >= cfg.crouch_time) {
      phase = Phase::kPush;
      t_push = t;
      z_push = x.base.translation().z();
    } else if (phase == Phase::kPush) {
      const bool stretched = (x.q.array().abs() <= cfg.stretch_tolerance).all();
      if (!contact || stretched) phase = Phase::kAirborne;
    } else if (phase == Phase::kAirborne) {
      if (contact && t_liftoff >= 0) {
        phase = Phase::kLanded;
        t_touchdown = t;
      } else if (!contact && t_liftoff < 0) {
        t_liftoff = t;
      }
    }

    Eigen::VectorXd tau(nj);
    switch (phase) {
      case Phase::kCrouch:
        for (int j = 0; j < nj; ++j) tau[j] = 10.0 * (cfg.crouch[j] - x.q[j]) - 0.2 * x.qd[j];
        break;
      case Phase::kPush:
        for (int j = 0; j < nj; ++j) {
          const double lim = model.joints[j].torque_limit;
          tau[j] = std::abs(x.q[j]) > cfg.stretch_tolerance ? (x.q[j] > 0 ? -lim : lim) : 0.0;
        }
        break;
      case Phase::kAirborne:
      case Phase::kLanded:
        for (int j = 0; j < nj; ++j) {
          tau[j] = cfg.refold_stiffness * (cfg.refold[j] - x.q[j]) - cfg.refold_damping * x.qd[j];
        }
        break;
    }
    for (int j = 0; j < nj; ++j) {
      const double lim = model.joints[j].torque_limit;
      tau[j] = std::clamp(tau[j], -lim, lim);
    }

    if (phase == Phase::kAirborne && t_liftoff >= 0 && !contact) {
      air_t.push_back(t);
      air_vz.push_back(CenterOfMassVelocity(model, x).z());
    }
    PowerSample ps{thrust, tau, x.qd, cfg.voltage};
    rec.Add(t, model, alloc, x, thrust, tau, ElectricalPower(current, ps));
    if (phase == Phase::kLanded && t >= t_touchdown + cfg.settle_time) break;
    if (i == n_max) break;

    // Contact force on the foot as a link-frame wrench.
    LinkForces fext(model.links.size(), Vec6::Zero());
    if (contact) {
      const Pose link = LinkPoses(model, x)[static_cast<std::size_t>(ee_link)];
      const Vec3 fl = link.rotation().Inverse() * f;
      fext[static_cast<std::size_t>(ee_link)] << fl, model.end_effector.offset.cross(fl);
    }
    Eigen::VectorXd u(model.nu());
    u << thrust, tau;
    const Eigen::MatrixXd mm = MassMatrix(model, x);
    const Eigen::VectorXd rhs = GeneralizedActuation(model, u) - BiasForces(model, x, fext);
    Eigen::Matrix3d mr;
    Eigen::Vector3d br;
    for (int a = 0; a < 3; ++a) {
      br[a] = rhs[idx[a]];
      for (int b = 0; b < 3; ++b) mr(a, b) = mm(idx[a], idx[b]);
    }
    const Eigen::Vector3d ar = mr.ldlt().solve(br);
    Acceleration acc;
    acc.base.linear.z() = ar[0];
    acc.joints = ar.tail<2>();
    x = AdvanceState(x, acc, h);
  }

  const double g = model.gravity;
  out.scalars["beta"] = cfg.beta;
  out.scalars["liftoff"] = t_liftoff >= 0 ? 1.0 : 0.0;
  out.scalars["liftoff_time"] = t_liftoff;
  out.scalars["touchdown_time"] = t_touchdown;
  out.scalars["airtime"] = (t_liftoff >= 0 && t_touchdown >= 0) ? t_touchdown - t_liftoff : 0.0;
  const std::vector<double> z = out.Column("z");
  out.scalars["apex_height"] = *std::max_element(z.begin(), z.end()) - z_push;
  out.scalars["expected_deceleration"] = (1.0 - cfg.beta) * g;
  if (air_t.size() > 10) {
    // Trim 10% at each end of the airborne window.
    const std::size_t trim = air_t.size() / 10;
    const std::vector<double> tt(air_t.begin() + trim, air_t.end() - trim);
    const std::vector<double> vv(air_vz.begin() + trim, air_vz.end() - trim);
    out.scalars["airborne_deceleration"] = -Slope(tt, vv);
  } else {
    out.scalars["airborne_deceleration"] = 0.0;
  }
  // Energy of one step, from the push to touchdown, against hovering.
  const double t_end = t_touchdown >= 0 ? t_touchdown : out.rows.back()[0];
  std::vector<double> step_power;
  const std::vector<double> t = out.Column("t"), pw = out.Column("power");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= t_push - 1e-12 && t[i] <= t_end + 1e-12) step_power.push_back(pw[i]);
  }
  const double step_time = h * static_cast<double>(step_power.size() > 0 ? step_power.size() - 1 : 0);
  out.scalars["step_time"] = step_time;
  out.scalars["step_energy"] = TrapezoidalEnergy(step_power, h);
  const double hover_power = cfg.voltage * model.n_props() * current.Current(weight / model.n_props());
  out.scalars["hover_power"] = hover_power;
  out.scalars["hover_energy_same_time"] = hover_power * step_time;
  out.scalars["total_energy"] = TrapezoidalEnergy(pw, h);
  return out;
}

std::string ToString(Aggressiveness a) {
  switch (a) {
    case Aggressiveness::kGentle:
      return "gentle";
    case Aggressiveness::kGraceful:
      return "graceful";
    case Aggressiveness::kAggressive:
      return "aggressive";
  }
  return "unknown";
}

Aggressiveness ClassifyAggressiveness(const ExperimentMetrics& m, const AggressivenessThresholds& th) {
  const double duty = m.scalars.at("torque_saturation_duty");
  const double peak = m.scalars.at("peak_control_fraction");
  if (duty == 0.0 && peak < th.gentle_peak) return Aggressiveness::kGentle;
  if (duty < th.graceful_duty) return Aggressiveness::kGraceful;
  return Aggressiveness::kAggressive;
}

}  // namespace borinot
