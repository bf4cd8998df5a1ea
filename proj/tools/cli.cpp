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

#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "borinot/actuation.hpp"
#include "borinot/mission.hpp"
#include "borinot/robot_model.hpp"
#include "borinot/sim.hpp"

namespace borinot::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

// Input that cannot be read or parsed; maps to the configuration exit code.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Output that cannot be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string Hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json ReadJson(const fs::path& path) {
  try {
    return json::parse(ReadText(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void SetLogLevel() {
  const char* env = std::getenv("BORINOT_LOG_LEVEL");
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::info);
}

// Options shared by every subcommand.
struct Global {
  std::uint64_t seed = 0;
  fs::path out_dir = "out";
  fs::path config;
  std::vector<std::string> argv;
};

// Optional overrides from --config.
struct Overrides {
  json doc = json::object();
  std::string hash;

  const json* Section(const char* key) const {
    auto it = doc.find(key);
    return it == doc.end() ? nullptr : &*it;
  }
};

Overrides LoadOverrides(const Global& g) {
  Overrides o;
  if (g.config.empty()) return o;
  const std::string text = ReadText(g.config);
  o.hash = Hex(Fnv1a(text));
  try {
    o.doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(g.config.string() + ": " + e.what());
  }
  if (!o.doc.is_object()) throw ConfigError(g.config.string() + ": expected a JSON object");
  return o;
}

Eigen::VectorXd Vec(const json& j, const char* what, int n) {
  const auto v = j.get<std::vector<double>>();
  if (static_cast<int>(v.size()) != n) {
    throw ConfigError(std::string(what) + ": expected " + std::to_string(n) + " values");
  }
  return Eigen::Map<const Eigen::VectorXd>(v.data(), n);
}

void ApplyPlant(const json& j, PlantConfig& p) {
  p.mass_scale = j.value("mass_scale", p.mass_scale);
  p.thrust_bias = j.value("thrust_bias", p.thrust_bias);
  p.thrust_lag = j.value("thrust_lag", p.thrust_lag);
  p.noise_std = j.value("noise_std", p.noise_std);
  p.ground_effect = j.value("ground_effect", p.ground_effect);
  p.tick = j.value("tick", p.tick);
  p.voltage = j.value("voltage", p.voltage);
  if (j.contains("com_offset")) p.com_offset = Vec(j.at("com_offset"), "plant.com_offset", 3);
}

ClosedLoopOptions ClosedLoopFrom(const Overrides& o, std::uint64_t seed, bool ideal) {
  ClosedLoopOptions c;
  if (ideal) c.plant = PlantConfig::Ideal();
  c.seed = seed;
  if (const json* p = o.Section("plant")) ApplyPlant(*p, c.plant);
  if (const json* r = o.Section("rates")) {
    c.rates.mpc_hz = r->value("mpc_hz", c.rates.mpc_hz);
    c.rates.tracking_hz = r->value("tracking_hz", c.rates.tracking_hz);
  }
  if (const json* g = o.Section("gains")) {
    if (g->contains("kp_pose")) c.gains.kp_pose = Vec(g->at("kp_pose"), "gains.kp_pose", 6);
    if (g->contains("kd_twist")) c.gains.kd_twist = Vec(g->at("kd_twist"), "gains.kd_twist", 6);
    c.gains.joint_stiffness = g->value("joint_stiffness", c.gains.joint_stiffness);
    c.gains.joint_damping = g->value("joint_damping", c.gains.joint_damping);
  }
  if (const json* s = o.Section("sim")) c.extra_time = s->value("extra_time", c.extra_time);
  return c;
}

JumpConfig JumpFrom(const Overrides& o, double beta) {
  JumpConfig c;
  c.beta = beta;
  if (const json* j = o.Section("jump")) {
    c.crouch_time = j->value("crouch_time", c.crouch_time);
    c.refold_stiffness = j->value("refold_stiffness", c.refold_stiffness);
    c.refold_damping = j->value("refold_damping", c.refold_damping);
    c.settle_time = j->value("settle_time", c.settle_time);
    c.max_time = j->value("max_time", c.max_time);
    c.voltage = j->value("voltage", c.voltage);
    c.world.stiffness = j->value("contact_stiffness", c.world.stiffness);
    c.world.damping = j->value("contact_damping", c.world.damping);
    c.world.mu = j->value("mu", c.world.mu);
    c.world.carriage_mass = j->value("carriage_mass", c.world.carriage_mass);
  }
  return c;
}

// Current curve from a bench CSV, or from the shipped synthetic set.
CurrentCurve CurrentFrom(const fs::path& bench, RunManifest& manifest) {
  if (bench.empty()) return FitCurrentCurve(SyntheticBench());
  manifest.input_hashes[bench.string()] = Hex(Fnv1a(ReadText(bench)));
  return FitCurrentCurve(ReadBenchCsv(bench));
}

class Outputs {
 public:
  Outputs(const Global& g, std::string stem) : g_(g), stem_(std::move(stem)) {
    manifest_.command_line = g.argv;
    manifest_.seed = g.seed;
    manifest_.versions = {{"borinot", kVersion},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                        std::to_string(EIGEN_MINOR_VERSION)},
                          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  }

  RunManifest& manifest() { return manifest_; }

  void Hash(const fs::path& path) { manifest_.input_hashes[path.string()] = Hex(Fnv1a(ReadText(path))); }

  void Write(const std::string& ext, const std::string& content) {
    const fs::path p = g_.out_dir / (stem_ + "." + ext);
    WriteFileAtomic(p, content);
    manifest_.artifacts.push_back(p.string());
    spdlog::info("wrote {}", p.string());
  }

  void Finish() { WriteFileAtomic(g_.out_dir / (stem_ + ".manifest.json"), manifest_.Json()); }

 private:
  const Global& g_;
  std::string stem_;
  RunManifest manifest_;
};

void PrintScalars(const std::map<std::string, double>& scalars) {
  std::size_t w = 0;
  for (const auto& [k, v] : scalars) w = std::max(w, k.size());
  for (const auto& [k, v] : scalars) std::printf("  %-*s %.6g\n", static_cast<int>(w), k.c_str(), v);
}

std::string Variant(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

int CmdModelValidate(const fs::path& path) {
  const RobotModel m = LoadModelFile(path);
  std::printf("model %s: %d links, %d joints, %d propellers\n", m.name.c_str(),
              static_cast<int>(m.links.size()), m.n_joints(), m.n_props());
  std::printf("mass %.3f kg, TWR %.2f, hover throttle %.1f%%\n", m.TotalMass(), ThrustToWeight(m),
              100.0 * HoverThrottle(m));
  std::printf("total max thrust %.1f N, hover thrust %.3f N per propeller\n", m.TotalMaxThrust(),
              m.TotalMass() * m.gravity / m.n_props());
  return kOk;
}

int CmdSolve(const Global& g, const fs::path& mission_path) {
  const MissionSpec mission = LoadMissionFile(mission_path);
  auto model = std::make_shared<const RobotModel>(LoadModelFile(mission.model_path));
  mission.Validate(*model);
  Outputs out(g, "solve_" + mission.name);
  out.Hash(mission_path);
  out.Hash(mission.model_path);
  spdlog::info("solving {} ({:.2f} s, {} nodes)", mission.name, mission.Duration(),
               static_cast<int>(mission.Duration() / mission.dt + 0.5));
  const Rail rail = SolveOffline(mission, model);
  json summary;
  summary["experiment"] = "solve";
  summary["mission"] = mission.name;
  summary["converged"] = rail.converged;
  summary["iterations"] = rail.iterations;
  summary["states"] = rail.xs.size();
  summary["controls"] = rail.us.size();
  summary["dt"] = rail.dt;
  summary["cost"] = rail.cost_trace.empty() ? 0.0 : rail.cost_trace.back();
  summary["cost_trace"] = rail.cost_trace;
  out.Write("csv", RailCsv(rail));
  out.Write("json", summary.dump(2) + "\n");
  out.Finish();
  std::printf("rail %s: %zu states, %zu controls, converged %s in %d iterations, cost %.6g\n",
              mission.name.c_str(), rail.xs.size(), rail.us.size(), rail.converged ? "yes" : "no",
              rail.iterations, summary["cost"].get<double>());
  return rail.converged ? kOk : kNotConverged;
}

int CmdMpc(const Global& g, const Overrides& o, const fs::path& mission_path, bool ideal,
           const fs::path& bench) {
  const MissionSpec mission = LoadMissionFile(mission_path);
  auto model = std::make_shared<const RobotModel>(LoadModelFile(mission.model_path));
  mission.Validate(*model);
  const ClosedLoopOptions options = ClosedLoopFrom(o, g.seed, ideal);
  Outputs out(g, "mpc_" + mission.name);
  out.Hash(mission_path);
  out.Hash(mission.model_path);
  if (!o.hash.empty()) out.manifest().input_hashes[g.config.string()] = o.hash;
  const CurrentCurve current = CurrentFrom(bench, out.manifest());

  bool ee_task = false;
  for (const Phase& p : mission.phases) ee_task = ee_task || p.ee_position.has_value();
  spdlog::info("closed loop on {}{}", mission.name, ee_task ? " (EE hold)" : "");
  ExperimentMetrics m = ee_task ? RunEeHold(mission, model, options, current)
                                : RunClosedLoop(mission, model, options, current);
  m.name = "mpc_" + mission.name;
  m.scalars["classification"] = static_cast<double>(ClassifyAggressiveness(m));
  out.Write("csv", m.Csv());
  out.Write("json", m.SummaryJson());
  out.Finish();
  std::printf("%s: %s%s\n", mission.name.c_str(), ToString(ClassifyAggressiveness(m)).c_str(),
              m.aborted ? (" (aborted: " + m.abort_reason + ")").c_str() : "");
  PrintScalars(m.scalars);
  if (m.aborted || (m.scalars.count("rail_converged") && m.scalars.at("rail_converged") == 0.0)) {
    return kNotConverged;
  }
  return kOk;
}

int CmdJump(const Global& g, const Overrides& o, double beta, const fs::path& model_path,
            const fs::path& bench) {
  const RobotModel model = LoadModelFile(model_path);
  const JumpConfig cfg = JumpFrom(o, beta);
  Outputs out(g, "jump_beta" + Variant(beta));
  out.Hash(model_path);
  if (!o.hash.empty()) out.manifest().input_hashes[g.config.string()] = o.hash;
  const CurrentCurve current = CurrentFrom(bench, out.manifest());
  const ExperimentMetrics m = RunJump(cfg, model, current);
  out.Write("csv", m.Csv());
  out.Write("json", m.SummaryJson());
  out.Finish();
  std::printf("jump beta %g: airborne decel %.4f m/s^2 (expected %.4f), apex %.3f m\n", beta,
              m.scalars.at("airborne_deceleration"), m.scalars.at("expected_deceleration"),
              m.scalars.at("apex_height"));
  PrintScalars(m.scalars);
  if (m.scalars.at("liftoff") == 0.0) spdlog::warn("no liftoff");
  return kOk;
}

int CmdThrustFit(const Global& g, const fs::path& csv) {
  const std::vector<BenchSample> samples = ReadBenchCsv(csv);
  const ThrustMap map = FitThrustSurface(samples);
  const CurrentCurve current = FitCurrentCurve(samples);
  Outputs out(g, "thrustmap_" + csv.stem().string());
  out.Hash(csv);
  json doc;
  doc["experiment"] = "thrustmap";
  doc["samples"] = samples.size();
  doc["thrust_map"] = map.ToJson();
  doc["current_curve"] = current.ToJson();
  out.Write("json", doc.dump(2) + "\n");
  out.Finish();
  std::printf("thrust surface RMSE %.3e N over %zu samples (%.1f..%.1f V)\n", map.rmse, samples.size(),
              map.v_min, map.v_max);
  std::printf("current curve  RMSE %.3e A up to %.2f N\n", current.rmse, current.thrust_max);
  std::printf("%8s %10s %10s %10s\n", "voltage", "T(c=0.5)", "T(c=1)", "I(T(c=1))");
  for (double v : {map.v_min, 0.5 * (map.v_min + map.v_max), map.v_max}) {
    std::printf("%8.2f %10.4f %10.4f %10.4f\n", v, map.Thrust(0.5, v), map.Thrust(1.0, v),
                current.Current(map.Thrust(1.0, v)));
  }
  return kOk;
}

int CmdThrustEval(const fs::path& map_path, std::optional<double> thrust, std::optional<double> command,
                  double voltage) {
  const json doc = ReadJson(map_path);
  const ThrustMap map = ThrustMap::FromJson(doc.contains("thrust_map") ? doc.at("thrust_map") : doc);
  if (thrust.has_value() == command.has_value()) {
    throw ConfigError("give exactly one of --thrust and --command");
  }
  if (thrust) {
    const CommandResult r = CommandForThrust(map, *thrust, voltage);
    std::printf("thrust %.4f N at %.2f V -> command %.6f%s\n", *thrust, voltage, r.command,
                r.saturated ? " (saturated)" : "");
  } else {
    std::printf("command %.4f at %.2f V -> thrust %.6f N\n", *command, voltage, map.Thrust(*command, voltage));
  }
  return kOk;
}

int CmdThrustSynth(const Global& g) {
  Outputs out(g, "synthetic_bench");
  out.Write("csv", BenchCsv(SyntheticBench()));
  out.Finish();
  return kOk;
}

}  // namespace

std::uint64_t Fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string RunManifest::Json() const {
  json j;
  j["command_line"] = command_line;
  j["input_hashes"] = input_hashes;
  j["seed"] = seed;
  j["artifacts"] = artifacts;
  j["versions"] = versions;
  return j.dump(2) + "\n";
}

void WriteFileAtomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create '" + path.parent_path().string() + "': " + ec.message());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + tmp.string() + "'");
    f << content;
    f.flush();
    if (!f) throw IoError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename to '" + path.string() + "': " + ec.message());
}

int RunCli(int argc, char** argv) {
  SetLogLevel();
  Global g;
  g.argv.assign(argv, argv + argc);

  CLI::App app{"Borinot aerial-limb control toolkit"};
  app.require_subcommand(1);
  app.add_option("--seed", g.seed, "Seed for plant noise")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Directory for outputs")->capture_default_str();
  app.add_option("--config", g.config, "JSON overrides: plant, rates, gains, sim, jump");
  app.set_version_flag("--version", kVersion);

  auto* model_cmd = app.add_subcommand("model", "Robot model tools")->require_subcommand(1);
  fs::path model_path;
  auto* validate = model_cmd->add_subcommand("validate", "Load a model and print its summary");
  validate->add_option("path", model_path, "Model JSON")->required();

  fs::path mission_path;
  auto* solve = app.add_subcommand("solve", "Solve a mission offline and write its rail");
  solve->add_option("mission", mission_path, "Mission JSON")->required();

  bool ideal = false;
  fs::path bench;
  auto* mpc = app.add_subcommand("mpc", "Run the closed loop along a mission rail");
  mpc->add_option("mission", mission_path, "Mission JSON")->required();
  mpc->add_flag("--ideal", ideal, "Plant without model mismatch");
  mpc->add_option("--bench", bench, "Bench CSV for the current curve");

  double beta = 0.5;
  fs::path leg_model = fs::path(BORINOT_DATA_DIR) / "models" / "borinot_leg.json";
  auto* jump = app.add_subcommand("jump", "Scripted jump-and-fly on the guide rail");
  jump->add_option("--beta", beta, "Thrust as a fraction of the weight")->capture_default_str();
  jump->add_option("--model", leg_model, "Model with a two-joint leg")->capture_default_str();
  jump->add_option("--bench", bench, "Bench CSV for the current curve");

  auto* thrust = app.add_subcommand("thrustmap", "Motor thrust identification")->require_subcommand(1);
  fs::path csv;
  auto* fit = thrust->add_subcommand("fit", "Fit thrust surface and current curve");
  fit->add_option("csv", csv, "Bench CSV")->required();
  fs::path map_path;
  std::optional<double> want_thrust, want_command;
  double voltage = 22.2;
  auto* eval = thrust->add_subcommand("eval", "Evaluate a fitted map");
  eval->add_option("map", map_path, "Fitted map JSON")->required();
  eval->add_option("--thrust", want_thrust, "Thrust in N to invert");
  eval->add_option("--command", want_command, "Command to evaluate");
  eval->add_option("--voltage", voltage, "Battery voltage")->capture_default_str();
  auto* synth = thrust->add_subcommand("synth", "Write the synthetic bench data set");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    const Overrides o = LoadOverrides(g);
    if (validate->parsed()) return CmdModelValidate(model_path);
    if (solve->parsed()) return CmdSolve(g, mission_path);
    if (mpc->parsed()) return CmdMpc(g, o, mission_path, ideal, bench);
    if (jump->parsed()) return CmdJump(g, o, beta, leg_model, bench);
    if (fit->parsed()) return CmdThrustFit(g, csv);
    if (eval->parsed()) return CmdThrustEval(map_path, want_thrust, want_command, voltage);
    if (synth->parsed()) return CmdThrustSynth(g);
  } catch (const IoError& e) {
    spdlog::error("{}", e.what());
    return kIoError;
  } catch (const ModelError& e) {
    spdlog::error("{}", e.what());
    return kConfigError;
  } catch (const FitError& e) {
    spdlog::error("{}", e.what());
    return kConfigError;
  } catch (const ConfigError& e) {
    spdlog::error("{}", e.what());
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kConfigError;
  } catch (const nlohmann::json::exception& e) {
    spdlog::error("{}", e.what());
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return kIoError;
  } catch (const std::runtime_error& e) {
    // ReadBenchCsv reports unreadable files this way.
    spdlog::error("{}", e.what());
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace borinot::cli
