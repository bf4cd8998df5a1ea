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

// Serial against OpenMP node linearization, and one warm MPC step, on the
// sagittal mission window.

#include <memory>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "borinot/fddp.hpp"
#include "borinot/mission.hpp"
#include "borinot/mpc.hpp"

namespace borinot {
namespace {

struct Fixture {
  MissionSpec mission;
  std::shared_ptr<const RobotModel> model;
  std::shared_ptr<const Rail> rail;

  Fixture() : mission(LoadMissionFile(std::string(BORINOT_DATA_DIR) + "/missions/sagittal_2.0.json")) {
    model = std::make_shared<const RobotModel>(LoadModelFile(mission.model_path));
    rail = std::make_shared<const Rail>(SolveOffline(mission, model));
  }
};

const Fixture& Shared() {
  static const Fixture f;
  return f;
}

template <auto Linearize>
void BM_Linearize(benchmark::State& state) {
  const Fixture& f = Shared();
  MpcController mpc(f.model, f.rail, f.mission.mpc);
  const double t = 1.0;
  const ShootingProblem p = mpc.BuildProblem(f.rail->StateAt(f.rail->NodeAt(t)), t);
  const MpcResult guess = mpc.RailGuess(t);
  std::vector<ActionData> data;
  for (auto _ : state) {
    Linearize(p, guess.solution.xs, guess.solution.us, data);
    benchmark::DoNotOptimize(data.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(data.size()));
}
BENCHMARK(BM_Linearize<&LinearizeSerial>)->Name("Linearize/serial")->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Linearize<&LinearizeParallel>)->Name("Linearize/openmp")->Unit(benchmark::kMicrosecond);

void BM_MpcStep(benchmark::State& state, bool parallel) {
  const Fixture& f = Shared();
  MpcConfig cfg = f.mission.mpc;
  cfg.solver.parallel = parallel;
  MpcController mpc(f.model, f.rail, cfg);
  double t = 0.0;
  for (auto _ : state) {
    const State x = f.rail->StateAt(f.rail->NodeAt(t));
    benchmark::DoNotOptimize(mpc.Step(x, t));
    t += 0.01;
    if (t > f.rail->Duration()) {
      t = 0.0;
      mpc.Reset();
    }
  }
}
BENCHMARK_CAPTURE(BM_MpcStep, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MpcStep, openmp, true)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace borinot

BENCHMARK_MAIN();
