// Copyright 2026 The eposim Authors
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

#include <benchmark/benchmark.h>

#include <string>

#include "eposim/config.hpp"
#include "eposim/simulator.hpp"
#include "eposim/workload.hpp"

using namespace eposim;

namespace {

const char* const kNames[] = {"resnet50", "bertlarge", "rnnt"};

Workload bundled(int i) {
  return load_workload(std::string(EPOSIM_DATA_DIR) + "/workloads/" + kNames[i] + ".workload");
}

// Fixed batch isolates the timing and power passes from the batch search.
void BM_SimulateFixedBatch(benchmark::State& state) {
  const Workload w = bundled(int(state.range(0)));
  SimConfig c;
  c.batch = 16;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(w, c));
  state.SetLabel(kNames[state.range(0)]);
}
BENCHMARK(BM_SimulateFixedBatch)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_SimulateAutoBatch(benchmark::State& state) {
  const Workload w = bundled(int(state.range(0)));
  const SimConfig c;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(w, c));
  state.SetLabel(kNames[state.range(0)]);
}
BENCHMARK(BM_SimulateAutoBatch)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
