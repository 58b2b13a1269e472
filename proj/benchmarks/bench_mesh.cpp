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

#include "eposim/mesh.hpp"

using namespace eposim;

namespace {

void BM_ClementsDecompose(benchmark::State& state) {
  const int m = int(state.range(0));
  const Eigen::MatrixXd q = random_orthogonal(m, 1);
  for (auto _ : state) benchmark::DoNotOptimize(clements_decompose(q));
  state.SetComplexityN(m);
}
BENCHMARK(BM_ClementsDecompose)->RangeMultiplier(2)->Range(8, 256)->Complexity();

void BM_ProgramTile(benchmark::State& state) {
  const int m = int(state.range(0));
  const Eigen::MatrixXd a = random_orthogonal(m, 2) * 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(program_tile(a));
}
BENCHMARK(BM_ProgramTile)->RangeMultiplier(2)->Range(8, 128);

void BM_NoisyForward(benchmark::State& state) {
  const int m = int(state.range(0));
  const PhaseProgram p = program_tile(random_orthogonal(m, 3));
  NoiseSpec n;
  n.eps_phi = 1e-3;
  n.eps_dc = 1e-3;
  const Eigen::VectorXd v = Eigen::VectorXd::Constant(m, 0.5);
  std::uint64_t trial = 0;
  for (auto _ : state) benchmark::DoNotOptimize(mesh_forward(p, v, n, trial++));
}
BENCHMARK(BM_NoisyForward)->RangeMultiplier(2)->Range(8, 64);

}  // namespace
