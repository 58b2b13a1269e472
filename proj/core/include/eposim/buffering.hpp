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

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "eposim/timing.hpp"

namespace eposim {

/// Cumulative next-batch bytes moved into the activation SRAM per bin.
struct TransferSchedule {
  double dt = 0.0;
  std::vector<double> x_pcie;
  double objective = 0.0;
  bool feasible = true;
  std::optional<std::size_t> binding_bin;  // first bin where the transfer falls short
};

/// Optimal schedule: x(t) = min(suffix-min headroom, x(t-1) + bw dt, x_input).
TransferSchedule solve_schedule(const MemoryTrace& trace, double x_input, double x_max, double bw);

/// Exhaustive optimum over integer schedules. Requires <= 12 bins and integer
/// values <= 16 (trace, x_input, x_max, bw dt); throws ValidationError otherwise.
/// True iff `schedule` satisfies every constraint and attains the optimum.
bool verify_optimal(const MemoryTrace& trace, double x_input, double x_max, double bw,
                    const TransferSchedule& schedule);

/// Maximum objective over all integer schedules, or nullopt when none is feasible.
std::optional<double> exhaustive_optimum(const MemoryTrace& trace, double x_input, double x_max, double bw);

/// Memory behaviour of a workload at a given batch.
struct BatchProfile {
  MemoryTrace trace;
  double input_bytes = 0.0;
};
using BatchModel = std::function<BatchProfile(std::int64_t batch)>;

struct BatchChoice {
  std::int64_t batch = 0;
  TransferSchedule schedule;
};

/// Largest batch whose trace fits and whose next-batch transfer is feasible.
/// Searches downward from floor(x_max / peak(batch 1)). Throws InfeasibleError.
BatchChoice max_batch(const BatchModel& model, double x_max, double bw);

/// Largest batch with peak usage <= x_max / 2; 0 when even batch 1 does not fit.
std::int64_t double_buffering_batch(const BatchModel& model, double x_max);

}  // namespace eposim
