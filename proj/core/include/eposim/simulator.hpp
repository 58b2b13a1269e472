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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eposim/buffering.hpp"
#include "eposim/config.hpp"
#include "eposim/energy.hpp"
#include "eposim/timing.hpp"
#include "eposim/workload.hpp"

namespace eposim {

struct LayerRecord {
  std::string name;
  std::string kind;
  LayerTimeline timeline;
};

struct Derived {
  double ips = 0.0;
  double ips_per_w = 0.0;
  double ips_per_w_mm2 = 0.0;
  double utilization = 0.0;
  double arithmetic_intensity = 0.0;  // MACs per activation SRAM byte
};

/// Throughput bounds in inferences per second.
struct Roofline {
  double ai = 0.0;
  double attained_ips = 0.0;
  double peak_ips = 0.0;
  double mem_ceiling_ips = 0.0;
};

struct BufferingSummary {
  std::string mode;
  std::int64_t double_buffering_batch = 0;
  double peak_act_bytes = 0.0;
  double input_bytes = 0.0;
  bool memory_feasible = true;
  bool schedule_feasible = true;
  double schedule_objective = 0.0;
};

struct SimReport {
  std::string workload;
  std::string core;
  std::string dataflow;
  std::string parallel_mode;
  std::int64_t m = 0;
  double f_c = 0.0;
  std::int64_t n_cores = 1;
  std::int64_t n_wdm = 1;
  bool pipelining = true;
  std::int64_t batch = 0;
  std::int64_t total_cycles = 0;
  double runtime_s = 0.0;
  std::vector<LayerRecord> layers;
  LayerTimeline total;
  PowerReport power;
  Derived derived;
  Roofline roofline;
  BufferingSummary buffering;

  bool operator==(const SimReport& o) const;
};

/// Overrides applied on top of a loaded config.
struct SimFlags {
  std::optional<bool> pipelining;
  std::optional<BufferingMode> buffering;
  std::optional<std::size_t> bins;
  std::optional<std::int64_t> batch;
};

SimConfig apply_flags(SimConfig c, const SimFlags& f);

/// Memory profile of the workload at a batch (trace plus next-batch input bytes).
BatchProfile batch_profile(const Workload& w, const SimConfig& c, std::int64_t batch);

/// Full workload -> timing -> buffering -> energy pipeline.
SimReport simulate(const Workload& w, const SimConfig& c);
SimReport run_simulation(const std::string& workload_path, const std::string& config_path, const SimFlags& flags);

struct SweepAxes {
  std::vector<std::int64_t> m;
  std::vector<double> f_c;
  std::vector<CoreType> core;
  std::vector<std::int64_t> batch;  // 0 selects the buffering-mode batch
  std::vector<std::pair<ParallelMode, std::int64_t>> parallelism;
  Dataflow sa_dataflow = Dataflow::OS;
};

struct SweepPoint {
  std::int64_t m = 0;
  double f_c = 0.0;
  CoreType core = CoreType::photo_core;
  std::int64_t batch = 0;
  ParallelMode mode = ParallelMode::data;
  std::int64_t degree = 1;
};

struct SweepRow {
  SweepPoint point;
  SimReport report;
};

/// Configuration for one sweep point on top of a base config.
SimConfig configure_point(const SimConfig& base, const SweepPoint& p, Dataflow sa_dataflow);

/// Cross product in axis order (m outermost). Rows come back in that order
/// regardless of how many worker threads ran them. threads = 0 uses hardware concurrency.
std::vector<SweepRow> run_sweep(const SweepAxes& axes, const Workload& w, const SimConfig& base,
                                unsigned threads = 0);

/// Photo-core and systolic array (sa_dataflow) on the same workload and batch.
std::pair<SimReport, SimReport> compare(const Workload& w, const SimConfig& base, Dataflow sa_dataflow = Dataflow::OS);

}  // namespace eposim
