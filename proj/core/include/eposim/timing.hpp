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
#include <string_view>
#include <vector>

#include "eposim/nonlinear.hpp"
#include "eposim/workload.hpp"

namespace eposim {

enum class CoreType { photo_core, systolic_array };
enum class Dataflow { WS, OS, IS };
enum class ParallelMode { data, tile, wdm };

std::string_view to_string(CoreType c);
std::string_view to_string(Dataflow d);
std::string_view to_string(ParallelMode p);
CoreType core_type_from_string(std::string_view s);
Dataflow dataflow_from_string(std::string_view s);
ParallelMode parallel_mode_from_string(std::string_view s);

struct AcceleratorConfig {
  CoreType core = CoreType::photo_core;
  std::int64_t m = 128;
  double f_c = 10e9;
  Dataflow dataflow = Dataflow::WS;  // forced to WS on the photo-core
  double t_prog = 10e-9;
  std::int64_t n_cores = 1;
  ParallelMode parallel_mode = ParallelMode::data;
  std::int64_t n_wdm = 1;
  double act_sram_bytes = 100e6;
  double weight_sram_bytes = 300e6;
  double pcie_bytes_per_sec = 16e9;
  std::int64_t zeta = 100;
  double sa_ref_hz = 1e9;  // systolic replicas run at this clock

  /// Throws ValidationError.
  void validate() const;
  /// Time-interleaved systolic replicas needed to reach f_c (1 for the photo-core).
  double replicas() const;
  /// Physical cores carrying their own mesh or array.
  std::int64_t physical_cores() const { return n_cores; }
  /// Input vectors accepted per cycle across all cores and wavelengths.
  std::int64_t vector_lanes() const { return n_cores * n_wdm; }
};

/// Bytes per element in the SRAMs.
inline constexpr std::int64_t kActBytes = 1;
inline constexpr std::int64_t kWeightBytes = 2;

/// Cycle and traffic cost of one GemmOp on one core.
struct GemmTiming {
  std::int64_t stream_cycles = 0;  // vectors streamed plus pipeline fill
  std::int64_t stall_cycles = 0;   // weight programming or loading
  std::int64_t fill_offset = 0;    // cycles until the first complete output vector
  std::int64_t act_reads = 0;
  std::int64_t act_writes = 0;
  std::int64_t weight_reads = 0;
  std::int64_t weight_loads = 0;   // tiles programmed

  std::int64_t cycles() const { return stream_cycles + stall_cycles; }
};

/// Per tile: ceil(t_prog f_c) stall, n_vec streaming, 1 fill.
GemmTiming photo_core_gemm_cycles(const TilePlan& plan, const AcceleratorConfig& cfg);
/// Analytic OS/WS/IS models at the replica clock; see timing.cpp.
GemmTiming systolic_gemm_cycles(const TilePlan& plan, const AcceleratorConfig& cfg);
GemmTiming gemm_cycles(const TilePlan& plan, const AcceleratorConfig& cfg);

struct LayerTimeline {
  std::size_t source_layer = 0;
  std::int64_t gemm_cycles = 0;
  std::int64_t nongemm_cycles = 0;
  std::int64_t overlapped_cycles = 0;
  std::int64_t stall_cycles = 0;
  std::int64_t total_cycles = 0;
  std::int64_t act_sram_reads_bytes = 0;
  std::int64_t act_sram_writes_bytes = 0;
  std::int64_t weight_sram_reads_bytes = 0;
  std::int64_t mac_count = 0;
  std::int64_t weight_loads = 0;      // tile programming events across all cores
  std::int64_t occupied_macs_slots = 0;  // m^2 x streaming cycles x arrays
  double occupancy = 0.0;

  /// Adds b's counters into this timeline.
  void accumulate(const LayerTimeline& b);
  bool consistent() const {
    return total_cycles == gemm_cycles + nongemm_cycles - overlapped_cycles + stall_cycles;
  }
};

/// Disabled: total = gemm + stall + nongemm. Enabled: the non-GEMM pass starts
/// fill_offset cycles in, and never lengthens the layer.
LayerTimeline overlap_nongemm(const GemmTiming& gemm, std::int64_t nongemm_cycles, bool enabled);

/// Timeline for one GemmOp including parallelism and non-GEMM work.
LayerTimeline time_gemm(const GemmOp& g, const AcceleratorConfig& cfg, const DigitalUnitConfig& du,
                        bool pipelining);

/// One timeline per GemmOp, in order.
std::vector<LayerTimeline> time_workload(const std::vector<GemmOp>& gemms, const AcceleratorConfig& cfg,
                                         const DigitalUnitConfig& du, bool pipelining);

/// Sums timelines sharing a source layer, keeping first-appearance order.
std::vector<LayerTimeline> aggregate_by_layer(const std::vector<LayerTimeline>& per_gemm);

LayerTimeline totals(const std::vector<LayerTimeline>& t);

/// Activation SRAM occupancy sampled per time bin (max within the bin).
struct MemoryTrace {
  double dt = 0.0;
  std::vector<double> usage;

  double peak() const;
  double runtime() const { return dt * static_cast<double>(usage.size()); }
};

/// Layer-granular liveness: during layer i, usage = input_i + output_i x elapsed fraction.
/// Timelines are per source layer; the workload supplies footprints.
MemoryTrace build_memory_trace(const std::vector<LayerTimeline>& per_layer, const Workload& w, double f_c,
                               std::size_t bins);

/// Inferences per second for a run of total_cycles at f_c.
double ips(std::int64_t batch, std::int64_t total_cycles, double f_c);

}  // namespace eposim
