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

#include "eposim/timing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "eposim/error.hpp"

namespace eposim {
namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

template <class E, std::size_t N>
E from_string(const std::array<std::pair<E, std::string_view>, N>& table, std::string_view s, const char* what) {
  for (const auto& [v, n] : table) if (n == s) return v;
  throw ValidationError("unknown " + std::string(what) + " '" + std::string(s) + "'");
}

template <class E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E e) {
  for (const auto& [v, n] : table) if (v == e) return n;
  return "?";
}

constexpr std::array<std::pair<CoreType, std::string_view>, 2> kCores{{
    {CoreType::photo_core, "photo_core"}, {CoreType::systolic_array, "systolic_array"}}};
constexpr std::array<std::pair<Dataflow, std::string_view>, 3> kFlows{{
    {Dataflow::WS, "WS"}, {Dataflow::OS, "OS"}, {Dataflow::IS, "IS"}}};
constexpr std::array<std::pair<ParallelMode, std::string_view>, 3> kModes{{
    {ParallelMode::data, "data"}, {ParallelMode::tile, "tile"}, {ParallelMode::wdm, "wdm"}}};

// Independent work units a tile-parallel split distributes.
std::int64_t work_units(const TilePlan& p, const AcceleratorConfig& cfg) {
  if (cfg.core == CoreType::systolic_array && cfg.dataflow == Dataflow::OS) {
    return ceil_div(p.rows_w, p.m) * ceil_div(p.vectors_per_tile, p.m);
  }
  if (cfg.core == CoreType::systolic_array && cfg.dataflow == Dataflow::IS) {
    return ceil_div(p.cols_w, p.m) * ceil_div(p.vectors_per_tile, p.m);
  }
  return p.total_tiles;
}

std::vector<NonGemmOp> split_ops(const std::vector<NonGemmOp>& ops, std::int64_t n) {
  std::vector<NonGemmOp> out = ops;
  for (auto& op : out) op.elems = ceil_div(op.elems, n);
  return out;
}

}  // namespace

std::string_view to_string(CoreType c) { return name_of(kCores, c); }
std::string_view to_string(Dataflow d) { return name_of(kFlows, d); }
std::string_view to_string(ParallelMode p) { return name_of(kModes, p); }
CoreType core_type_from_string(std::string_view s) { return from_string(kCores, s, "core type"); }
Dataflow dataflow_from_string(std::string_view s) { return from_string(kFlows, s, "dataflow"); }
ParallelMode parallel_mode_from_string(std::string_view s) { return from_string(kModes, s, "parallel mode"); }

void AcceleratorConfig::validate() const {
  if (m < 2) throw ValidationError("accelerator m must be >= 2");
  if (!(f_c > 0.0)) throw ValidationError("accelerator f_c must be > 0");
  if (!(t_prog >= 0.0)) throw ValidationError("accelerator t_prog must be >= 0");
  if (n_cores < 1) throw ValidationError("accelerator n_cores must be >= 1");
  if (n_wdm < 1) throw ValidationError("accelerator n_wdm must be >= 1");
  if (zeta < 1) throw ValidationError("accelerator zeta must be >= 1");
  if (!(act_sram_bytes > 0.0) || !(weight_sram_bytes > 0.0)) throw ValidationError("SRAM sizes must be > 0");
  if (!(pcie_bytes_per_sec > 0.0)) throw ValidationError("pcie_bytes_per_sec must be > 0");
  if (!(sa_ref_hz > 0.0)) throw ValidationError("sa_ref_hz must be > 0");
  if (parallel_mode == ParallelMode::wdm && core != CoreType::photo_core) {
    throw ValidationError("wdm parallelism requires the photo_core");
  }
  if (parallel_mode == ParallelMode::wdm && n_cores != 1) {
    throw ValidationError("wdm parallelism runs through one mesh; n_cores must be 1");
  }
  if (parallel_mode != ParallelMode::wdm && n_wdm != 1) {
    throw ValidationError("n_wdm > 1 requires parallel_mode wdm");
  }
  if (core == CoreType::photo_core && dataflow != Dataflow::WS) {
    throw ValidationError("the photo_core is weight-stationary; dataflow must be WS");
  }
}

double AcceleratorConfig::replicas() const {
  if (core != CoreType::systolic_array) return 1.0;
  return std::max(1.0, f_c / sa_ref_hz);
}

GemmTiming photo_core_gemm_cycles(const TilePlan& p, const AcceleratorConfig& cfg) {
  const auto stall = static_cast<std::int64_t>(std::ceil(cfg.t_prog * cfg.f_c - 1e-9));
  const std::int64_t n = p.vectors_per_tile;
  const std::int64_t period = stall + n + 1;
  GemmTiming t;
  t.stream_cycles = p.total_tiles * (n + 1);
  t.stall_cycles = p.total_tiles * stall;
  t.fill_offset = (p.col_tiles - 1) * period + stall + 2;
  t.act_reads = p.total_tiles * n * p.m * kActBytes;
  t.act_writes = p.total_tiles * n * p.m * kActBytes;
  t.weight_reads = p.total_tiles * p.m * p.m * kWeightBytes;
  t.weight_loads = p.total_tiles;
  return t;
}

// Cycles are counted at sa_ref_hz per replica; replicas interleave so that
// cycles at f_c equal reference cycles (time = cycles / (replicas * sa_ref_hz)).
GemmTiming systolic_gemm_cycles(const TilePlan& p, const AcceleratorConfig& cfg) {
  const std::int64_t m = p.m, M = p.rows_w, K = p.cols_w, N = p.vectors_per_tile;
  GemmTiming t;
  switch (cfg.dataflow) {
    case Dataflow::WS: {
      const std::int64_t period = m + N + m;
      t.stream_cycles = p.total_tiles * (N + m);
      t.stall_cycles = p.total_tiles * m;
      t.fill_offset = (p.col_tiles - 1) * period + m + m + 1;
      t.act_reads = p.total_tiles * N * m * kActBytes;
      t.act_writes = p.total_tiles * N * m * kActBytes;
      t.weight_reads = p.total_tiles * m * m * kWeightBytes;
      t.weight_loads = p.total_tiles;
      break;
    }
    case Dataflow::OS: {
      const std::int64_t folds = ceil_div(M, m) * ceil_div(N, m);
      t.stream_cycles = folds * (2 * m + K - 2);
      t.stall_cycles = 0;
      t.fill_offset = 2 * m + K - 2;
      t.act_reads = folds * K * m * kActBytes;
      t.act_writes = folds * m * m * kActBytes;
      t.weight_reads = folds * K * m * kWeightBytes;
      t.weight_loads = 0;
      break;
    }
    case Dataflow::IS: {
      const std::int64_t k_folds = ceil_div(K, m);
      const std::int64_t folds = k_folds * ceil_div(N, m);
      t.stream_cycles = folds * (M + m);
      t.stall_cycles = folds * m;
      t.fill_offset = (k_folds - 1) * (2 * m + M) + m + m + 1;
      t.act_reads = folds * m * m * kActBytes;
      t.act_writes = folds * M * m * kActBytes;
      t.weight_reads = folds * M * m * kWeightBytes;
      t.weight_loads = 0;
      break;
    }
  }
  return t;
}

GemmTiming gemm_cycles(const TilePlan& p, const AcceleratorConfig& cfg) {
  return cfg.core == CoreType::photo_core ? photo_core_gemm_cycles(p, cfg) : systolic_gemm_cycles(p, cfg);
}

void LayerTimeline::accumulate(const LayerTimeline& b) {
  gemm_cycles += b.gemm_cycles;
  nongemm_cycles += b.nongemm_cycles;
  overlapped_cycles += b.overlapped_cycles;
  stall_cycles += b.stall_cycles;
  total_cycles += b.total_cycles;
  act_sram_reads_bytes += b.act_sram_reads_bytes;
  act_sram_writes_bytes += b.act_sram_writes_bytes;
  weight_sram_reads_bytes += b.weight_sram_reads_bytes;
  mac_count += b.mac_count;
  weight_loads += b.weight_loads;
  occupied_macs_slots += b.occupied_macs_slots;
  occupancy = occupied_macs_slots > 0 ? double(mac_count) / double(occupied_macs_slots) : 0.0;
}

LayerTimeline overlap_nongemm(const GemmTiming& g, std::int64_t nongemm, bool enabled) {
  LayerTimeline t;
  t.gemm_cycles = g.stream_cycles;
  t.stall_cycles = g.stall_cycles;
  t.nongemm_cycles = nongemm;
  const std::int64_t busy = g.cycles();
  const std::int64_t serial = busy + nongemm;
  t.total_cycles = serial;
  if (enabled && nongemm > 0) {
    t.total_cycles = std::min(serial, std::max(busy, nongemm) + g.fill_offset);
  }
  t.overlapped_cycles = serial - t.total_cycles;
  return t;
}

LayerTimeline time_gemm(const GemmOp& g, const AcceleratorConfig& cfg, const DigitalUnitConfig& du,
                        bool pipelining) {
  const TilePlan full = plan_tiles(g, cfg.m);
  const GemmTiming whole = gemm_cycles(full, cfg);
  GemmTiming core = whole;
  std::vector<NonGemmOp> ops = g.nongemm;
  std::int64_t arrays = 1;

  switch (cfg.parallel_mode) {
    case ParallelMode::data:
    case ParallelMode::wdm: {
      const std::int64_t n = cfg.parallel_mode == ParallelMode::data ? cfg.n_cores : cfg.n_wdm;
      arrays = n;
      if (n > 1) {
        TilePlan part = full;
        part.vectors_per_tile = ceil_div(g.n_vec, n);
        const GemmTiming split = gemm_cycles(part, cfg);
        core.stream_cycles = split.stream_cycles;
        core.stall_cycles = split.stall_cycles;
        core.fill_offset = split.fill_offset;
        ops = split_ops(ops, n);
        // Every data-parallel core holds its own copy of each weight tile.
        if (cfg.parallel_mode == ParallelMode::data) {
          core.weight_reads = whole.weight_reads * n;
          core.weight_loads = whole.weight_loads * n;
        }
      }
      break;
    }
    case ParallelMode::tile: {
      const std::int64_t n = cfg.n_cores;
      arrays = n;
      if (n > 1) {
        const std::int64_t units = work_units(full, cfg);
        const std::int64_t busiest = ceil_div(units, n);
        core.stream_cycles = ceil_div(whole.stream_cycles * busiest, units);
        core.stall_cycles = ceil_div(whole.stall_cycles * busiest, units);
        core.fill_offset = std::min(whole.fill_offset, core.cycles());
        const std::int64_t out_split = std::min(n, full.row_tiles);
        ops = split_ops(ops, out_split);
        // Partial sums of a row split across cores are merged digitally.
        const std::int64_t merges = std::min(full.col_tiles, n) - 1;
        if (merges > 0) {
          ops.push_back({NonGemmTag::add, ceil_div(merges * g.rows_w * g.n_vec, out_split)});
        }
      }
      break;
    }
  }

  LayerTimeline t = overlap_nongemm(core, layer_nongemm_cycles(ops, du), pipelining);
  t.source_layer = g.source_layer;
  t.act_sram_reads_bytes = core.act_reads;
  t.act_sram_writes_bytes = core.act_writes;
  t.weight_sram_reads_bytes = core.weight_reads;
  t.weight_loads = core.weight_loads;
  t.mac_count = g.macs();
  const std::int64_t stream_all =
      cfg.parallel_mode == ParallelMode::tile ? whole.stream_cycles : core.stream_cycles * arrays;
  t.occupied_macs_slots = cfg.m * cfg.m * stream_all;
  t.occupancy = double(t.mac_count) / double(t.occupied_macs_slots);
  return t;
}

std::vector<LayerTimeline> time_workload(const std::vector<GemmOp>& gemms, const AcceleratorConfig& cfg,
                                         const DigitalUnitConfig& du, bool pipelining) {
  cfg.validate();
  du.validate();
  std::vector<LayerTimeline> out;
  out.reserve(gemms.size());
  for (const auto& g : gemms) out.push_back(time_gemm(g, cfg, du, pipelining));
  return out;
}

std::vector<LayerTimeline> aggregate_by_layer(const std::vector<LayerTimeline>& per_gemm) {
  std::vector<LayerTimeline> out;
  for (const auto& t : per_gemm) {
    if (out.empty() || out.back().source_layer != t.source_layer) {
      out.push_back(t);
    } else {
      out.back().accumulate(t);
    }
  }
  return out;
}

LayerTimeline totals(const std::vector<LayerTimeline>& ts) {
  LayerTimeline sum;
  for (const auto& t : ts) sum.accumulate(t);
  return sum;
}

double MemoryTrace::peak() const {
  double p = 0.0;
  for (double u : usage) p = std::max(p, u);
  return p;
}

MemoryTrace build_memory_trace(const std::vector<LayerTimeline>& per_layer, const Workload& w, double f_c,
                               std::size_t bins) {
  if (bins < 1) throw ValidationError("trace bins must be >= 1");
  if (!(f_c > 0.0)) throw ValidationError("f_c must be > 0");
  struct Span {
    double start, end, in, out;
  };
  std::vector<Span> spans;
  double t = 0.0;
  for (const auto& tl : per_layer) {
    if (tl.source_layer >= w.layers.size()) throw InvariantError("timeline refers to a layer outside the workload");
    const LayerFootprint fp = footprint(w.layers[tl.source_layer]);
    const double len = double(tl.total_cycles) / f_c;
    spans.push_back({t, t + len, double(fp.input_bytes), double(fp.output_bytes)});
    t += len;
  }
  MemoryTrace tr;
  tr.usage.assign(bins, 0.0);
  if (spans.empty() || t <= 0.0) {
    tr.dt = 1.0 / double(bins);
    return tr;
  }
  tr.dt = t / double(bins);
  std::size_t li = 0;
  for (std::size_t k = 0; k < bins; ++k) {
    const double b0 = tr.dt * double(k);
    const double b1 = k + 1 == bins ? t : tr.dt * double(k + 1);
    while (li + 1 < spans.size() && spans[li].end <= b0) ++li;
    double u = 0.0;
    for (std::size_t j = li; j < spans.size() && spans[j].start < b1; ++j) {
      const Span& s = spans[j];
      const double until = std::min(b1, s.end);
      const double frac = s.end > s.start ? (until - s.start) / (s.end - s.start) : 1.0;
      u = std::max(u, s.in + s.out * std::clamp(frac, 0.0, 1.0));
    }
    tr.usage[k] = u;
  }
  return tr;
}

double ips(std::int64_t batch, std::int64_t total_cycles, double f_c) {
  if (total_cycles <= 0) throw InvariantError("total_cycles must be positive");
  return double(batch) * f_c / double(total_cycles);
}

}  // namespace eposim
