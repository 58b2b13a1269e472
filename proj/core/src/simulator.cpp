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

#include "eposim/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "eposim/error.hpp"

namespace eposim {
namespace {

std::size_t first_gemm_layer(const Workload& w) {
  for (std::size_t i = 0; i < w.layers.size(); ++i) {
    if (w.layers[i].kind != LayerKind::elementwise_block) return i;
  }
  throw ValidationError("workload '" + w.name + "' has no GEMM layers");
}

std::int64_t nongemm_bytes(const std::vector<GemmOp>& gemms) {
  std::int64_t b = 0;
  for (const auto& g : gemms)
    for (const auto& op : g.nongemm) b += 2 * op.elems * kActBytes;
  return b;
}

void check(bool ok, const std::string& what) {
  if (!ok) throw InvariantError(what);
}

}  // namespace

SimConfig apply_flags(SimConfig c, const SimFlags& f) {
  if (f.pipelining) c.pipelining = *f.pipelining;
  if (f.buffering) c.buffering = *f.buffering;
  if (f.bins) c.bins = *f.bins;
  if (f.batch) c.batch = *f.batch;
  return c;
}

BatchProfile batch_profile(const Workload& w, const SimConfig& c, std::int64_t batch) {
  const Workload wb = w.with_batch(batch);
  const auto per_gemm = time_workload(lower_to_gemms(wb), c.accelerator, c.effective_digital_unit(), c.pipelining);
  BatchProfile p;
  p.trace = build_memory_trace(aggregate_by_layer(per_gemm), wb, c.accelerator.f_c, c.bins);
  p.input_bytes = double(footprint(wb.layers[first_gemm_layer(wb)]).input_bytes);
  return p;
}

SimReport simulate(const Workload& w, const SimConfig& c) {
  c.validate();
  const AcceleratorConfig& acc = c.accelerator;
  const DigitalUnitConfig du = c.effective_digital_unit();
  const double x_max = acc.act_sram_bytes;
  const BatchModel model = [&](std::int64_t b) { return batch_profile(w, c, b); };

  SimReport r;
  r.buffering.mode = std::string(to_string(c.buffering));
  r.buffering.double_buffering_batch = double_buffering_batch(model, x_max);
  if (c.batch > 0) {
    r.batch = c.batch;
  } else if (c.buffering == BufferingMode::optimized) {
    r.batch = max_batch(model, x_max, acc.pcie_bytes_per_sec).batch;
  } else {
    r.batch = r.buffering.double_buffering_batch;
    if (r.batch < 1) throw InfeasibleError("batch 1 does not fit in half of the activation SRAM");
  }

  const Workload wb = w.with_batch(r.batch);
  const std::vector<GemmOp> gemms = lower_to_gemms(wb);
  const std::vector<LayerTimeline> per_gemm = time_workload(gemms, acc, du, c.pipelining);
  const std::vector<LayerTimeline> per_layer = aggregate_by_layer(per_gemm);
  r.total = totals(per_gemm);
  for (const auto& t : per_layer) {
    const LayerSpec& l = wb.layers[t.source_layer];
    r.layers.push_back({l.name.empty() ? std::string(to_string(l.kind)) + "_" + std::to_string(t.source_layer) : l.name,
                        std::string(to_string(l.kind)), t});
  }

  r.workload = w.name;
  r.core = std::string(to_string(acc.core));
  r.dataflow = std::string(to_string(acc.dataflow));
  r.parallel_mode = std::string(to_string(acc.parallel_mode));
  r.m = acc.m;
  r.f_c = acc.f_c;
  r.n_cores = acc.n_cores;
  r.n_wdm = acc.n_wdm;
  r.pipelining = c.pipelining;
  r.total_cycles = r.total.total_cycles;
  r.runtime_s = double(r.total_cycles) / acc.f_c;

  const MemoryTrace trace = build_memory_trace(per_layer, wb, acc.f_c, c.bins);
  r.buffering.peak_act_bytes = trace.peak();
  r.buffering.input_bytes = double(footprint(wb.layers[first_gemm_layer(wb)]).input_bytes);
  if (c.buffering == BufferingMode::optimized) {
    r.buffering.memory_feasible = trace.peak() <= x_max;
    const TransferSchedule s = solve_schedule(trace, r.buffering.input_bytes, x_max, acc.pcie_bytes_per_sec);
    r.buffering.schedule_feasible = s.feasible && r.buffering.memory_feasible;
    r.buffering.schedule_objective = s.objective;
  } else {
    r.buffering.memory_feasible = trace.peak() <= x_max / 2.0;
    r.buffering.schedule_feasible = r.buffering.memory_feasible;
  }

  RollupInput in;
  in.total_cycles = r.total_cycles;
  in.weight_loads = r.total.weight_loads;
  const double act_bytes = double(r.total.act_sram_reads_bytes + r.total.act_sram_writes_bytes);
  in.traffic.sram_bytes = act_bytes + double(r.total.weight_sram_reads_bytes) + double(nongemm_bytes(gemms));
  in.traffic.dram_bytes = r.buffering.input_bytes;
  in.traffic.d2d_bytes = acc.core == CoreType::photo_core ? act_bytes : 0.0;
  in.digital_lanes = acc.m;
  in.digital_units = du.n_units();
  r.power = rollup(acc, c.devices, in);

  const double macs = double(r.total.mac_count);
  const double arrays = acc.core == CoreType::photo_core ? double(acc.n_cores * acc.n_wdm) : double(acc.n_cores);
  const double peak_macs = double(acc.m * acc.m) * acc.f_c * arrays;
  const double act_bw = 2.0 * double(acc.m) * acc.f_c * arrays * double(kActBytes);
  const double macs_per_inf = macs / double(r.batch);

  r.derived.ips = ips(r.batch, r.total_cycles, acc.f_c);
  r.derived.ips_per_w = r.derived.ips / r.power.total_w;
  r.derived.ips_per_w_mm2 = r.derived.ips_per_w / r.power.total_mm2;
  r.derived.utilization = macs / (peak_macs * r.runtime_s);
  r.derived.arithmetic_intensity = act_bytes > 0.0 ? macs / act_bytes : 0.0;
  r.roofline.ai = r.derived.arithmetic_intensity;
  r.roofline.attained_ips = r.derived.ips;
  r.roofline.peak_ips = peak_macs / macs_per_inf;
  r.roofline.mem_ceiling_ips = r.roofline.ai * act_bw / macs_per_inf;

  check(r.total.consistent(), "timeline bookkeeping: total != gemm + nongemm - overlapped + stall");
  check(r.roofline.attained_ips <= std::min(r.roofline.peak_ips, r.roofline.mem_ceiling_ips) * (1 + 1e-9),
        "roofline bound violated");
  double sum = 0.0;
  for (const auto& [k, v] : r.power.watts) sum += v;
  check(std::abs(sum - r.power.total_w) <= 1e-12 * std::abs(r.power.total_w), "power breakdown does not sum to total");
  return r;
}

SimReport run_simulation(const std::string& workload_path, const std::string& config_path, const SimFlags& flags) {
  const Workload w = load_workload(workload_path);
  const SimConfig c = apply_flags(config_path.empty() ? SimConfig{} : load_config(config_path), flags);
  return simulate(w, c);
}

SimConfig configure_point(const SimConfig& base, const SweepPoint& p, Dataflow sa_dataflow) {
  SimConfig c = base;
  AcceleratorConfig& a = c.accelerator;
  a.m = p.m;
  a.f_c = p.f_c;
  a.core = p.core;
  a.dataflow = p.core == CoreType::photo_core ? Dataflow::WS : sa_dataflow;
  a.parallel_mode = p.mode;
  a.n_cores = p.mode == ParallelMode::wdm ? 1 : p.degree;
  a.n_wdm = p.mode == ParallelMode::wdm ? p.degree : 1;
  c.batch = p.batch;
  return c;
}

std::vector<SweepRow> run_sweep(const SweepAxes& axes, const Workload& w, const SimConfig& base, unsigned threads) {
  auto nonempty = [](bool empty, const char* name) {
    if (empty) throw ValidationError(std::string("sweep axis '") + name + "' is empty");
  };
  nonempty(axes.m.empty(), "m");
  nonempty(axes.f_c.empty(), "f_c");
  nonempty(axes.core.empty(), "core");
  nonempty(axes.batch.empty(), "batch");
  nonempty(axes.parallelism.empty(), "parallelism");

  std::vector<SweepPoint> points;
  for (auto m : axes.m)
    for (auto f : axes.f_c)
      for (auto core : axes.core)
        for (auto b : axes.batch)
          for (const auto& [mode, n] : axes.parallelism) points.push_back({m, f, core, b, mode, n});
  for (const auto& p : points) configure_point(base, p, axes.sa_dataflow).validate();

  std::vector<std::optional<SweepRow>> rows(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        rows[i] = SweepRow{points[i], simulate(w, configure_point(base, points[i], axes.sa_dataflow))};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(points.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<SweepRow> out;
  out.reserve(rows.size());
  for (auto& r : rows) out.push_back(std::move(*r));
  return out;
}

std::pair<SimReport, SimReport> compare(const Workload& w, const SimConfig& base, Dataflow sa_dataflow) {
  SimConfig photo = base;
  photo.accelerator.core = CoreType::photo_core;
  photo.accelerator.dataflow = Dataflow::WS;
  SimReport a = simulate(w, photo);
  SimConfig sa = base;
  sa.accelerator.core = CoreType::systolic_array;
  sa.accelerator.dataflow = sa_dataflow;
  if (sa.accelerator.parallel_mode == ParallelMode::wdm) {
    sa.accelerator.parallel_mode = ParallelMode::data;
    sa.accelerator.n_cores = sa.accelerator.n_wdm;
    sa.accelerator.n_wdm = 1;
  }
  sa.batch = a.batch;
  return {std::move(a), simulate(w, sa)};
}

}  // namespace eposim
