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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "eposim/buffering.hpp"
#include "eposim/config.hpp"
#include "eposim/error.hpp"
#include "eposim/mesh.hpp"
#include "eposim/report.hpp"
#include "eposim/simulator.hpp"
#include "eposim/workload.hpp"

#ifndef EPOSIM_DEFAULT_CONFIG
#define EPOSIM_DEFAULT_CONFIG ""
#endif

namespace {

using namespace eposim;

struct Globals {
  std::string config = EPOSIM_DEFAULT_CONFIG;
  std::string workload;
  std::string format = "table";
  std::uint64_t seed = 0;
  bool no_pipelining = false;
  bool double_buffering = false;
  std::size_t bins = 0;
  std::int64_t batch = 0;
};

SimFlags flags_of(const Globals& g) {
  SimFlags f;
  if (g.no_pipelining) f.pipelining = false;
  if (g.double_buffering) f.buffering = BufferingMode::double_buffering;
  if (g.bins > 0) f.bins = g.bins;
  if (g.batch > 0) f.batch = g.batch;
  return f;
}

SimConfig config_of(const Globals& g) {
  SimConfig c = g.config.empty() ? SimConfig{} : load_config(g.config);
  return apply_flags(c, flags_of(g));
}

Workload workload_of(const Globals& g) {
  if (g.workload.empty()) throw ConfigError("--workload is required");
  return load_workload(g.workload);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::pair<ParallelMode, std::int64_t> parse_parallel(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw ConfigError("parallelism '" + s + "' must look like mode:degree");
  try {
    return {parallel_mode_from_string(s.substr(0, colon)), std::stoll(s.substr(colon + 1))};
  } catch (const std::invalid_argument&) {
    throw ConfigError("parallelism '" + s + "' has a non-integer degree");
  }
}

// One usage value per line, optionally "time,bytes"; a header line is skipped.
MemoryTrace read_trace(const std::string& path, double dt) {
  std::istringstream in(read_file(path));
  MemoryTrace t;
  t.dt = dt;
  std::string line;
  std::size_t n = 0;
  std::vector<double> times;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) {
        t.usage.push_back(std::stod(line));
      } else {
        times.push_back(std::stod(line.substr(0, comma)));
        t.usage.push_back(std::stod(line.substr(comma + 1)));
      }
    } catch (const std::invalid_argument&) {
      if (t.usage.empty() && n == 1) continue;
      throw ParseError(path, n, "", "expected a number");
    }
  }
  if (t.usage.empty()) throw ParseError(path, n, "", "trace has no samples");
  if (times.size() >= 2) t.dt = times[1] - times[0];
  if (!(t.dt > 0.0)) throw ConfigError("trace bin width must be > 0 (set --dt or give a time column)");
  return t;
}

int run(int argc, char** argv) {
  CLI::App app{"Analytical performance, power and precision simulator for photonic DNN accelerators"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Configuration file")->capture_default_str();
  app.add_option("--workload", g.workload, "Workload file");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"table", "csv", "json"}));
  app.add_option("--seed", g.seed, "Seed for Monte-Carlo studies");
  app.add_flag("--no-pipelining", g.no_pipelining, "Serialize GEMM and non-GEMM work");
  app.add_flag("--double-buffering", g.double_buffering, "Use double buffering instead of the optimized schedule");
  app.add_option("--bins", g.bins, "Number of time bins for the memory trace");
  app.add_option("--batch", g.batch, "Fixed batch size (default: largest feasible)");

  auto* sim = app.add_subcommand("simulate", "Simulate one workload on one accelerator");

  auto* sweep = app.add_subcommand("sweep", "Cross-product sweep over accelerator parameters");
  SweepAxes axes;
  std::vector<std::string> cores{"photo_core"}, parallel{"data:1"};
  std::string sa_df = "OS";
  unsigned threads = 0;
  sweep->add_option("--m", axes.m, "Array sizes")->required();
  sweep->add_option("--fc", axes.f_c, "Clock frequencies in Hz");
  sweep->add_option("--core", cores, "Core types")->capture_default_str();
  sweep->add_option("--batches", axes.batch, "Batch sizes (0 selects the largest feasible)");
  sweep->add_option("--parallel", parallel, "Parallelism as mode:degree")->capture_default_str();
  sweep->add_option("--sa-dataflow", sa_df, "Systolic-array dataflow")->capture_default_str();
  sweep->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");

  auto* cmp = app.add_subcommand("compare", "Photo-core and systolic array side by side");
  cmp->add_option("--sa-dataflow", sa_df, "Systolic-array dataflow")->capture_default_str();

  auto* buf = app.add_subcommand("buffer-schedule", "Optimized next-batch transfer schedule");
  std::string trace_path;
  double dt = 0.0, x_input = -1.0, x_max = -1.0, bw = -1.0;
  buf->add_option("--trace", trace_path, "Usage trace (bytes per bin) instead of a workload");
  buf->add_option("--dt", dt, "Bin width in seconds for a bytes-only trace");
  buf->add_option("--input-bytes", x_input, "Next-batch input bytes (trace mode)");
  buf->add_option("--sram-bytes", x_max, "Activation SRAM capacity (default from config)");
  buf->add_option("--bandwidth", bw, "Transfer bandwidth in bytes/s (default from config)");

  auto* dec = app.add_subcommand("decompose", "Program a weight tile onto the MZI mesh");
  std::string matrix_path;
  int random_m = 0;
  dec->add_option("--matrix", matrix_path, "JSON file holding a square matrix as rows");
  dec->add_option("--random", random_m, "Decompose a random m x m matrix instead");

  auto* prec = app.add_subcommand("precision", "Monte-Carlo output bit-precision study");
  std::vector<int> sizes{8, 16, 32, 64};
  int trials = 200, vectors = 4;
  NoiseSpec noise;
  noise.b_in = 10;
  noise.b_weight = 12;
  noise.eps_dc = 1e-3;
  std::string mode_s = "error_corrected";
  prec->add_option("--m", sizes, "Mesh sizes")->capture_default_str();
  prec->add_option("--trials", trials, "Random tiles per size")->capture_default_str();
  prec->add_option("--vectors", vectors, "Input vectors per tile")->capture_default_str();
  prec->add_option("--eps-phi", noise.eps_phi, "Phase error std in radians")->capture_default_str();
  prec->add_option("--eps-dc", noise.eps_dc, "Coupler error std in radians")->capture_default_str();
  prec->add_option("--b-in", noise.b_in, "Input DAC bits")->capture_default_str();
  prec->add_option("--b-out", noise.b_out, "Output ADC bits")->capture_default_str();
  prec->add_option("--b-weight", noise.b_weight, "Phase DAC bits (0 disables)")->capture_default_str();
  prec->add_option("--mode", mode_s, "Programming mode")
      ->check(CLI::IsMember({"naive", "error_corrected"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const ReportFormat fmt = report_format_from_string(g.format);
  std::ostream& out = std::cout;

  if (*sim) {
    out << emit_report(simulate(workload_of(g), config_of(g)), fmt);
  } else if (*sweep) {
    for (const auto& c : cores) axes.core.push_back(core_type_from_string(c));
    for (const auto& p : parallel) axes.parallelism.push_back(parse_parallel(p));
    const SimConfig base = config_of(g);
    if (axes.f_c.empty()) axes.f_c.push_back(base.accelerator.f_c);
    if (axes.batch.empty()) axes.batch.push_back(g.batch);
    axes.sa_dataflow = dataflow_from_string(sa_df);
    out << emit_sweep(run_sweep(axes, workload_of(g), base, threads), fmt);
  } else if (*cmp) {
    const auto [pc, sa] = compare(workload_of(g), config_of(g), dataflow_from_string(sa_df));
    if (fmt == ReportFormat::json) {
      out << nlohmann::ordered_json{{"photo_core", report_to_json(pc)}, {"systolic_array", report_to_json(sa)}}.dump(2)
          << "\n";
    } else {
      std::vector<SweepRow> rows;
      rows.push_back({{pc.m, pc.f_c, CoreType::photo_core, pc.batch, ParallelMode::data, 1}, pc});
      rows.push_back({{sa.m, sa.f_c, CoreType::systolic_array, sa.batch, ParallelMode::data, 1}, sa});
      out << emit_sweep(rows, fmt);
    }
  } else if (*buf) {
    const SimConfig c = config_of(g);
    const double cap = x_max > 0.0 ? x_max : c.accelerator.act_sram_bytes;
    const double rate = bw > 0.0 ? bw : c.accelerator.pcie_bytes_per_sec;
    MemoryTrace trace;
    double input = x_input;
    if (!trace_path.empty()) {
      trace = read_trace(trace_path, dt);
      if (input < 0.0) throw ConfigError("--input-bytes is required with --trace");
    } else {
      const Workload w = workload_of(g);
      const std::int64_t b = g.batch > 0 ? g.batch : simulate(w, c).batch;
      if (b < 1) throw InfeasibleError("no feasible batch for '" + w.name + "'");
      const BatchProfile p = batch_profile(w, c, b);
      trace = p.trace;
      if (input < 0.0) input = p.input_bytes;
    }
    const TransferSchedule s = solve_schedule(trace, input, cap, rate);
    if (fmt == ReportFormat::json) {
      out << schedule_to_json(s, trace);
    } else {
      out << emit_trace_table(trace, s);
    }
    if (!s.feasible) throw InfeasibleError("next batch does not fit before the current batch ends");
  } else if (*dec) {
    Eigen::MatrixXd w;
    if (!matrix_path.empty()) {
      const auto j = nlohmann::json::parse(read_file(matrix_path), nullptr, true, true);
      if (!j.is_array() || j.empty()) throw ParseError(matrix_path, 1, "", "expected an array of rows");
      const auto n = static_cast<Eigen::Index>(j.size());
      w.resize(n, n);
      for (Eigen::Index r = 0; r < n; ++r) {
        if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != n) {
          throw ParseError(matrix_path, 1, "row " + std::to_string(r), "matrix must be square");
        }
        for (Eigen::Index k = 0; k < n; ++k) w(r, k) = j[r][k].get<double>();
      }
    } else if (random_m >= 2) {
      w = random_orthogonal(random_m, g.seed) * 0.5;
    } else {
      throw ConfigError("decompose needs --matrix or --random m (m >= 2)");
    }
    out << export_program(program_tile(w)) << "\n";
  } else if (*prec) {
    noise.seed = g.seed;
    const ProgrammingMode mode = mode_s == "naive" ? ProgrammingMode::naive : ProgrammingMode::error_corrected;
    const ErrorModel em = config_of(g).devices.error_model;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    if (fmt != ReportFormat::json) out << "m,trials,rms_error,measured_bits,model_bits\n";
    for (int m : sizes) {
      const PrecisionPoint p = precision_study(m, noise, trials, vectors, mode, em);
      if (fmt == ReportFormat::json) {
        rows.push_back({{"m", p.m},
                        {"trials", p.trials},
                        {"rms_error", p.rms_error},
                        {"measured_bits", p.measured_bits},
                        {"model_bits", p.model_bits}});
      } else {
        char line[160];
        std::snprintf(line, sizeof line, "%d,%d,%.6g,%.4f,%.4f\n", p.m, p.trials, p.rms_error, p.measured_bits,
                      p.model_bits);
        out << line;
      }
    }
    if (fmt == ReportFormat::json) out << rows.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "eposim: " << e.what() << "\n";
    return eposim::exit_code_for(e);
  }
}
