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

#include "eposim/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

#include "eposim/error.hpp"

namespace eposim {
namespace {

using oj = nlohmann::ordered_json;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string g17(double v) { return fmt("%.17g", v); }

oj timeline_json(const LayerTimeline& t) {
  return {{"source_layer", t.source_layer},
          {"gemm_cycles", t.gemm_cycles},
          {"nongemm_cycles", t.nongemm_cycles},
          {"overlapped_cycles", t.overlapped_cycles},
          {"stall_cycles", t.stall_cycles},
          {"total_cycles", t.total_cycles},
          {"act_sram_reads_bytes", t.act_sram_reads_bytes},
          {"act_sram_writes_bytes", t.act_sram_writes_bytes},
          {"weight_sram_reads_bytes", t.weight_sram_reads_bytes},
          {"mac_count", t.mac_count},
          {"weight_loads", t.weight_loads},
          {"occupied_macs_slots", t.occupied_macs_slots},
          {"occupancy", t.occupancy}};
}

const oj& at(const oj& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError("<report>", 1, key, "missing field");
  return *it;
}

template <class T>
T get(const oj& j, const char* key) {
  const oj& v = at(j, key);
  try {
    return v.get<T>();
  } catch (const oj::exception& e) {
    throw ParseError("<report>", 1, key, e.what());
  }
}

LayerTimeline timeline_from(const oj& j) {
  LayerTimeline t;
  t.source_layer = get<std::size_t>(j, "source_layer");
  t.gemm_cycles = get<std::int64_t>(j, "gemm_cycles");
  t.nongemm_cycles = get<std::int64_t>(j, "nongemm_cycles");
  t.overlapped_cycles = get<std::int64_t>(j, "overlapped_cycles");
  t.stall_cycles = get<std::int64_t>(j, "stall_cycles");
  t.total_cycles = get<std::int64_t>(j, "total_cycles");
  t.act_sram_reads_bytes = get<std::int64_t>(j, "act_sram_reads_bytes");
  t.act_sram_writes_bytes = get<std::int64_t>(j, "act_sram_writes_bytes");
  t.weight_sram_reads_bytes = get<std::int64_t>(j, "weight_sram_reads_bytes");
  t.mac_count = get<std::int64_t>(j, "mac_count");
  t.weight_loads = get<std::int64_t>(j, "weight_loads");
  t.occupied_macs_slots = get<std::int64_t>(j, "occupied_macs_slots");
  t.occupancy = get<double>(j, "occupancy");
  return t;
}

oj pairs_json(const std::vector<std::pair<std::string, double>>& v) {
  oj o = oj::object();
  for (const auto& [k, x] : v) o[k] = x;
  return o;
}

std::vector<std::pair<std::string, double>> pairs_from(const oj& o, const std::vector<std::string>& order) {
  std::vector<std::pair<std::string, double>> v;
  for (const auto& k : order) v.emplace_back(k, get<double>(o, k.c_str()));
  return v;
}

void flatten(const oj& j, const std::string& path, std::ostringstream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "." + std::to_string(i), out);
  } else if (j.is_string()) {
    std::string s = j.get<std::string>();
    std::string q;
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    out << path << ",\"" << q << "\"\n";
  } else if (j.is_boolean()) {
    out << path << ',' << (j.get<bool>() ? "true" : "false") << '\n';
  } else if (j.is_number_integer()) {
    out << path << ',' << j.dump() << '\n';
  } else {
    out << path << ',' << g17(j.get<double>()) << '\n';
  }
}

oj scalar_from_csv(const std::string& v, std::size_t line) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    std::string s;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      s += v[i];
      if (v[i] == '"') ++i;
    }
    return s;
  }
  if (v == "true") return true;
  if (v == "false") return false;
  const bool integral = v.find_first_of(".eEnN") == std::string::npos;
  try {
    std::size_t used = 0;
    if (integral) {
      const long long x = std::stoll(v, &used);
      if (used == v.size()) return static_cast<std::int64_t>(x);
    } else {
      const double x = std::stod(v, &used);
      if (used == v.size()) return x;
    }
  } catch (const std::exception&) {
  }
  throw ParseError("<csv>", line, "", "unrecognized value '" + v + "'");
}

void insert_path(oj& root, const std::string& path, oj value, std::size_t line) {
  oj* node = &root;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dot = path.find('.', pos);
    const std::string seg = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (seg.empty()) throw ParseError("<csv>", line, path, "empty path segment");
    const bool index = seg.find_first_not_of("0123456789") == std::string::npos;
    oj* child;
    if (index) {
      if (node->is_null()) *node = oj::array();
      if (!node->is_array()) throw ParseError("<csv>", line, path, "index into a non-array");
      const std::size_t k = std::stoul(seg);
      while (node->size() <= k) node->push_back(nullptr);
      child = &(*node)[k];
    } else {
      if (node->is_null()) *node = oj::object();
      if (!node->is_object()) throw ParseError("<csv>", line, path, "field of a non-object");
      child = &(*node)[seg];
    }
    if (dot == std::string::npos) {
      *child = std::move(value);
      return;
    }
    node = child;
    pos = dot + 1;
  }
}

std::string pad(const std::string& s, std::size_t w, bool right = true) {
  if (s.size() >= w) return s;
  return right ? std::string(w - s.size(), ' ') + s : s + std::string(w - s.size(), ' ');
}

}  // namespace

ReportFormat report_format_from_string(std::string_view s) {
  if (s == "table") return ReportFormat::table;
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  throw ValidationError("unknown report format '" + std::string(s) + "'");
}

oj report_to_json(const SimReport& r) {
  oj j;
  j["workload"] = r.workload;
  j["core"] = r.core;
  j["dataflow"] = r.dataflow;
  j["parallel_mode"] = r.parallel_mode;
  j["m"] = r.m;
  j["f_c"] = r.f_c;
  j["n_cores"] = r.n_cores;
  j["n_wdm"] = r.n_wdm;
  j["pipelining"] = r.pipelining;
  j["batch"] = r.batch;
  j["total_cycles"] = r.total_cycles;
  j["runtime_s"] = r.runtime_s;
  j["derived"] = {{"ips", r.derived.ips},
                  {"ips_per_w", r.derived.ips_per_w},
                  {"ips_per_w_mm2", r.derived.ips_per_w_mm2},
                  {"utilization", r.derived.utilization},
                  {"arithmetic_intensity", r.derived.arithmetic_intensity}};
  j["roofline"] = {{"ai", r.roofline.ai},
                   {"attained_ips", r.roofline.attained_ips},
                   {"peak_ips", r.roofline.peak_ips},
                   {"mem_ceiling_ips", r.roofline.mem_ceiling_ips}};
  j["buffering"] = {{"mode", r.buffering.mode},
                    {"double_buffering_batch", r.buffering.double_buffering_batch},
                    {"peak_act_bytes", r.buffering.peak_act_bytes},
                    {"input_bytes", r.buffering.input_bytes},
                    {"memory_feasible", r.buffering.memory_feasible},
                    {"schedule_feasible", r.buffering.schedule_feasible},
                    {"schedule_objective", r.buffering.schedule_objective}};
  const DeviceCounts& d = r.power.devices;
  j["power"] = {{"watts", pairs_json(r.power.watts)},
                {"total_w", r.power.total_w},
                {"area_mm2", pairs_json(r.power.area_mm2)},
                {"total_mm2", r.power.total_mm2},
                {"devices",
                 {{"mzis", d.mzis},
                  {"modulators", d.modulators},
                  {"detectors", d.detectors},
                  {"adcs", d.adcs},
                  {"input_dacs", d.input_dacs},
                  {"weight_dacs", d.weight_dacs},
                  {"pes", d.pes},
                  {"digital_lane_units", d.digital_lane_units}}}};
  j["total"] = timeline_json(r.total);
  oj layers = oj::array();
  for (const auto& l : r.layers) {
    oj e = {{"name", l.name}, {"kind", l.kind}};
    const oj t = timeline_json(l.timeline);
    for (const auto& [k, v] : t.items()) e[k] = v;
    layers.push_back(e);
  }
  j["layers"] = layers;
  return j;
}

SimReport report_from_json(const oj& j) {
  SimReport r;
  r.workload = get<std::string>(j, "workload");
  r.core = get<std::string>(j, "core");
  r.dataflow = get<std::string>(j, "dataflow");
  r.parallel_mode = get<std::string>(j, "parallel_mode");
  r.m = get<std::int64_t>(j, "m");
  r.f_c = get<double>(j, "f_c");
  r.n_cores = get<std::int64_t>(j, "n_cores");
  r.n_wdm = get<std::int64_t>(j, "n_wdm");
  r.pipelining = get<bool>(j, "pipelining");
  r.batch = get<std::int64_t>(j, "batch");
  r.total_cycles = get<std::int64_t>(j, "total_cycles");
  r.runtime_s = get<double>(j, "runtime_s");
  const oj& dv = at(j, "derived");
  r.derived = {get<double>(dv, "ips"), get<double>(dv, "ips_per_w"), get<double>(dv, "ips_per_w_mm2"),
               get<double>(dv, "utilization"), get<double>(dv, "arithmetic_intensity")};
  const oj& rf = at(j, "roofline");
  r.roofline = {get<double>(rf, "ai"), get<double>(rf, "attained_ips"), get<double>(rf, "peak_ips"),
                get<double>(rf, "mem_ceiling_ips")};
  const oj& b = at(j, "buffering");
  r.buffering = {get<std::string>(b, "mode"),         get<std::int64_t>(b, "double_buffering_batch"),
                 get<double>(b, "peak_act_bytes"),    get<double>(b, "input_bytes"),
                 get<bool>(b, "memory_feasible"),     get<bool>(b, "schedule_feasible"),
                 get<double>(b, "schedule_objective")};
  const oj& p = at(j, "power");
  r.power.watts = pairs_from(at(p, "watts"), power_components());
  r.power.total_w = get<double>(p, "total_w");
  r.power.area_mm2 = pairs_from(at(p, "area_mm2"), area_components());
  r.power.total_mm2 = get<double>(p, "total_mm2");
  const oj& d = at(p, "devices");
  r.power.devices = {get<std::int64_t>(d, "mzis"),       get<std::int64_t>(d, "modulators"),
                     get<std::int64_t>(d, "detectors"),  get<std::int64_t>(d, "adcs"),
                     get<std::int64_t>(d, "input_dacs"), get<std::int64_t>(d, "weight_dacs"),
                     get<std::int64_t>(d, "pes"),        get<std::int64_t>(d, "digital_lane_units")};
  r.total = timeline_from(at(j, "total"));
  for (const oj& e : at(j, "layers")) {
    r.layers.push_back({get<std::string>(e, "name"), get<std::string>(e, "kind"), timeline_from(e)});
  }
  return r;
}

bool SimReport::operator==(const SimReport& o) const { return report_to_json(*this) == report_to_json(o); }

std::string emit_report(const SimReport& r, ReportFormat f) {
  if (f == ReportFormat::json) return report_to_json(r).dump(2) + "\n";
  if (f == ReportFormat::csv) {
    std::ostringstream out;
    out << "field,value\n";
    flatten(report_to_json(r), "", out);
    return out.str();
  }
  std::ostringstream o;
  o << "workload " << r.workload << "  core " << r.core << " (" << r.dataflow << ")  m " << r.m << "  f_c "
    << fmt("%.4g", r.f_c) << " Hz  parallel " << r.parallel_mode << " x" << std::max(r.n_cores, r.n_wdm)
    << "  pipelining " << (r.pipelining ? "on" : "off") << "\n";
  o << "batch " << r.batch << "  cycles " << r.total_cycles << "  runtime " << fmt("%.6g", r.runtime_s) << " s\n\n";
  o << "IPS " << fmt("%.6g", r.derived.ips) << "  IPS/W " << fmt("%.6g", r.derived.ips_per_w) << "  IPS/(W*mm2) "
    << fmt("%.6g", r.derived.ips_per_w_mm2) << "  utilization " << fmt("%.4f", r.derived.utilization)
    << "  MAC/byte " << fmt("%.4g", r.derived.arithmetic_intensity) << "\n";
  o << "roofline  ai " << fmt("%.6g", r.roofline.ai) << "  attained " << fmt("%.6g", r.roofline.attained_ips)
    << "  peak " << fmt("%.6g", r.roofline.peak_ips) << "  mem_ceiling " << fmt("%.6g", r.roofline.mem_ceiling_ips)
    << "\n";
  o << "buffering " << r.buffering.mode << "  peak act " << fmt("%.6g", r.buffering.peak_act_bytes) << " B"
    << "  double-buffering batch " << r.buffering.double_buffering_batch << "  feasible "
    << (r.buffering.schedule_feasible ? "yes" : "no") << "\n\n";

  o << pad("component", 14, false) << pad("watts", 14) << pad("%", 9) << "\n";
  for (const auto& [k, v] : r.power.watts) {
    o << pad(k, 14, false) << pad(fmt("%.6g", v), 14) << pad(fmt("%.2f", 100.0 * v / r.power.total_w), 9) << "\n";
  }
  o << pad("total", 14, false) << pad(fmt("%.6g", r.power.total_w), 14) << pad("100.00", 9) << "\n\n";
  o << pad("area", 14, false) << pad("mm2", 14) << pad("%", 9) << "\n";
  for (const auto& [k, v] : r.power.area_mm2) {
    o << pad(k, 14, false) << pad(fmt("%.6g", v), 14) << pad(fmt("%.2f", 100.0 * v / r.power.total_mm2), 9) << "\n";
  }
  o << pad("total", 14, false) << pad(fmt("%.6g", r.power.total_mm2), 14) << pad("100.00", 9) << "\n\n";

  o << pad("layer", 22, false) << pad("kind", 18, false) << pad("gemm", 14) << pad("nongemm", 12) << pad("overlap", 12)
    << pad("stall", 12) << pad("total", 14) << pad("occupancy", 10) << "\n";
  for (const auto& l : r.layers) {
    const LayerTimeline& t = l.timeline;
    o << pad(l.name, 22, false) << pad(l.kind, 18, false) << pad(std::to_string(t.gemm_cycles), 14)
      << pad(std::to_string(t.nongemm_cycles), 12) << pad(std::to_string(t.overlapped_cycles), 12)
      << pad(std::to_string(t.stall_cycles), 12) << pad(std::to_string(t.total_cycles), 14)
      << pad(fmt("%.4f", t.occupancy), 10) << "\n";
  }
  return o.str();
}

SimReport parse_report(std::string_view text, ReportFormat f) {
  if (f == ReportFormat::table) throw ValidationError("table reports are not machine-readable");
  if (f == ReportFormat::json) {
    oj j;
    try {
      j = oj::parse(text);
    } catch (const oj::parse_error& e) {
      throw ParseError("<report>", 1, "", e.what());
    }
    return report_from_json(j);
  }
  oj root = oj::object();
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || (n == 1 && line == "field,value")) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("<csv>", n, "", "expected path,value");
    insert_path(root, line.substr(0, comma), scalar_from_csv(line.substr(comma + 1), n), n);
  }
  return report_from_json(root);
}

std::string emit_sweep(const std::vector<SweepRow>& rows, ReportFormat f) {
  if (f == ReportFormat::json) {
    oj a = oj::array();
    for (const auto& row : rows) {
      a.push_back({{"point",
                    {{"m", row.point.m},
                     {"f_c", row.point.f_c},
                     {"core", to_string(row.point.core)},
                     {"batch", row.point.batch},
                     {"mode", to_string(row.point.mode)},
                     {"degree", row.point.degree}}},
                   {"report", report_to_json(row.report)}});
    }
    return a.dump(2) + "\n";
  }
  const std::vector<std::string> cols{"m", "f_c", "core", "mode", "degree", "batch", "total_cycles", "ips",
                                      "total_w", "ips_per_w", "ips_per_w_mm2", "utilization", "laser_share",
                                      "ai", "peak_ips", "mem_ceiling_ips"};
  std::ostringstream o;
  const bool csv = f == ReportFormat::csv;
  for (std::size_t i = 0; i < cols.size(); ++i) o << (csv ? (i ? "," : "") + cols[i] : pad(cols[i], 16));
  o << "\n";
  for (const auto& row : rows) {
    const SimReport& r = row.report;
    const std::vector<std::string> cells{
        std::to_string(row.point.m), g17(row.point.f_c), std::string(to_string(row.point.core)),
        std::string(to_string(row.point.mode)), std::to_string(row.point.degree), std::to_string(r.batch),
        std::to_string(r.total_cycles), g17(r.derived.ips), g17(r.power.total_w), g17(r.derived.ips_per_w),
        g17(r.derived.ips_per_w_mm2), g17(r.derived.utilization), g17(r.power.watt("laser") / r.power.total_w),
        g17(r.roofline.ai), g17(r.roofline.peak_ips), g17(r.roofline.mem_ceiling_ips)};
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (csv) {
        o << (i ? "," : "") << cells[i];
      } else {
        std::string c = cells[i];
        if (i >= 7) c = fmt("%.5g", std::stod(c));
        o << pad(c, 16);
      }
    }
    o << "\n";
  }
  return o.str();
}

std::string emit_trace_table(const MemoryTrace& trace, const TransferSchedule& s) {
  std::ostringstream o;
  o << "time_s,current_bytes,next_batch_bytes\n";
  for (std::size_t k = 0; k < trace.usage.size(); ++k) {
    o << g17(trace.dt * double(k + 1)) << ',' << g17(trace.usage[k]) << ','
      << g17(k < s.x_pcie.size() ? s.x_pcie[k] : 0.0) << "\n";
  }
  return o.str();
}

std::string schedule_to_json(const TransferSchedule& s, const MemoryTrace& trace) {
  oj j;
  j["dt"] = s.dt;
  j["feasible"] = s.feasible;
  j["objective"] = s.objective;
  j["binding_bin"] = s.binding_bin ? oj(*s.binding_bin) : oj(nullptr);
  j["x_pcie"] = s.x_pcie;
  j["usage"] = trace.usage;
  return j.dump(1) + "\n";
}

}  // namespace eposim
