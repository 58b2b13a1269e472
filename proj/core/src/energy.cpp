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

#include "eposim/energy.hpp"

#include <algorithm>
#include <cmath>

#include "eposim/error.hpp"

namespace eposim {

void DeviceParams::validate() const {
  auto in01 = [](double v, const char* n) {
    if (!(v > 0.0 && v <= 1.0)) throw ValidationError(std::string("devices ") + n + " must lie in (0, 1]");
  };
  auto nonneg = [](double v, const char* n) {
    if (!(v >= 0.0)) throw ValidationError(std::string("devices ") + n + " must be >= 0");
  };
  in01(eta_det, "eta_det");
  in01(eta_laser, "eta_laser");
  nonneg(kappa, "kappa");
  nonneg(eta_mod_db, "eta_mod_db");
  nonneg(mzi_loss_db, "mzi_loss_db");
  nonneg(eta_cpl_db, "eta_cpl_db");
  nonneg(e_o_j_per_bit, "e_o_j_per_bit");
  nonneg(o_e_j_per_bit, "o_e_j_per_bit");
  nonneg(dram_j_per_bit, "dram_j_per_bit");
  nonneg(d2d_j_per_bit, "d2d_j_per_bit");
  nonneg(sram_j_per_bit, "sram_j_per_bit");
  nonneg(pe_power_w, "pe_power_w");
  nonneg(digital_lane_unit_power_w, "digital_lane_unit_power_w");
  nonneg(dac_ref.power_w, "dac_ref.power_w");
  nonneg(adc.power_w, "adc.power_w");
  if (!(dac_ref.rate_hz > 0.0) || !(adc.rate_hz > 0.0)) throw ValidationError("devices converter rates must be > 0");
  if (dac_ref.bits < 1 || b_in < 1 || b_weight < 1 || b_out < 1) throw ValidationError("devices bit widths must be >= 1");
  for (double a : {area.mzi, area.modulator, area.detector, area.adc, area.dac, area.pe, area.sram_per_mb,
                   area.digital_lane_unit}) {
    nonneg(a, "area entries");
  }
  nonneg(error_model.c1, "error_model.c1");
  nonneg(error_model.c2, "error_model.c2");
  nonneg(error_model.c3, "error_model.c3");
}

double db_to_transmissivity(double db) { return std::pow(10.0, -db / 10.0); }

double laser_power_per_channel(std::int64_t m, double f_c, const DeviceParams& p) {
  if (m < 2) throw ValidationError("laser power needs m >= 2");
  const double snr = p.kappa * std::ldexp(1.0, p.b_out);
  const double eta_array = db_to_transmissivity(p.mzi_loss_db * double(2 * m + 1));
  const double eta = p.eta_det * eta_array * db_to_transmissivity(p.eta_mod_db) *
                     db_to_transmissivity(p.eta_cpl_db) * p.eta_laser;
  return snr * snr * (p.q * f_c / 4.0) / eta;
}

double dac_power(int bits, double rate_hz, const DeviceParams& p) {
  if (bits < 1 || bits > p.dac_ref.bits) {
    throw ValidationError("DAC bits must lie in [1, " + std::to_string(p.dac_ref.bits) + "]");
  }
  return p.dac_ref.power_w / std::ldexp(1.0, p.dac_ref.bits - bits) * (rate_hz / p.dac_ref.rate_hz);
}

std::int64_t weight_dac_count(std::int64_t m, std::int64_t zeta) { return (m * m + zeta - 1) / zeta; }

namespace {
std::int64_t adcs_per_channel(double f_c, const DeviceParams& p) {
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(f_c / p.adc.rate_hz - 1e-9)));
}
}  // namespace

ConverterPower converter_power(std::int64_t m, double f_c, double duty, const AcceleratorConfig& cfg,
                               const DeviceParams& p) {
  if (duty < 0.0 || duty > 1.0) throw ValidationError("weight DAC duty must lie in [0, 1]");
  const double cores = double(cfg.n_cores);
  const double streams = double(cfg.n_wdm) * cores;
  const double dm = double(m);
  ConverterPower c;
  c.input_dacs = dm * dac_power(p.b_in, f_c, p) * streams;
  c.weight_dacs = double(weight_dac_count(m, cfg.zeta)) * dac_power(p.b_weight, p.dac_ref.rate_hz, p) * duty * cores;
  c.adcs = dm * double(adcs_per_channel(f_c, p)) * p.adc.power_w * streams;
  c.e_o = p.e_o_j_per_bit * p.b_in * dm * f_c * streams;
  c.o_e = p.o_e_j_per_bit * p.b_out * dm * f_c * streams;
  return c;
}

TrafficPower traffic_energy(const Traffic& t, double elapsed_s, const DeviceParams& p) {
  if (!(elapsed_s > 0.0)) throw ValidationError("elapsed time must be > 0");
  return {t.sram_bytes * 8.0 * p.sram_j_per_bit / elapsed_s, t.dram_bytes * 8.0 * p.dram_j_per_bit / elapsed_s,
          t.d2d_bytes * 8.0 * p.d2d_j_per_bit / elapsed_s};
}

const std::vector<std::string>& power_components() {
  static const std::vector<std::string> k{"laser", "input_dacs", "weight_dacs", "adcs", "e_o", "o_e",
                                          "sram", "dram", "d2d", "digital_unit", "pes"};
  return k;
}

const std::vector<std::string>& area_components() {
  static const std::vector<std::string> k{"mzis", "modulators", "detectors", "adcs", "dacs", "pes", "sram",
                                          "digital_unit"};
  return k;
}

double PowerReport::watt(const std::string& name) const {
  for (const auto& [k, v] : watts) if (k == name) return v;
  throw InvariantError("unknown power component '" + name + "'");
}

double PowerReport::area(const std::string& name) const {
  for (const auto& [k, v] : area_mm2) if (k == name) return v;
  throw InvariantError("unknown area component '" + name + "'");
}

DeviceCounts device_counts(const AcceleratorConfig& cfg, const DeviceParams& p, std::int64_t digital_units) {
  DeviceCounts d;
  const std::int64_t m = cfg.m, cores = cfg.n_cores, streams = cfg.n_cores * cfg.n_wdm;
  d.digital_lane_units = m * digital_units * streams;
  if (cfg.core == CoreType::photo_core) {
    d.mzis = m * m * cores;  // m(m-1) mesh MZIs plus m attenuators
    d.modulators = m * streams;
    d.detectors = m * streams;
    d.adcs = m * adcs_per_channel(cfg.f_c, p) * streams;
    d.input_dacs = m * streams;
    d.weight_dacs = weight_dac_count(m, cfg.zeta) * cores;
  } else {
    d.pes = m * m * static_cast<std::int64_t>(std::ceil(cfg.replicas() - 1e-9)) * cores;
  }
  return d;
}

PowerReport rollup(const AcceleratorConfig& cfg, const DeviceParams& p, const RollupInput& in) {
  cfg.validate();
  p.validate();
  if (in.total_cycles <= 0) throw InvariantError("rollup needs a positive cycle count");
  const double elapsed = double(in.total_cycles) / cfg.f_c;
  const TrafficPower tp = traffic_energy(in.traffic, elapsed, p);
  const DeviceCounts dev = device_counts(cfg, p, in.digital_units);
  const double digital = p.digital_lane_unit_power_w * double(dev.digital_lane_units);

  ConverterPower conv;
  double laser = 0.0, pes = 0.0, d2d = 0.0;
  if (cfg.core == CoreType::photo_core) {
    const double duty =
        std::min(1.0, double(in.weight_loads) * cfg.t_prog / (double(cfg.physical_cores()) * elapsed));
    conv = converter_power(cfg.m, cfg.f_c, duty, cfg, p);
    laser = double(cfg.m) * laser_power_per_channel(cfg.m, cfg.f_c, p) * double(cfg.n_wdm * cfg.n_cores);
    d2d = tp.d2d;
  } else {
    pes = cfg.replicas() * double(cfg.m * cfg.m) * p.pe_power_w * double(cfg.n_cores);
  }

  PowerReport r;
  r.devices = dev;
  r.watts = {{"laser", laser},       {"input_dacs", conv.input_dacs}, {"weight_dacs", conv.weight_dacs},
             {"adcs", conv.adcs},    {"e_o", conv.e_o},               {"o_e", conv.o_e},
             {"sram", tp.sram},      {"dram", tp.dram},               {"d2d", d2d},
             {"digital_unit", digital}, {"pes", pes}};
  const double sram_mb = (cfg.act_sram_bytes + cfg.weight_sram_bytes) / 1e6;
  r.area_mm2 = {{"mzis", double(dev.mzis) * p.area.mzi},
                {"modulators", double(dev.modulators) * p.area.modulator},
                {"detectors", double(dev.detectors) * p.area.detector},
                {"adcs", double(dev.adcs) * p.area.adc},
                {"dacs", double(dev.input_dacs + dev.weight_dacs) * p.area.dac},
                {"pes", double(dev.pes) * p.area.pe},
                {"sram", sram_mb * p.area.sram_per_mb},
                {"digital_unit", double(dev.digital_lane_units) * p.area.digital_lane_unit}};
  for (const auto& [k, v] : r.watts) r.total_w += v;
  for (const auto& [k, v] : r.area_mm2) r.total_mm2 += v;
  return r;
}

}  // namespace eposim
