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
#include <string>
#include <utility>
#include <vector>

#include "eposim/mesh.hpp"
#include "eposim/timing.hpp"

namespace eposim {

struct DacRef {
  int bits = 14;
  double power_w = 0.177;
  double rate_hz = 10e9;
};

struct AdcRef {
  double power_w = 0.029;
  double rate_hz = 5e9;
  int bits = 10;  // device resolution; the SNR target is b_out
};

/// Area per device in mm^2.
struct AreaTable {
  double mzi = 0.0025;
  double modulator = 0.01;
  double detector = 0.001;
  double adc = 0.03;
  double dac = 0.05;
  double pe = 0.0015;
  double sram_per_mb = 1.2;
  double digital_lane_unit = 0.002;
};

struct DeviceParams {
  double kappa = 3.0;
  int b_out = 8;
  int b_in = 10;
  int b_weight = 12;
  double q = 1.602176634e-19;
  double eta_mod_db = 1.2;
  double mzi_loss_db = 0.04;
  double eta_cpl_db = 2.0;
  double eta_det = 0.8;
  double eta_laser = 0.2;
  DacRef dac_ref;
  AdcRef adc;
  double e_o_j_per_bit = 20e-15;
  double o_e_j_per_bit = 297e-15;
  double dram_j_per_bit = 20e-12;
  double d2d_j_per_bit = 0.3e-12;
  double sram_j_per_bit = 0.05e-12;
  double pe_power_w = 0.5e-3;               // per systolic PE at sa_ref_hz
  double digital_lane_unit_power_w = 1.5e-3;  // per lane per logical unit
  AreaTable area;
  ErrorModel error_model{1.954, 3.919, 3.919};  // fit by calibrate_error_model(12345, 200)

  /// Throws ValidationError.
  void validate() const;
};

double db_to_transmissivity(double db);

/// Per-channel laser power for the 2m+1 MZI optical path, Delta f = f_c.
double laser_power_per_channel(std::int64_t m, double f_c, const DeviceParams& p);

/// Same FoM scaling: power doubles per extra bit, linear in rate.
double dac_power(int bits, double rate_hz, const DeviceParams& p);

struct ConverterPower {
  double input_dacs = 0.0;
  double weight_dacs = 0.0;
  double adcs = 0.0;
  double e_o = 0.0;
  double o_e = 0.0;
};

/// Weight-DAC count per mesh.
std::int64_t weight_dac_count(std::int64_t m, std::int64_t zeta);

ConverterPower converter_power(std::int64_t m, double f_c, double duty_weight, const AcceleratorConfig& cfg,
                               const DeviceParams& p);

struct Traffic {
  double sram_bytes = 0.0;
  double dram_bytes = 0.0;
  double d2d_bytes = 0.0;
};

struct TrafficPower {
  double sram = 0.0;
  double dram = 0.0;
  double d2d = 0.0;
};

TrafficPower traffic_energy(const Traffic& t, double elapsed_s, const DeviceParams& p);

struct DeviceCounts {
  std::int64_t mzis = 0;
  std::int64_t modulators = 0;
  std::int64_t detectors = 0;
  std::int64_t adcs = 0;
  std::int64_t input_dacs = 0;
  std::int64_t weight_dacs = 0;
  std::int64_t pes = 0;
  std::int64_t digital_lane_units = 0;
};

/// Component names in report order.
const std::vector<std::string>& power_components();
const std::vector<std::string>& area_components();

struct PowerReport {
  std::vector<std::pair<std::string, double>> watts;    // power_components() order
  std::vector<std::pair<std::string, double>> area_mm2;  // area_components() order
  double total_w = 0.0;
  double total_mm2 = 0.0;
  DeviceCounts devices;

  double watt(const std::string& name) const;
  double area(const std::string& name) const;
};

struct RollupInput {
  std::int64_t total_cycles = 0;
  std::int64_t weight_loads = 0;
  Traffic traffic;
  std::int64_t digital_lanes = 0;
  std::int64_t digital_units = 1;
};

DeviceCounts device_counts(const AcceleratorConfig& cfg, const DeviceParams& p, std::int64_t digital_units);

/// Power and area for the configured core type.
PowerReport rollup(const AcceleratorConfig& cfg, const DeviceParams& p, const RollupInput& in);

}  // namespace eposim
