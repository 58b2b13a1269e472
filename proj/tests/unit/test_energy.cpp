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

#include <doctest.h>

#include <cmath>
#include <random>

#include "eposim/energy.hpp"
#include "eposim/error.hpp"
#include "eposim/simulator.hpp"
#include "helpers.hpp"

using namespace eposim;

namespace {

// Independent evaluation of the laser link budget, every loss written out in linear units.
double laser_oracle(double m, double fc, double b_out, double kappa, double eta_det, double eta_laser,
                    double mod_db, double mzi_db, double cpl_db) {
  const double snr_total = kappa * std::pow(2.0, b_out);
  const double q = 1.602176634e-19;
  const double mzis_on_path = 2.0 * m + 1.0;
  const double t_array = std::pow(10.0, -(mzi_db * mzis_on_path) / 10.0);
  const double t_mod = std::pow(10.0, -mod_db / 10.0);
  const double t_cpl = std::pow(10.0, -cpl_db / 10.0);
  return snr_total * snr_total * q * fc / 4.0 / (eta_det * t_array * t_mod * t_cpl * eta_laser);
}

RollupInput simple_input(std::int64_t cycles) {
  RollupInput in;
  in.total_cycles = cycles;
  in.weight_loads = 100;
  in.traffic = {1e6, 1e5, 1e6};
  in.digital_lanes = 128;
  in.digital_units = 10;
  return in;
}

}  // namespace

TEST_SUITE("energy") {
  TEST_CASE("dac scaling matches the published figures") {
    const DeviceParams p;
    CHECK(dac_power(14, 10e9, p) == doctest::Approx(0.177).epsilon(1e-12));
    CHECK(dac_power(12, 10e9, p) == doctest::Approx(0.04425).epsilon(1e-12));
    CHECK(std::round(dac_power(10, 10e9, p) * 1e5) / 1e5 == doctest::Approx(0.01106));
    for (int b = 2; b <= 14; ++b) CHECK(dac_power(b - 1, 10e9, p) == dac_power(b, 10e9, p) / 2);
    CHECK_THROWS_AS(dac_power(15, 10e9, p), ValidationError);
    CHECK(dac_power(12, 5e9, p) == doctest::Approx(0.04425 / 2));
  }

  TEST_CASE("laser power matches an independent evaluation") {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> mm(2, 512), bits(4, 12);
    std::uniform_real_distribution<double> fc(1e8, 5e10), eta(0.05, 1.0);
    for (int t = 0; t < 200; ++t) {
      DeviceParams p;
      p.b_out = bits(rng);
      p.eta_det = eta(rng);
      p.eta_laser = eta(rng);
      const int m = mm(rng);
      const double f = fc(rng);
      const double ref = laser_oracle(m, f, p.b_out, p.kappa, p.eta_det, p.eta_laser, p.eta_mod_db, p.mzi_loss_db,
                                      p.eta_cpl_db);
      CHECK(std::abs(laser_power_per_channel(m, f, p) / ref - 1.0) < 1e-9);
    }
  }

  TEST_CASE("laser power grows exponentially with mesh depth") {
    const DeviceParams p;
    for (int m : {8, 64, 128, 256}) {
      const double ratio = laser_power_per_channel(2 * m, 10e9, p) / laser_power_per_channel(m, 10e9, p);
      CHECK(std::abs(ratio / std::pow(10.0, 0.008 * m) - 1.0) < 1e-12);
    }
  }

  TEST_CASE("laser monotonicity") {
    const DeviceParams p;
    const double base = laser_power_per_channel(128, 10e9, p);
    CHECK(laser_power_per_channel(129, 10e9, p) > base);
    CHECK(laser_power_per_channel(128, 11e9, p) > base);
    DeviceParams q = p;
    q.b_out += 1;
    CHECK(laser_power_per_channel(128, 10e9, q) > base);
    q = p;
    q.kappa *= 1.1;
    CHECK(laser_power_per_channel(128, 10e9, q) > base);
    q = p;
    q.eta_det = 0.9;
    CHECK(laser_power_per_channel(128, 10e9, q) < base);
    q = p;
    q.eta_laser = 0.3;
    CHECK(laser_power_per_channel(128, 10e9, q) < base);
    q = p;
    q.mzi_loss_db = 0.03;
    CHECK(laser_power_per_channel(128, 10e9, q) < base);
    q = p;
    q.kappa = 0.0;
    CHECK(laser_power_per_channel(128, 10e9, q) == 0.0);
  }

  TEST_CASE("weight dac count and duty") {
    CHECK(weight_dac_count(128, 100) == 164);
    const DeviceParams p;
    AcceleratorConfig a;
    CHECK(converter_power(128, 10e9, 0.0, a, p).weight_dacs == 0.0);
    const ConverterPower c = converter_power(128, 10e9, 1.0, a, p);
    CHECK(c.weight_dacs == doctest::Approx(164 * 0.04425));
    CHECK(c.input_dacs == doctest::Approx(128 * dac_power(10, 10e9, p)));
    CHECK(c.adcs == doctest::Approx(128 * 2 * 0.029));
    CHECK(c.e_o == doctest::Approx(20e-15 * 10 * 128 * 10e9));
    CHECK(c.o_e == doctest::Approx(297e-15 * 8 * 128 * 10e9));
    CHECK_THROWS_AS(converter_power(128, 10e9, 1.5, a, p), ValidationError);
  }

  TEST_CASE("wdm saves MZIs and weight DACs against data parallel") {
    const DeviceParams p;
    for (std::int64_t n : {2, 4, 8}) {
      AcceleratorConfig d, w;
      d.n_cores = n;
      w.parallel_mode = ParallelMode::wdm;
      w.n_wdm = n;
      const DeviceCounts cd = device_counts(d, p, 10), cw = device_counts(w, p, 10);
      CHECK(cd.mzis - cw.mzis == (n - 1) * 128 * 128);
      CHECK(cd.weight_dacs - cw.weight_dacs == (n - 1) * weight_dac_count(128, 100));
      CHECK(cd.input_dacs == cw.input_dacs);
      CHECK(cd.adcs == cw.adcs);
      const PowerReport rd = rollup(d, p, simple_input(100000)), rw = rollup(w, p, simple_input(100000));
      CHECK(rw.total_mm2 < rd.total_mm2);
    }
  }

  TEST_CASE("traffic energy") {
    const DeviceParams p;
    const TrafficPower z = traffic_energy({}, 1.0, p);
    CHECK(z.sram + z.dram + z.d2d == 0.0);
    CHECK(traffic_energy({0, 1e9, 0}, 1.0, p).dram == doctest::Approx(0.16));
    CHECK(traffic_energy({0, 1e9, 0}, 0.5, p).dram == doctest::Approx(0.32));
    CHECK_THROWS_AS(traffic_energy({}, 0.0, p), ValidationError);
  }

  TEST_CASE("rollup is additive and nonnegative") {
    const DeviceParams p;
    for (CoreType core : {CoreType::photo_core, CoreType::systolic_array}) {
      AcceleratorConfig a;
      a.core = core;
      if (core == CoreType::systolic_array) a.dataflow = Dataflow::OS;
      const PowerReport r = rollup(a, p, simple_input(5000000));
      double sum = 0.0;
      for (const auto& [k, v] : r.watts) {
        CHECK(v >= 0.0);
        sum += v;
      }
      CHECK(std::abs(sum - r.total_w) <= 1e-12 * r.total_w);
      double area = 0.0;
      for (const auto& [k, v] : r.area_mm2) area += v;
      CHECK(std::abs(area - r.total_mm2) <= 1e-12 * r.total_mm2);
      REQUIRE(r.watts.size() == power_components().size());
    }
  }

  TEST_CASE("zeroed optics leave only electronic terms") {
    DeviceParams p;
    p.kappa = 0.0;
    p.dac_ref.power_w = 0.0;
    p.adc.power_w = 0.0;
    p.e_o_j_per_bit = 0.0;
    p.o_e_j_per_bit = 0.0;
    p.d2d_j_per_bit = 0.0;
    const PowerReport r = rollup(AcceleratorConfig{}, p, simple_input(1000000));
    for (const char* k : {"laser", "input_dacs", "weight_dacs", "adcs", "e_o", "o_e", "d2d", "pes"}) {
      CHECK(r.watt(k) == 0.0);
    }
    CHECK(r.total_w == doctest::Approx(r.watt("sram") + r.watt("dram") + r.watt("digital_unit")));
    CHECK(r.total_w > 0.0);
  }

  TEST_CASE("systolic PE power is quadratic in m") {
    const DeviceParams p;
    AcceleratorConfig a;
    a.core = CoreType::systolic_array;
    a.dataflow = Dataflow::OS;
    a.m = 64;
    const double small = rollup(a, p, simple_input(1000000)).watt("pes");
    a.m = 128;
    CHECK(rollup(a, p, simple_input(1000000)).watt("pes") == doctest::Approx(4 * small));
  }

  TEST_CASE("laser share rises with m on resnet50") {
    SimConfig c = testing::default_config();
    c.batch = 16;
    const Workload w = testing::bundled("resnet50");
    double prev = 0.0;
    for (std::int64_t m : {64, 128, 256}) {
      c.accelerator.m = m;
      const PowerReport r = simulate(w, c).power;
      const double share = r.watt("laser") / r.total_w;
      CHECK(share > prev);
      prev = share;
    }
  }

  TEST_CASE("device parameter validation") {
    DeviceParams p;
    p.eta_det = 1.5;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = {};
    p.mzi_loss_db = -0.1;
    CHECK_THROWS_AS(p.validate(), ValidationError);
  }
}
