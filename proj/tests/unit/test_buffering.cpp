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

#include <random>

#include "eposim/buffering.hpp"
#include "eposim/error.hpp"
#include "eposim/simulator.hpp"
#include "helpers.hpp"

using namespace eposim;

namespace {

MemoryTrace trace_of(std::vector<double> usage, double dt = 1.0) {
  MemoryTrace t;
  t.dt = dt;
  t.usage = std::move(usage);
  return t;
}

struct Instance {
  MemoryTrace trace;
  double x_input, x_max, bw;
};

Instance random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> bins(1, 12), cap(1, 16), step(1, 4);
  Instance in;
  const int n = bins(rng);
  in.x_max = cap(rng);
  std::uniform_int_distribution<int> use(0, int(in.x_max));
  std::vector<double> u(n);
  for (auto& x : u) x = use(rng);
  in.trace = trace_of(u);
  in.x_input = std::uniform_int_distribution<int>(0, int(in.x_max))(rng);
  in.bw = step(rng);
  return in;
}

// Usage sits at b x per_sample until the last bin, where the current batch has drained.
BatchProfile flat_profile(std::int64_t b, double per_sample, double in_per_sample, std::size_t bins) {
  BatchProfile p;
  p.trace.dt = 1.0;
  p.trace.usage.assign(bins, per_sample * double(b));
  p.trace.usage.back() = 0.0;
  p.input_bytes = in_per_sample * double(b);
  return p;
}

}  // namespace

TEST_SUITE("buffering") {
  TEST_CASE("flat trace hand example") {
    const TransferSchedule s = solve_schedule(trace_of(std::vector<double>(10, 0.0)), 4, 10, 1);
    const std::vector<double> expect{1, 2, 3, 4, 4, 4, 4, 4, 4, 4};
    CHECK(s.x_pcie == expect);
    CHECK(s.objective == 34);
    CHECK(s.feasible);
    CHECK(verify_optimal(trace_of(std::vector<double>(10, 0.0)), 4, 10, 1, s));
    // one more bin adds another full unit of 4
    CHECK(solve_schedule(trace_of(std::vector<double>(11, 0.0)), 4, 10, 1).objective == 38);
  }

  TEST_CASE("zero input is a feasible all-zero schedule") {
    const TransferSchedule s = solve_schedule(trace_of({3, 5, 2}), 0, 10, 1);
    CHECK(s.feasible);
    CHECK(s.objective == 0);
  }

  TEST_CASE("full SRAM at the last bin is infeasible") {
    const TransferSchedule s = solve_schedule(trace_of({0, 0, 10}), 2, 10, 5);
    CHECK_FALSE(s.feasible);
    REQUIRE(s.binding_bin.has_value());
    CHECK(*s.binding_bin == 2);
    CHECK(verify_optimal(trace_of({0, 0, 10}), 2, 10, 5, s));
  }

  TEST_CASE("verify_optimal rejects broken and suboptimal schedules") {
    const MemoryTrace t = trace_of(std::vector<double>(6, 0.0));
    TransferSchedule s = solve_schedule(t, 3, 8, 1);
    REQUIRE(verify_optimal(t, 3, 8, 1, s));
    TransferSchedule late = s;
    late.x_pcie = {0, 1, 2, 3, 3, 3};  // every transfer one bin later
    CHECK_FALSE(verify_optimal(t, 3, 8, 1, late));
    TransferSchedule fast = s;
    fast.x_pcie = {2, 3, 3, 3, 3, 3};  // exceeds the per-bin bandwidth
    CHECK_FALSE(verify_optimal(t, 3, 8, 1, fast));
    CHECK_THROWS_AS(verify_optimal(trace_of(std::vector<double>(13, 0.0)), 3, 8, 1, s), ValidationError);
    CHECK_THROWS_AS(verify_optimal(t, 3, 17, 1, s), ValidationError);
  }

  TEST_CASE("greedy matches exhaustive search on random instances") {
    std::mt19937_64 rng(2024);
    int feasible = 0;
    for (int k = 0; k < 1000; ++k) {
      const Instance in = random_instance(rng);
      const TransferSchedule s = solve_schedule(in.trace, in.x_input, in.x_max, in.bw);
      const auto opt = exhaustive_optimum(in.trace, in.x_input, in.x_max, in.bw);
      CHECK(opt.has_value() == s.feasible);
      if (opt) {
        ++feasible;
        CHECK(s.objective == *opt);
      }
      CHECK(verify_optimal(in.trace, in.x_input, in.x_max, in.bw, s));
    }
    CHECK(feasible > 300);
  }

  TEST_CASE("greedy dominates every feasible schedule prefix-wise") {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 300; ++k) {
      const Instance in = random_instance(rng);
      const TransferSchedule s = solve_schedule(in.trace, in.x_input, in.x_max, in.bw);
      if (!s.feasible) continue;
      // random feasible walks; reject any that violates a constraint
      for (int w = 0; w < 20; ++w) {
        std::vector<double> y;
        double prev = 0.0;
        bool ok = true;
        for (std::size_t t = 0; t < in.trace.usage.size(); ++t) {
          const double hi = std::min({prev + in.bw, in.x_input, in.x_max - in.trace.usage[t]});
          if (hi < prev) {
            ok = false;
            break;
          }
          const double x = std::uniform_int_distribution<int>(int(prev), int(hi))(rng);
          y.push_back(x);
          prev = x;
        }
        if (!ok) continue;
        for (std::size_t t = 0; t < y.size(); ++t) CHECK(s.x_pcie[t] >= y[t]);
      }
    }
  }

  TEST_CASE("schedule invariants") {
    std::mt19937_64 rng(9);
    for (int k = 0; k < 300; ++k) {
      const Instance in = random_instance(rng);
      const TransferSchedule s = solve_schedule(in.trace, in.x_input, in.x_max, in.bw);
      if (!s.feasible) continue;
      double prev = 0.0;
      for (std::size_t t = 0; t < s.x_pcie.size(); ++t) {
        CHECK(s.x_pcie[t] >= prev);
        CHECK(s.x_pcie[t] - prev <= in.bw * in.trace.dt);
        CHECK(in.trace.usage[t] + s.x_pcie[t] <= in.x_max);
        prev = s.x_pcie[t];
      }
      CHECK(s.x_pcie.back() == in.x_input);
    }
  }

  TEST_CASE("objective is monotone in bandwidth and capacity") {
    std::mt19937_64 rng(13);
    for (int k = 0; k < 300; ++k) {
      const Instance in = random_instance(rng);
      const double base = solve_schedule(in.trace, in.x_input, in.x_max, in.bw).objective;
      CHECK(solve_schedule(in.trace, in.x_input, in.x_max, in.bw + 1).objective >= base);
      CHECK(solve_schedule(in.trace, in.x_input, in.x_max + 1, in.bw).objective >= base);
    }
  }

  TEST_CASE("synthetic flat workload: double buffering gets exactly half") {
    const double x_max = 1000.0, per = x_max / 10;
    const BatchModel model = [&](std::int64_t b) { return flat_profile(b, per, 5.0, 50); };
    const BatchChoice opt = max_batch(model, x_max, 1e6);
    CHECK(opt.batch == 10);
    CHECK(double_buffering_batch(model, x_max) == 5);
    const BatchModel too_big = [&](std::int64_t b) { return flat_profile(b, 2 * x_max, 5.0, 50); };
    CHECK_THROWS_AS(max_batch(too_big, x_max, 1e6), InfeasibleError);
    const BatchModel over_half = [&](std::int64_t b) { return flat_profile(b, 0.6 * x_max, 5.0, 50); };
    CHECK(double_buffering_batch(over_half, x_max) == 0);
  }

  TEST_CASE("double buffering never beats the optimized batch on bundled workloads") {
    const SimConfig c = testing::default_config();
    for (const char* name : {"resnet50", "bertlarge", "rnnt"}) {
      const Workload w = testing::bundled(name);
      const BatchModel model = [&](std::int64_t b) { return batch_profile(w, c, b); };
      const std::int64_t dbl = double_buffering_batch(model, c.accelerator.act_sram_bytes);
      const std::int64_t opt = max_batch(model, c.accelerator.act_sram_bytes, c.accelerator.pcie_bytes_per_sec).batch;
      CAPTURE(name);
      CHECK(dbl >= 1);
      CHECK(dbl <= opt);
    }
  }

  TEST_CASE("rnnt optimized batch beats double buffering") {
    const SimConfig c = testing::default_config();
    const Workload w = testing::bundled("rnnt");
    const BatchModel model = [&](std::int64_t b) { return batch_profile(w, c, b); };
    CHECK(max_batch(model, c.accelerator.act_sram_bytes, c.accelerator.pcie_bytes_per_sec).batch >
          double_buffering_batch(model, c.accelerator.act_sram_bytes));
  }
}
