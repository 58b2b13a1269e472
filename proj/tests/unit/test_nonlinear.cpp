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

#include "eposim/error.hpp"
#include "eposim/nonlinear.hpp"

using namespace eposim;

TEST_SUITE("nonlinear") {
  TEST_CASE("relu over one wave takes two cycles at f_c") {
    for (double fc : {1e9, 5e9, 10e9}) {
      const DigitalUnitConfig du = DigitalUnitConfig::defaults(128, fc);
      CHECK(du.n_units() == std::int64_t(std::ceil(fc / du.f_asic)));
      CHECK(nongemm_native_cycles({NonGemmTag::relu, 128}, du) == 2);
      CHECK(nongemm_cycles({NonGemmTag::relu, 128}, du) == 2);
    }
  }

  TEST_CASE("softmax walk-through with the documented override") {
    DigitalUnitConfig du = DigitalUnitConfig::defaults(128, 1e9);
    du.stage_cycles[ArithUnit::max] = {1, 2};
    du.recipes[NonGemmTag::softmax] = {{{ArithUnit::exp, 1}, {ArithUnit::max, 1}, {ArithUnit::div, 1}}, false};
    // issue 1 + 1 + 4 per wave, one wave, plus the deepest stage (div, 8)
    CHECK(nongemm_native_cycles({NonGemmTag::softmax, 128}, du) == 14);
  }

  TEST_CASE("default softmax adds a tree reduction") {
    const DigitalUnitConfig du = DigitalUnitConfig::defaults(128, 1e9);
    CHECK(nongemm_native_cycles({NonGemmTag::softmax, 128}, du) == 1 + 1 + 4 + 8 + 7);
  }

  TEST_CASE("zero elements and missing recipes are rejected") {
    DigitalUnitConfig du = DigitalUnitConfig::defaults();
    CHECK_THROWS_AS(nongemm_cycles({NonGemmTag::relu, 0}, du), ValidationError);
    du.recipes.erase(NonGemmTag::gelu);
    CHECK_THROWS_AS(nongemm_cycles({NonGemmTag::gelu, 10}, du), ValidationError);
  }

  TEST_CASE("config validation") {
    DigitalUnitConfig du = DigitalUnitConfig::defaults();
    du.lanes = 0;
    CHECK_THROWS_AS(du.validate(), ValidationError);
    du = DigitalUnitConfig::defaults();
    du.stage_cycles[ArithUnit::add].ii = 0;
    CHECK_THROWS_AS(du.validate(), ValidationError);
    du = DigitalUnitConfig::defaults();
    du.recipes[NonGemmTag::relu].stages.clear();
    CHECK_THROWS_AS(du.validate(), ValidationError);
  }

  TEST_CASE("layer pipelining bounds") {
    const DigitalUnitConfig du = DigitalUnitConfig::defaults(64, 10e9);
    CHECK(layer_nongemm_cycles({}, du) == 0);
    const NonGemmOp g{NonGemmTag::gelu, 5000};
    const std::int64_t c = nongemm_cycles(g, du);
    CHECK(layer_nongemm_cycles({g}, du) == c);
    const std::int64_t w = nongemm_depth_cycles(NonGemmTag::gelu, du);
    CHECK(layer_nongemm_cycles({g, g}, du) == 2 * c - w);
    const std::vector<NonGemmOp> ops{{NonGemmTag::add, 900}, {NonGemmTag::layernorm, 900}, {NonGemmTag::relu, 70}};
    std::int64_t sum = 0, mx = 0;
    for (const auto& o : ops) {
      sum += nongemm_cycles(o, du);
      mx = std::max(mx, nongemm_cycles(o, du));
    }
    CHECK(layer_nongemm_cycles(ops, du) <= sum);
    CHECK(layer_nongemm_cycles(ops, du) >= mx);
  }

  TEST_CASE("cycles grow linearly in elements past one wave") {
    const DigitalUnitConfig du = DigitalUnitConfig::defaults(128, 1e9);
    for (NonGemmTag t : {NonGemmTag::relu, NonGemmTag::gelu, NonGemmTag::softmax, NonGemmTag::tanh}) {
      const std::int64_t a = nongemm_native_cycles({t, 128 * 10}, du);
      const std::int64_t b = nongemm_native_cycles({t, 128 * 20}, du);
      const std::int64_t c = nongemm_native_cycles({t, 128 * 30}, du);
      CHECK(c - b == b - a);
      CHECK(b - a > 0);
    }
  }

  TEST_CASE("doubling lanes halves waves") {
    for (NonGemmTag t : {NonGemmTag::relu, NonGemmTag::gelu, NonGemmTag::layernorm}) {
      const DigitalUnitConfig a = DigitalUnitConfig::defaults(64, 1e9);
      const DigitalUnitConfig b = DigitalUnitConfig::defaults(128, 1e9);
      const NonGemmOp op{t, 100000};
      // the tree-reduction depth grows by one level with twice the lanes
      CHECK(nongemm_native_cycles(op, b) <= nongemm_native_cycles(op, a) / 2 + 20);
    }
  }

  TEST_CASE("II=1 recipes sustain m elements per f_c cycle") {
    for (double fc : {1e9, 4e9, 10e9}) {
      const DigitalUnitConfig du = DigitalUnitConfig::defaults(128, fc);
      const std::int64_t waves = 10000;
      const std::int64_t c = nongemm_cycles({NonGemmTag::relu, 128 * waves}, du);
      CHECK(double(c) / double(waves) == doctest::Approx(1.0).epsilon(0.01));
    }
  }
}
