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

#include "eposim/nonlinear.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "eposim/error.hpp"

namespace eposim {
namespace {

constexpr std::array<std::pair<ArithUnit, std::string_view>, 6> kUnits{{
    {ArithUnit::add, "add"}, {ArithUnit::mul, "mul"}, {ArithUnit::div, "div"},
    {ArithUnit::max, "max"}, {ArithUnit::sqrt, "sqrt"}, {ArithUnit::exp, "exp"},
}};

std::int64_t ceil_log2(std::int64_t n) {
  std::int64_t k = 0;
  while ((std::int64_t{1} << k) < n) ++k;
  return k;
}

// Native cycles expressed at f_c, with n_units staggered replicas.
std::int64_t to_fc(std::int64_t native, const DigitalUnitConfig& cfg) {
  const double r = static_cast<double>(native) * (cfg.f_c / cfg.f_asic) / static_cast<double>(cfg.n_units());
  return static_cast<std::int64_t>(std::ceil(r - 1e-9));
}

const OpRecipe& recipe_for(NonGemmTag tag, const DigitalUnitConfig& cfg) {
  auto it = cfg.recipes.find(tag);
  if (it == cfg.recipes.end()) {
    throw ValidationError("no digital-unit recipe for op '" + std::string(to_string(tag)) + "'");
  }
  return it->second;
}

const StageTiming& timing_for(ArithUnit u, const DigitalUnitConfig& cfg) {
  auto it = cfg.stage_cycles.find(u);
  if (it == cfg.stage_cycles.end()) {
    throw ValidationError("no stage timing for unit '" + std::string(to_string(u)) + "'");
  }
  return it->second;
}

std::int64_t native_depth(const OpRecipe& r, const DigitalUnitConfig& cfg) {
  std::int64_t d = 0;
  for (const auto& [u, n] : r.stages) d = std::max(d, timing_for(u, cfg).depth);
  return d + (r.reduction ? ceil_log2(cfg.lanes) : 0);
}

}  // namespace

std::string_view to_string(ArithUnit u) {
  for (const auto& [v, s] : kUnits) if (v == u) return s;
  return "?";
}

ArithUnit arith_unit_from_string(std::string_view s) {
  for (const auto& [v, n] : kUnits) if (n == s) return v;
  throw ValidationError("unknown arithmetic unit '" + std::string(s) + "'");
}

DigitalUnitConfig DigitalUnitConfig::defaults(std::int64_t lanes, double f_c) {
  using U = ArithUnit;
  using T = NonGemmTag;
  DigitalUnitConfig c;
  c.lanes = lanes;
  c.f_c = f_c;
  c.stage_cycles = {{U::add, {1, 1}}, {U::mul, {1, 2}}, {U::max, {1, 1}},
                    {U::div, {4, 8}}, {U::sqrt, {4, 8}}, {U::exp, {1, 4}}};
  c.recipes = {
      {T::relu, {{{U::max, 1}}, false}},
      {T::gelu, {{{U::mul, 3}, {U::exp, 1}, {U::div, 1}, {U::add, 2}}, false}},
      {T::softmax, {{{U::exp, 1}, {U::max, 1}, {U::div, 1}}, true}},
      {T::sigmoid, {{{U::exp, 1}, {U::add, 1}, {U::div, 1}}, false}},
      {T::tanh, {{{U::exp, 2}, {U::add, 2}, {U::div, 2}}, false}},
      {T::layernorm, {{{U::add, 2}, {U::mul, 2}, {U::sqrt, 1}, {U::div, 1}}, true}},
      {T::maxpool, {{{U::max, 1}}, true}},
      {T::avgpool, {{{U::add, 1}}, true}},
      {T::add, {{{U::add, 1}}, false}},
      {T::mul, {{{U::mul, 1}}, false}},
      {T::exp, {{{U::exp, 1}}, false}},
      {T::div, {{{U::div, 1}}, false}},
      {T::sqrt, {{{U::sqrt, 1}}, false}},
      {T::max_reduce, {{{U::max, 1}}, true}},
  };
  return c;
}

std::int64_t DigitalUnitConfig::n_units() const {
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(f_c / f_asic - 1e-9)));
}

void DigitalUnitConfig::validate() const {
  if (lanes < 1) throw ValidationError("digital_unit lanes must be >= 1");
  if (!(f_asic > 0.0) || !(f_c > 0.0)) throw ValidationError("digital_unit clocks must be > 0");
  for (const auto& [u, t] : stage_cycles) {
    if (t.ii < 1) throw ValidationError("initiation interval of '" + std::string(to_string(u)) + "' must be >= 1");
    if (t.depth < 0) throw ValidationError("depth of '" + std::string(to_string(u)) + "' must be >= 0");
  }
  for (const auto& [tag, r] : recipes) {
    if (r.stages.empty()) throw ValidationError("recipe for '" + std::string(to_string(tag)) + "' has no stages");
    for (const auto& [u, n] : r.stages) {
      timing_for(u, *this);
      if (n < 1) throw ValidationError("recipe invocation counts must be >= 1");
    }
  }
}

std::int64_t nongemm_native_cycles(const NonGemmOp& op, const DigitalUnitConfig& cfg) {
  if (op.elems < 1) throw ValidationError("non-GEMM op elems must be >= 1");
  const OpRecipe& r = recipe_for(op.tag, cfg);
  const std::int64_t waves = (op.elems + cfg.lanes - 1) / cfg.lanes;
  std::int64_t issue = 0;
  for (const auto& [u, n] : r.stages) issue += timing_for(u, cfg).ii * n;
  return issue * waves + native_depth(r, cfg);
}

std::int64_t nongemm_cycles(const NonGemmOp& op, const DigitalUnitConfig& cfg) {
  return to_fc(nongemm_native_cycles(op, cfg), cfg);
}

std::int64_t nongemm_depth_cycles(NonGemmTag tag, const DigitalUnitConfig& cfg) {
  return to_fc(native_depth(recipe_for(tag, cfg), cfg), cfg);
}

std::int64_t layer_nongemm_cycles(const std::vector<NonGemmOp>& ops, const DigitalUnitConfig& cfg) {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    total += nongemm_cycles(ops[i], cfg);
    if (i > 0) {
      total -= std::min(nongemm_depth_cycles(ops[i - 1].tag, cfg), nongemm_depth_cycles(ops[i].tag, cfg));
    }
  }
  return total;
}

}  // namespace eposim
