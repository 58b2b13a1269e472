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
#include <map>
#include <string_view>
#include <utility>
#include <vector>

#include "eposim/workload.hpp"

namespace eposim {

enum class ArithUnit { add, mul, div, max, sqrt, exp };

std::string_view to_string(ArithUnit u);
ArithUnit arith_unit_from_string(std::string_view s);

/// Pipeline timing of one arithmetic unit in native digital cycles.
struct StageTiming {
  std::int64_t ii = 1;     // initiation interval, >= 1
  std::int64_t depth = 1;  // latency through the pipeline
};

/// Arithmetic stages one non-GEMM op runs per element.
struct OpRecipe {
  std::vector<std::pair<ArithUnit, std::int64_t>> stages;  // (unit, invocations per element)
  bool reduction = false;  // needs a cross-lane tree reduction
};

struct DigitalUnitConfig {
  std::int64_t lanes = 128;
  double f_asic = 1e9;
  double f_c = 10e9;
  std::map<ArithUnit, StageTiming> stage_cycles;
  std::map<NonGemmTag, OpRecipe> recipes;

  /// Default stage table and recipes for the given lane count and system clock.
  static DigitalUnitConfig defaults(std::int64_t lanes = 128, double f_c = 10e9);

  /// ceil(f_c / f_asic) staggered logical units per lane.
  std::int64_t n_units() const;
  /// Throws ValidationError.
  void validate() const;
};

/// Native-clock cycles before conversion to f_c.
std::int64_t nongemm_native_cycles(const NonGemmOp& op, const DigitalUnitConfig& cfg);
/// Cycles at f_c.
std::int64_t nongemm_cycles(const NonGemmOp& op, const DigitalUnitConfig& cfg);
/// Pipeline depth of one op at f_c (deepest stage plus any reduction tree).
std::int64_t nongemm_depth_cycles(NonGemmTag tag, const DigitalUnitConfig& cfg);
/// Sum of op cycles minus min(depth_i, depth_{i+1}) overlap between neighbours.
std::int64_t layer_nongemm_cycles(const std::vector<NonGemmOp>& ops, const DigitalUnitConfig& cfg);

}  // namespace eposim
