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
#include <string_view>

#include "eposim/energy.hpp"
#include "eposim/nonlinear.hpp"
#include "eposim/timing.hpp"

namespace eposim {

enum class BufferingMode { optimized, double_buffering };

std::string_view to_string(BufferingMode b);
BufferingMode buffering_mode_from_string(std::string_view s);

/// Everything a simulation run needs besides the workload.
struct SimConfig {
  AcceleratorConfig accelerator;
  DeviceParams devices;
  DigitalUnitConfig digital_unit = DigitalUnitConfig::defaults();
  std::int64_t batch = 0;  // 0 picks the largest batch the buffering mode admits
  bool pipelining = true;
  BufferingMode buffering = BufferingMode::optimized;
  std::size_t bins = 1000;

  /// Digital unit with lanes and clock tied to the accelerator.
  DigitalUnitConfig effective_digital_unit() const;
  /// Throws ValidationError.
  void validate() const;
};

/// Sections {accelerator, devices, digital_unit}; unknown keys are rejected.
SimConfig parse_config(std::string_view text, const std::string& source = "<config>");
SimConfig load_config(const std::string& path);
std::string dump_config(const SimConfig& c);

}  // namespace eposim
