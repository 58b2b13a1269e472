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

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "eposim/buffering.hpp"
#include "eposim/simulator.hpp"

namespace eposim {

enum class ReportFormat { table, csv, json };

ReportFormat report_format_from_string(std::string_view s);

nlohmann::ordered_json report_to_json(const SimReport& r);
/// Throws ParseError on missing or mistyped fields.
SimReport report_from_json(const nlohmann::ordered_json& j);

/// Stable field order. csv is one "path,value" line per leaf; csv and json round-trip exactly.
std::string emit_report(const SimReport& r, ReportFormat f);
SimReport parse_report(std::string_view text, ReportFormat f);

/// Long format: one row per sweep point.
std::string emit_sweep(const std::vector<SweepRow>& rows, ReportFormat f);

/// Two columns (time, bytes) for the current batch and the next-batch transfer.
std::string emit_trace_table(const MemoryTrace& trace, const TransferSchedule& s);
std::string schedule_to_json(const TransferSchedule& s, const MemoryTrace& trace);

}  // namespace eposim
