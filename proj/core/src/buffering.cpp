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

#include "eposim/buffering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eposim/error.hpp"

namespace eposim {
namespace {

bool is_small_int(double v) { return v >= 0.0 && v <= 16.0 && v == std::floor(v); }

}  // namespace

TransferSchedule solve_schedule(const MemoryTrace& trace, double x_input, double x_max, double bw) {
  if (trace.usage.empty()) throw ValidationError("memory trace is empty");
  if (!(bw > 0.0)) throw ValidationError("bandwidth must be > 0");
  if (x_input < 0.0) throw ValidationError("x_input must be >= 0");
  const std::size_t n = trace.usage.size();
  // Transfers are irrevocable, so a later dip in headroom bounds every earlier total.
  std::vector<double> bound(n);
  double running = std::numeric_limits<double>::infinity();
  for (std::size_t k = n; k-- > 0;) {
    running = std::min(running, x_max - trace.usage[k]);
    bound[k] = running;
  }
  TransferSchedule s;
  s.dt = trace.dt;
  s.x_pcie.resize(n);
  const double step = bw * trace.dt;
  double prev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = std::max(prev, std::min({bound[k], prev + step, x_input}));
    if (bound[k] < prev && !s.binding_bin) s.binding_bin = k;
    s.x_pcie[k] = x;
    s.objective += x;
    prev = x;
  }
  s.feasible = !s.binding_bin && s.x_pcie.back() >= x_input;
  if (!s.feasible && !s.binding_bin) {
    for (std::size_t k = 0; k < n; ++k) {
      if (bound[k] < x_input) s.binding_bin = k;
    }
    if (!s.binding_bin) s.binding_bin = n - 1;
  }
  return s;
}

std::optional<double> exhaustive_optimum(const MemoryTrace& trace, double x_input, double x_max, double bw) {
  const std::size_t n = trace.usage.size();
  const double step = bw * trace.dt;
  if (n == 0 || n > 12 || !is_small_int(x_input) || !is_small_int(x_max) || !is_small_int(step) ||
      !std::all_of(trace.usage.begin(), trace.usage.end(), is_small_int)) {
    throw ValidationError("verify_optimal needs <= 12 bins and integer values <= 16");
  }
  const int xi = int(x_input), xm = int(x_max), st = int(step);
  constexpr int kNone = -1;
  // best[k][v]: largest sum over bins k.. given x(k-1) = v, or kNone.
  std::vector<std::vector<int>> best(n + 1, std::vector<int>(17, kNone));
  std::vector<std::vector<char>> seen(n + 1, std::vector<char>(17, 0));
  std::function<int(std::size_t, int)> go = [&](std::size_t k, int prev) -> int {
    if (k == n) return prev == xi ? 0 : kNone;
    if (seen[k][prev]) return best[k][prev];
    int out = kNone;
    for (int x = prev; x <= std::min({prev + st, xi, 16}); ++x) {
      if (trace.usage[k] + x > xm) continue;
      const int rest = go(k + 1, x);
      if (rest != kNone) out = std::max(out, x + rest);
    }
    seen[k][prev] = 1;
    best[k][prev] = out;
    return out;
  };
  const int opt = go(0, 0);
  if (opt == kNone) return std::nullopt;
  return double(opt);
}

bool verify_optimal(const MemoryTrace& trace, double x_input, double x_max, double bw,
                    const TransferSchedule& s) {
  const auto opt = exhaustive_optimum(trace, x_input, x_max, bw);
  if (!opt) return !s.feasible;
  if (!s.feasible || s.x_pcie.size() != trace.usage.size()) return false;
  const double step = bw * trace.dt;
  double prev = 0.0, sum = 0.0;
  for (std::size_t k = 0; k < s.x_pcie.size(); ++k) {
    const double x = s.x_pcie[k];
    if (x < prev || x - prev > step || x < 0.0 || trace.usage[k] + x > x_max) return false;
    sum += x;
    prev = x;
  }
  if (prev != x_input) return false;
  return sum == *opt;
}

BatchChoice max_batch(const BatchModel& model, double x_max, double bw) {
  const BatchProfile one = model(1);
  const double per_sample = one.trace.peak();
  if (!(per_sample > 0.0)) throw InvariantError("batch-1 trace has no activation usage");
  if (per_sample > x_max) {
    throw InfeasibleError("batch 1 needs " + std::to_string(per_sample) + " B of activation SRAM, capacity is " +
                          std::to_string(x_max) + " B");
  }
  const auto upper = static_cast<std::int64_t>(std::floor(x_max / per_sample));
  for (std::int64_t b = upper; b >= 1; --b) {
    const BatchProfile prof = b == 1 ? one : model(b);
    if (prof.trace.peak() > x_max) continue;
    TransferSchedule s = solve_schedule(prof.trace, prof.input_bytes, x_max, bw);
    if (s.feasible) return {b, std::move(s)};
  }
  throw InfeasibleError("no batch size admits a feasible next-batch transfer schedule");
}

std::int64_t double_buffering_batch(const BatchModel& model, double x_max) {
  const double half = x_max / 2.0;
  const double per_sample = model(1).trace.peak();
  if (!(per_sample > 0.0) || per_sample > half) return 0;
  for (auto b = static_cast<std::int64_t>(std::floor(half / per_sample)); b >= 1; --b) {
    if (model(b).trace.peak() <= half) return b;
  }
  return 0;
}

}  // namespace eposim
