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

#include "eposim/config.hpp"
#include "eposim/workload.hpp"

namespace eposim::testing {

inline std::string data_path(const std::string& rel) { return std::string(EPOSIM_DATA_DIR) + "/" + rel; }

inline Workload bundled(const std::string& name) { return load_workload(data_path("workloads/" + name + ".workload")); }

inline SimConfig default_config() { return load_config(data_path("configs/default.config.json")); }

inline LayerSpec dense_layer(std::int64_t in, std::int64_t out, std::int64_t batch = 1) {
  LayerSpec l;
  l.kind = LayerKind::dense;
  l.dims = DenseDims{in, out};
  l.batch = batch;
  return l;
}

inline LayerSpec conv_layer(std::int64_t in_ch, std::int64_t out_ch, std::int64_t k, std::int64_t stride,
                            std::int64_t in_hw, std::int64_t batch = 1) {
  LayerSpec l;
  l.kind = LayerKind::conv2d;
  l.dims = ConvDims{in_ch, out_ch, k, k, stride, in_hw, in_hw};
  l.batch = batch;
  return l;
}

}  // namespace eposim::testing
