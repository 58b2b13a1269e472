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
#include <variant>
#include <vector>

namespace eposim {

enum class LayerKind { conv2d, dense, lstm_cell, attention_proj, elementwise_block };

enum class NonGemmTag {
  relu, gelu, softmax, sigmoid, tanh, layernorm, maxpool, avgpool,
  add, mul, exp, div, sqrt, max_reduce
};

std::string_view to_string(LayerKind k);
std::string_view to_string(NonGemmTag t);
/// Throws ValidationError on an unknown name.
LayerKind layer_kind_from_string(std::string_view s);
NonGemmTag nongemm_tag_from_string(std::string_view s);

/// One elementwise or reduction op. elems >= 1.
struct NonGemmOp {
  NonGemmTag tag = NonGemmTag::relu;
  std::int64_t elems = 1;
  bool operator==(const NonGemmOp&) const = default;
};

struct ConvDims {
  std::int64_t in_ch = 1, out_ch = 1, kernel_h = 1, kernel_w = 1, stride = 1, in_h = 1, in_w = 1;
  /// Padding is already folded into in_h/in_w.
  std::int64_t out_h() const { return (in_h - kernel_h) / stride + 1; }
  std::int64_t out_w() const { return (in_w - kernel_w) / stride + 1; }
};
struct DenseDims {
  std::int64_t in_features = 1, out_features = 1;
};
struct LstmDims {
  std::int64_t hidden = 1, input = 1, seq_len = 1;
};
struct AttentionDims {
  std::int64_t d_model = 1, d_proj = 1, seq_len = 1;
};
struct NoDims {};

using LayerDims = std::variant<NoDims, ConvDims, DenseDims, LstmDims, AttentionDims>;

/// One layer as written by the workload author. NonGemmOp elems are per sample
/// (per time step for lstm_cell); lowering multiplies them by batch.
struct LayerSpec {
  LayerKind kind = LayerKind::dense;
  std::string name;
  LayerDims dims;
  std::vector<NonGemmOp> nongemm;
  std::int64_t batch = 1;
};

struct Workload {
  std::string name;
  std::vector<LayerSpec> layers;

  /// Copy with every layer's batch replaced.
  Workload with_batch(std::int64_t batch) const;
};

/// Lowered matrix multiply: rows_w x cols_w weights times a cols_w x n_vec panel.
struct GemmOp {
  std::int64_t rows_w = 1;
  std::int64_t cols_w = 1;
  std::int64_t n_vec = 1;
  std::size_t source_layer = 0;
  std::vector<NonGemmOp> nongemm;

  std::int64_t macs() const { return rows_w * cols_w * n_vec; }
};

struct TilePlan {
  std::int64_t rows_w = 1;
  std::int64_t cols_w = 1;
  std::int64_t m = 1;
  std::int64_t row_tiles = 1;
  std::int64_t col_tiles = 1;
  std::int64_t total_tiles = 1;
  std::int64_t vectors_per_tile = 1;

  /// Occupied rows of row tile r (the last one may be partial).
  std::int64_t tile_rows(std::int64_t r) const;
  std::int64_t tile_cols(std::int64_t c) const;
};

/// Activation bytes a layer reads and produces per inference batch, 1 byte per element.
struct LayerFootprint {
  std::int64_t input_bytes = 0;
  std::int64_t output_bytes = 0;
};

/// Throws ValidationError naming the violated invariant.
void validate(const LayerSpec& layer, std::size_t index);

/// Parses workload JSON text. `source` labels error messages.
Workload parse_workload(std::string_view text, const std::string& source = "<workload>");
Workload load_workload(const std::string& path);
std::string dump_workload(const Workload& w);

std::vector<GemmOp> lower_to_gemms(const std::vector<LayerSpec>& layers);
inline std::vector<GemmOp> lower_to_gemms(const Workload& w) { return lower_to_gemms(w.layers); }

TilePlan plan_tiles(const GemmOp& gemm, std::int64_t m);

LayerFootprint footprint(const LayerSpec& layer);

/// Batch taken from the first layer that is not an elementwise block.
std::int64_t workload_batch(const Workload& w);

}  // namespace eposim
