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

#include "eposim/workload.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <optional>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "eposim/error.hpp"

namespace eposim {
namespace {

using nlohmann::json;

constexpr std::array<std::pair<LayerKind, std::string_view>, 5> kKinds{{
    {LayerKind::conv2d, "conv2d"},
    {LayerKind::dense, "dense"},
    {LayerKind::lstm_cell, "lstm_cell"},
    {LayerKind::attention_proj, "attention_proj"},
    {LayerKind::elementwise_block, "elementwise_block"},
}};

constexpr std::array<std::pair<NonGemmTag, std::string_view>, 14> kTags{{
    {NonGemmTag::relu, "relu"},         {NonGemmTag::gelu, "gelu"},
    {NonGemmTag::softmax, "softmax"},   {NonGemmTag::sigmoid, "sigmoid"},
    {NonGemmTag::tanh, "tanh"},         {NonGemmTag::layernorm, "layernorm"},
    {NonGemmTag::maxpool, "maxpool"},   {NonGemmTag::avgpool, "avgpool"},
    {NonGemmTag::add, "add"},           {NonGemmTag::mul, "mul"},
    {NonGemmTag::exp, "exp"},           {NonGemmTag::div, "div"},
    {NonGemmTag::sqrt, "sqrt"},         {NonGemmTag::max_reduce, "max_reduce"},
}};

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of each object opened at nesting depth 3, i.e. the elements of "layers".
// Skips strings and comments so braces inside them are not counted.
std::vector<std::size_t> layer_lines(std::string_view text) {
  std::vector<std::size_t> lines;
  std::size_t line = 1;
  int depth = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\n') {
      ++line;
    } else if (c == '"') {
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\') ++i;
        else if (text[i] == '\n') ++line;
      }
    } else if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') ++i;
      --i;
    } else if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
      for (i += 2; i + 1 < text.size() && !(text[i] == '*' && text[i + 1] == '/'); ++i) {
        if (text[i] == '\n') ++line;
      }
      ++i;
    } else if (c == '{' || c == '[') {
      ++depth;
      if (c == '{' && depth == 3) lines.push_back(line);
    } else if (c == '}' || c == ']') {
      --depth;
    }
  }
  return lines;
}

struct Ctx {
  const std::string& source;
  std::size_t line;
  std::string prefix;

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw ParseError(source, line, prefix + field, what);
  }
};

std::int64_t get_int(const json& obj, const char* key, const Ctx& ctx,
                     std::optional<std::int64_t> fallback = std::nullopt) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (fallback) return *fallback;
    ctx.fail(key, "missing required integer");
  }
  if (!it->is_number_integer()) ctx.fail(key, "expected an integer");
  return it->get<std::int64_t>();
}

std::int64_t get_int_alias(const json& obj, const char* key, const char* alias, const Ctx& ctx) {
  if (!obj.contains(key) && obj.contains(alias)) return get_int(obj, alias, ctx);
  return get_int(obj, key, ctx);
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const Ctx& ctx) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      ctx.fail(it.key(), "unknown field");
    }
  }
}

LayerDims parse_dims(LayerKind kind, const json& d, const Ctx& ctx) {
  switch (kind) {
    case LayerKind::conv2d:
      reject_unknown(d, {"in_ch", "out_ch", "kernel_h", "kernel_w", "stride", "in_h", "in_w"}, ctx);
      return ConvDims{get_int(d, "in_ch", ctx),    get_int(d, "out_ch", ctx),
                      get_int(d, "kernel_h", ctx), get_int(d, "kernel_w", ctx),
                      get_int(d, "stride", ctx, 1), get_int(d, "in_h", ctx),
                      get_int(d, "in_w", ctx)};
    case LayerKind::dense:
      reject_unknown(d, {"in_features", "out_features", "in", "out"}, ctx);
      return DenseDims{get_int_alias(d, "in_features", "in", ctx),
                       get_int_alias(d, "out_features", "out", ctx)};
    case LayerKind::lstm_cell:
      reject_unknown(d, {"hidden", "input", "seq_len"}, ctx);
      return LstmDims{get_int(d, "hidden", ctx), get_int(d, "input", ctx), get_int(d, "seq_len", ctx)};
    case LayerKind::attention_proj:
      reject_unknown(d, {"d_model", "d_proj", "seq_len"}, ctx);
      return AttentionDims{get_int(d, "d_model", ctx), get_int(d, "d_proj", ctx),
                           get_int(d, "seq_len", ctx)};
    case LayerKind::elementwise_block:
      reject_unknown(d, {}, ctx);
      return NoDims{};
  }
  return NoDims{};
}

json dims_to_json(const LayerDims& dims) {
  return std::visit(
      [](const auto& d) -> json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ConvDims>) {
          return {{"in_ch", d.in_ch},       {"out_ch", d.out_ch}, {"kernel_h", d.kernel_h},
                  {"kernel_w", d.kernel_w}, {"stride", d.stride}, {"in_h", d.in_h},
                  {"in_w", d.in_w}};
        } else if constexpr (std::is_same_v<T, DenseDims>) {
          return {{"in_features", d.in_features}, {"out_features", d.out_features}};
        } else if constexpr (std::is_same_v<T, LstmDims>) {
          return {{"hidden", d.hidden}, {"input", d.input}, {"seq_len", d.seq_len}};
        } else if constexpr (std::is_same_v<T, AttentionDims>) {
          return {{"d_model", d.d_model}, {"d_proj", d.d_proj}, {"seq_len", d.seq_len}};
        } else {
          return json::object();
        }
      },
      dims);
}

[[noreturn]] void invalid(std::size_t index, const LayerSpec& l, const std::string& what) {
  throw ValidationError("layer " + std::to_string(index) +
                        (l.name.empty() ? "" : " (" + l.name + ")") + ": " + what);
}

void require_pos(std::int64_t v, const char* field, std::size_t index, const LayerSpec& l) {
  if (v < 1) invalid(index, l, std::string(field) + " must be >= 1, got " + std::to_string(v));
}

std::vector<NonGemmOp> scaled(const std::vector<NonGemmOp>& ops, std::int64_t factor) {
  std::vector<NonGemmOp> out = ops;
  for (auto& op : out) op.elems *= factor;
  return out;
}

}  // namespace

std::string_view to_string(LayerKind k) {
  for (const auto& [v, s] : kKinds) if (v == k) return s;
  return "?";
}

std::string_view to_string(NonGemmTag t) {
  for (const auto& [v, s] : kTags) if (v == t) return s;
  return "?";
}

LayerKind layer_kind_from_string(std::string_view s) {
  for (const auto& [v, n] : kKinds) if (n == s) return v;
  throw ValidationError("unknown layer kind '" + std::string(s) + "'");
}

NonGemmTag nongemm_tag_from_string(std::string_view s) {
  for (const auto& [v, n] : kTags) if (n == s) return v;
  throw ValidationError("unknown non-GEMM tag '" + std::string(s) + "'");
}

Workload Workload::with_batch(std::int64_t b) const {
  Workload w = *this;
  for (auto& l : w.layers) l.batch = b;
  return w;
}

std::int64_t TilePlan::tile_rows(std::int64_t r) const {
  return r + 1 < row_tiles ? m : rows_w - (row_tiles - 1) * m;
}

std::int64_t TilePlan::tile_cols(std::int64_t c) const {
  return c + 1 < col_tiles ? m : cols_w - (col_tiles - 1) * m;
}

void validate(const LayerSpec& l, std::size_t index) {
  require_pos(l.batch, "batch", index, l);
  for (const auto& op : l.nongemm) require_pos(op.elems, "nongemm elems", index, l);
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ConvDims>) {
          require_pos(d.in_ch, "in_ch", index, l);
          require_pos(d.out_ch, "out_ch", index, l);
          require_pos(d.kernel_h, "kernel_h", index, l);
          require_pos(d.kernel_w, "kernel_w", index, l);
          require_pos(d.stride, "stride", index, l);
          require_pos(d.in_h, "in_h", index, l);
          require_pos(d.in_w, "in_w", index, l);
          if (d.in_h < d.kernel_h || d.in_w < d.kernel_w) {
            invalid(index, l, "kernel larger than (padded) input");
          }
          if ((d.in_h - d.kernel_h) % d.stride != 0 || (d.in_w - d.kernel_w) % d.stride != 0) {
            invalid(index, l, "stride " + std::to_string(d.stride) +
                                  " does not divide (in - kernel); output dims must be integers");
          }
        } else if constexpr (std::is_same_v<T, DenseDims>) {
          require_pos(d.in_features, "in_features", index, l);
          require_pos(d.out_features, "out_features", index, l);
        } else if constexpr (std::is_same_v<T, LstmDims>) {
          require_pos(d.hidden, "hidden", index, l);
          require_pos(d.input, "input", index, l);
          require_pos(d.seq_len, "seq_len", index, l);
        } else if constexpr (std::is_same_v<T, AttentionDims>) {
          require_pos(d.d_model, "d_model", index, l);
          require_pos(d.d_proj, "d_proj", index, l);
          require_pos(d.seq_len, "seq_len", index, l);
        }
      },
      l.dims);
  const bool dims_match =
      (l.kind == LayerKind::conv2d && std::holds_alternative<ConvDims>(l.dims)) ||
      (l.kind == LayerKind::dense && std::holds_alternative<DenseDims>(l.dims)) ||
      (l.kind == LayerKind::lstm_cell && std::holds_alternative<LstmDims>(l.dims)) ||
      (l.kind == LayerKind::attention_proj && std::holds_alternative<AttentionDims>(l.dims)) ||
      (l.kind == LayerKind::elementwise_block && std::holds_alternative<NoDims>(l.dims));
  if (!dims_match) invalid(index, l, "dims do not match layer kind");
  if (l.kind == LayerKind::elementwise_block && l.nongemm.empty()) {
    invalid(index, l, "elementwise_block needs at least one non-GEMM op");
  }
}

Workload parse_workload(std::string_view text, const std::string& source) {
  json root;
  try {
    root = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ParseError(source, line_of_offset(text, e.byte), "", e.what());
  }
  Ctx top{source, 1, ""};
  if (!root.is_object()) top.fail("", "top level must be an object");
  reject_unknown(root, {"name", "layers"}, top);
  if (!root.contains("layers") || !root["layers"].is_array()) top.fail("layers", "missing array");

  const auto lines = layer_lines(text);
  Workload w;
  w.name = root.value("name", std::string{});
  const json& layers = root["layers"];
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const json& jl = layers[i];
    Ctx ctx{source, i < lines.size() ? lines[i] : 1, "layers[" + std::to_string(i) + "]."};
    if (!jl.is_object()) ctx.fail("", "layer must be an object");
    reject_unknown(jl, {"kind", "name", "dims", "nongemm", "batch"}, ctx);
    if (!jl.contains("kind") || !jl["kind"].is_string()) ctx.fail("kind", "missing string");
    LayerSpec l;
    try {
      l.kind = layer_kind_from_string(jl["kind"].get<std::string>());
    } catch (const ValidationError& e) {
      ctx.fail("kind", e.what());
    }
    l.name = jl.value("name", std::string{});
    l.batch = get_int(jl, "batch", ctx, 1);
    json dims = jl.value("dims", json::object());
    if (!dims.is_object()) ctx.fail("dims", "expected an object");
    Ctx dctx{source, ctx.line, ctx.prefix + "dims."};
    l.dims = parse_dims(l.kind, dims, dctx);
    if (jl.contains("nongemm")) {
      const json& ops = jl["nongemm"];
      if (!ops.is_array()) ctx.fail("nongemm", "expected an array");
      for (std::size_t k = 0; k < ops.size(); ++k) {
        Ctx octx{source, ctx.line, ctx.prefix + "nongemm[" + std::to_string(k) + "]."};
        if (!ops[k].is_object() || !ops[k].contains("tag") || !ops[k]["tag"].is_string()) {
          octx.fail("tag", "missing string");
        }
        reject_unknown(ops[k], {"tag", "elems"}, octx);
        NonGemmOp op;
        try {
          op.tag = nongemm_tag_from_string(ops[k]["tag"].get<std::string>());
        } catch (const ValidationError& e) {
          octx.fail("tag", e.what());
        }
        op.elems = get_int(ops[k], "elems", octx);
        l.nongemm.push_back(op);
      }
    }
    try {
      validate(l, i);
    } catch (const ValidationError& e) {
      throw ValidationError(source + ":" + std::to_string(ctx.line) + ": " + e.what());
    }
    w.layers.push_back(std::move(l));
  }
  if (!w.layers.empty() && w.layers.front().kind == LayerKind::elementwise_block) {
    throw ValidationError(source + ": elementwise_block has no preceding GEMM layer");
  }
  return w;
}

Workload load_workload(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open workload file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_workload(ss.str(), path);
}

std::string dump_workload(const Workload& w) {
  json root{{"name", w.name}, {"layers", json::array()}};
  for (const auto& l : w.layers) {
    json jl{{"kind", std::string(to_string(l.kind))}};
    if (!l.name.empty()) jl["name"] = l.name;
    jl["dims"] = dims_to_json(l.dims);
    json ops = json::array();
    for (const auto& op : l.nongemm) ops.push_back({{"tag", std::string(to_string(op.tag))}, {"elems", op.elems}});
    jl["nongemm"] = ops;
    jl["batch"] = l.batch;
    root["layers"].push_back(jl);
  }
  return root.dump(2);
}

std::vector<GemmOp> lower_to_gemms(const std::vector<LayerSpec>& layers) {
  std::vector<GemmOp> out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& l = layers[i];
    validate(l, i);
    const std::int64_t b = l.batch;
    switch (l.kind) {
      case LayerKind::conv2d: {
        const auto& d = std::get<ConvDims>(l.dims);
        out.push_back({d.out_ch, d.in_ch * d.kernel_h * d.kernel_w, b * d.out_h() * d.out_w(), i,
                       scaled(l.nongemm, b)});
        break;
      }
      case LayerKind::dense: {
        const auto& d = std::get<DenseDims>(l.dims);
        out.push_back({d.out_features, d.in_features, b, i, scaled(l.nongemm, b)});
        break;
      }
      case LayerKind::lstm_cell: {
        const auto& d = std::get<LstmDims>(l.dims);
        const std::int64_t hb = d.hidden * b;
        std::vector<NonGemmOp> step{
            {NonGemmTag::sigmoid, hb}, {NonGemmTag::sigmoid, hb}, {NonGemmTag::tanh, hb},
            {NonGemmTag::sigmoid, hb}, {NonGemmTag::mul, 2 * hb}, {NonGemmTag::add, hb},
            {NonGemmTag::tanh, hb},    {NonGemmTag::mul, hb}};
        for (const auto& op : scaled(l.nongemm, b)) step.push_back(op);
        for (std::int64_t t = 0; t < d.seq_len; ++t) {
          out.push_back({4 * d.hidden, d.input + d.hidden, b, i, step});
        }
        break;
      }
      case LayerKind::attention_proj: {
        const auto& d = std::get<AttentionDims>(l.dims);
        out.push_back({d.d_proj, d.d_model, b * d.seq_len, i, scaled(l.nongemm, b)});
        break;
      }
      case LayerKind::elementwise_block: {
        if (out.empty()) {
          throw ValidationError("layer " + std::to_string(i) +
                                ": elementwise_block has no preceding GEMM layer");
        }
        for (const auto& op : scaled(l.nongemm, b)) out.back().nongemm.push_back(op);
        break;
      }
    }
  }
  return out;
}

TilePlan plan_tiles(const GemmOp& g, std::int64_t m) {
  if (m < 1) throw ValidationError("array size m must be >= 1");
  TilePlan p;
  p.rows_w = g.rows_w;
  p.cols_w = g.cols_w;
  p.m = m;
  p.row_tiles = ceil_div(g.rows_w, m);
  p.col_tiles = ceil_div(g.cols_w, m);
  p.total_tiles = p.row_tiles * p.col_tiles;
  p.vectors_per_tile = g.n_vec;
  return p;
}

LayerFootprint footprint(const LayerSpec& l) {
  const std::int64_t b = l.batch;
  return std::visit(
      [b](const auto& d) -> LayerFootprint {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ConvDims>) {
          return {d.in_ch * d.in_h * d.in_w * b, d.out_ch * d.out_h() * d.out_w() * b};
        } else if constexpr (std::is_same_v<T, DenseDims>) {
          return {d.in_features * b, d.out_features * b};
        } else if constexpr (std::is_same_v<T, LstmDims>) {
          return {d.seq_len * d.input * b, d.seq_len * d.hidden * b};
        } else if constexpr (std::is_same_v<T, AttentionDims>) {
          return {d.d_model * d.seq_len * b, d.d_proj * d.seq_len * b};
        } else {
          return {0, 0};
        }
      },
      l.dims);
}

std::int64_t workload_batch(const Workload& w) {
  for (const auto& l : w.layers) {
    if (l.kind != LayerKind::elementwise_block) return l.batch;
  }
  return w.layers.empty() ? 1 : w.layers.front().batch;
}

}  // namespace eposim
