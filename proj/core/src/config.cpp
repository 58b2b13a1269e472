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

#include "eposim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "eposim/error.hpp"

namespace eposim {
namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& obj, std::string path, const std::string& source, std::string_view text)
      : obj_(obj), path_(std::move(path)), source_(source), text_(text) {
    if (!obj_.is_object()) fail("", "expected an object");
  }

  // The line is that of the first occurrence of the quoted key, which is exact
  // for the unique keys this schema uses.
  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const std::string leaf = key.empty() ? path_.substr(path_.rfind('.') + 1) : key;
    std::size_t line = 1;
    if (const auto at = text_.find("\"" + leaf + "\""); !leaf.empty() && at != std::string_view::npos) {
      line += static_cast<std::size_t>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(at), '\n'));
    }
    const std::string field = path_.empty() ? key : (key.empty() ? path_ : path_ + "." + key);
    throw ParseError(source_, line, field, what);
  }

  void num(const char* key, double& out) {
    seen(key);
    if (auto it = obj_.find(key); it != obj_.end()) {
      if (!it->is_number()) fail(key, "expected a number");
      out = it->get<double>();
    }
  }
  template <class I>
  void integer(const char* key, I& out) {
    seen(key);
    if (auto it = obj_.find(key); it != obj_.end()) {
      if (it->is_number_float() && it->get<double>() == std::floor(it->get<double>())) {
        out = static_cast<I>(it->get<double>());
        return;
      }
      if (!it->is_number_integer()) fail(key, "expected an integer");
      out = it->get<I>();
    }
  }
  void boolean(const char* key, bool& out) {
    seen(key);
    if (auto it = obj_.find(key); it != obj_.end()) {
      if (!it->is_boolean()) fail(key, "expected true or false");
      out = it->get<bool>();
    }
  }
  template <class E>
  void enumeration(const char* key, E& out, E (*parse)(std::string_view)) {
    seen(key);
    if (auto it = obj_.find(key); it != obj_.end()) {
      if (!it->is_string()) fail(key, "expected a string");
      try {
        out = parse(it->get<std::string>());
      } catch (const ValidationError& e) {
        fail(key, e.what());
      }
    }
  }
  void section(const char* key, const std::function<void(Reader&)>& body) {
    seen(key);
    if (auto it = obj_.find(key); it != obj_.end()) {
      Reader sub(*it, path_.empty() ? key : path_ + "." + key, source_, text_);
      body(sub);
      sub.finish();
    }
  }
  const json* raw(const char* key) {
    seen(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }
  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end()) fail(it.key(), "unknown field");
    }
  }
  const std::string& path() const { return path_; }
  const std::string& source() const { return source_; }
  std::string_view text() const { return text_; }

 private:
  void seen(const char* key) { seen_.emplace_back(key); }
  const json& obj_;
  std::string path_;
  const std::string& source_;
  std::string_view text_;
  std::vector<std::string> seen_;
};

void read_accelerator(Reader& r, SimConfig& c) {
  AcceleratorConfig& a = c.accelerator;
  r.enumeration("core", a.core, core_type_from_string);
  r.integer("m", a.m);
  r.num("f_c", a.f_c);
  r.enumeration("dataflow", a.dataflow, dataflow_from_string);
  r.num("t_prog", a.t_prog);
  r.integer("n_cores", a.n_cores);
  r.enumeration("parallel_mode", a.parallel_mode, parallel_mode_from_string);
  r.integer("n_wdm", a.n_wdm);
  r.num("act_sram_bytes", a.act_sram_bytes);
  r.num("weight_sram_bytes", a.weight_sram_bytes);
  r.num("pcie_bytes_per_sec", a.pcie_bytes_per_sec);
  r.integer("zeta", a.zeta);
  r.num("sa_ref_hz", a.sa_ref_hz);
  r.integer("batch", c.batch);
  r.boolean("pipelining", c.pipelining);
  r.enumeration("buffering", c.buffering, buffering_mode_from_string);
  r.integer("bins", c.bins);
}

void read_devices(Reader& r, DeviceParams& d) {
  r.num("kappa", d.kappa);
  r.integer("b_out", d.b_out);
  r.integer("b_in", d.b_in);
  r.integer("b_weight", d.b_weight);
  r.num("q", d.q);
  r.num("eta_mod_db", d.eta_mod_db);
  r.num("mzi_loss_db", d.mzi_loss_db);
  r.num("eta_cpl_db", d.eta_cpl_db);
  r.num("eta_det", d.eta_det);
  r.num("eta_laser", d.eta_laser);
  r.section("dac_ref", [&](Reader& s) {
    s.integer("bits", d.dac_ref.bits);
    s.num("power_w", d.dac_ref.power_w);
    s.num("rate_hz", d.dac_ref.rate_hz);
  });
  r.section("adc", [&](Reader& s) {
    s.num("power_w", d.adc.power_w);
    s.num("rate_hz", d.adc.rate_hz);
    s.integer("bits", d.adc.bits);
  });
  r.num("e_o_j_per_bit", d.e_o_j_per_bit);
  r.num("o_e_j_per_bit", d.o_e_j_per_bit);
  r.num("dram_j_per_bit", d.dram_j_per_bit);
  r.num("d2d_j_per_bit", d.d2d_j_per_bit);
  r.num("sram_j_per_bit", d.sram_j_per_bit);
  r.num("pe_power_w", d.pe_power_w);
  r.num("digital_lane_unit_power_w", d.digital_lane_unit_power_w);
  r.section("area_mm2", [&](Reader& s) {
    s.num("mzi", d.area.mzi);
    s.num("modulator", d.area.modulator);
    s.num("detector", d.area.detector);
    s.num("adc", d.area.adc);
    s.num("dac", d.area.dac);
    s.num("pe", d.area.pe);
    s.num("sram_per_mb", d.area.sram_per_mb);
    s.num("digital_lane_unit", d.area.digital_lane_unit);
  });
  r.section("error_model", [&](Reader& s) {
    s.num("c1", d.error_model.c1);
    s.num("c2", d.error_model.c2);
    s.num("c3", d.error_model.c3);
  });
}

void read_digital_unit(Reader& r, DigitalUnitConfig& du) {
  r.num("f_asic", du.f_asic);
  if (const json* sc = r.raw("stage_cycles")) {
    Reader s(*sc, r.path() + ".stage_cycles", r.source(), r.text());
    if (!sc->is_object()) s.fail("", "expected an object");
    for (auto it = sc->begin(); it != sc->end(); ++it) {
      ArithUnit u;
      try {
        u = arith_unit_from_string(it.key());
      } catch (const ValidationError& e) {
        s.fail(it.key(), e.what());
      }
      Reader st(it.value(), s.path() + "." + it.key(), r.source(), r.text());
      StageTiming t = du.stage_cycles.count(u) ? du.stage_cycles.at(u) : StageTiming{};
      st.integer("ii", t.ii);
      st.integer("depth", t.depth);
      st.finish();
      du.stage_cycles[u] = t;
    }
  }
  if (const json* rc = r.raw("recipes")) {
    Reader s(*rc, r.path() + ".recipes", r.source(), r.text());
    for (auto it = rc->begin(); it != rc->end(); ++it) {
      NonGemmTag tag;
      try {
        tag = nongemm_tag_from_string(it.key());
      } catch (const ValidationError& e) {
        s.fail(it.key(), e.what());
      }
      Reader rr(it.value(), s.path() + "." + it.key(), r.source(), r.text());
      OpRecipe recipe = du.recipes.count(tag) ? du.recipes.at(tag) : OpRecipe{};
      rr.boolean("reduction", recipe.reduction);
      if (const json* st = rr.raw("stages")) {
        recipe.stages.clear();
        if (!st->is_array()) rr.fail("stages", "expected an array of [unit, count]");
        for (const json& e : *st) {
          if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_number_integer()) {
            rr.fail("stages", "expected [unit, count] pairs");
          }
          try {
            recipe.stages.emplace_back(arith_unit_from_string(e[0].get<std::string>()), e[1].get<std::int64_t>());
          } catch (const ValidationError& ex) {
            rr.fail("stages", ex.what());
          }
        }
      }
      rr.finish();
      du.recipes[tag] = recipe;
    }
  }
}

}  // namespace

std::string_view to_string(BufferingMode b) {
  return b == BufferingMode::optimized ? "optimized" : "double";
}

BufferingMode buffering_mode_from_string(std::string_view s) {
  if (s == "optimized") return BufferingMode::optimized;
  if (s == "double" || s == "double_buffering") return BufferingMode::double_buffering;
  throw ValidationError("unknown buffering mode '" + std::string(s) + "'");
}

DigitalUnitConfig SimConfig::effective_digital_unit() const {
  DigitalUnitConfig du = digital_unit;
  du.lanes = accelerator.m;
  du.f_c = accelerator.f_c;
  return du;
}

void SimConfig::validate() const {
  accelerator.validate();
  devices.validate();
  effective_digital_unit().validate();
  if (batch < 0) throw ValidationError("accelerator batch must be >= 0");
  if (bins < 1) throw ValidationError("accelerator bins must be >= 1");
}

SimConfig parse_config(std::string_view text, const std::string& source) {
  json root;
  try {
    root = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    const auto upto = text.substr(0, std::min<std::size_t>(e.byte, text.size()));
    throw ParseError(source, 1 + static_cast<std::size_t>(std::count(upto.begin(), upto.end(), '\n')), "",
                     e.what());
  }
  SimConfig c;
  Reader top(root, "", source, text);
  top.section("accelerator", [&](Reader& r) { read_accelerator(r, c); });
  top.section("devices", [&](Reader& r) { read_devices(r, c.devices); });
  top.section("digital_unit", [&](Reader& r) { read_digital_unit(r, c.digital_unit); });
  top.finish();
  try {
    c.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return c;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string dump_config(const SimConfig& c) {
  const AcceleratorConfig& a = c.accelerator;
  const DeviceParams& d = c.devices;
  json j;
  j["accelerator"] = {{"core", to_string(a.core)},
                      {"m", a.m},
                      {"f_c", a.f_c},
                      {"dataflow", to_string(a.dataflow)},
                      {"t_prog", a.t_prog},
                      {"n_cores", a.n_cores},
                      {"parallel_mode", to_string(a.parallel_mode)},
                      {"n_wdm", a.n_wdm},
                      {"act_sram_bytes", a.act_sram_bytes},
                      {"weight_sram_bytes", a.weight_sram_bytes},
                      {"pcie_bytes_per_sec", a.pcie_bytes_per_sec},
                      {"zeta", a.zeta},
                      {"sa_ref_hz", a.sa_ref_hz},
                      {"batch", c.batch},
                      {"pipelining", c.pipelining},
                      {"buffering", to_string(c.buffering)},
                      {"bins", c.bins}};
  j["devices"] = {{"kappa", d.kappa},
                  {"b_out", d.b_out},
                  {"b_in", d.b_in},
                  {"b_weight", d.b_weight},
                  {"q", d.q},
                  {"eta_mod_db", d.eta_mod_db},
                  {"mzi_loss_db", d.mzi_loss_db},
                  {"eta_cpl_db", d.eta_cpl_db},
                  {"eta_det", d.eta_det},
                  {"eta_laser", d.eta_laser},
                  {"dac_ref", {{"bits", d.dac_ref.bits}, {"power_w", d.dac_ref.power_w}, {"rate_hz", d.dac_ref.rate_hz}}},
                  {"adc", {{"power_w", d.adc.power_w}, {"rate_hz", d.adc.rate_hz}, {"bits", d.adc.bits}}},
                  {"e_o_j_per_bit", d.e_o_j_per_bit},
                  {"o_e_j_per_bit", d.o_e_j_per_bit},
                  {"dram_j_per_bit", d.dram_j_per_bit},
                  {"d2d_j_per_bit", d.d2d_j_per_bit},
                  {"sram_j_per_bit", d.sram_j_per_bit},
                  {"pe_power_w", d.pe_power_w},
                  {"digital_lane_unit_power_w", d.digital_lane_unit_power_w},
                  {"area_mm2",
                   {{"mzi", d.area.mzi},
                    {"modulator", d.area.modulator},
                    {"detector", d.area.detector},
                    {"adc", d.area.adc},
                    {"dac", d.area.dac},
                    {"pe", d.area.pe},
                    {"sram_per_mb", d.area.sram_per_mb},
                    {"digital_lane_unit", d.area.digital_lane_unit}}},
                  {"error_model", {{"c1", d.error_model.c1}, {"c2", d.error_model.c2}, {"c3", d.error_model.c3}}}};
  json stages = json::object();
  for (const auto& [u, t] : c.digital_unit.stage_cycles) {
    stages[std::string(to_string(u))] = {{"ii", t.ii}, {"depth", t.depth}};
  }
  json recipes = json::object();
  for (const auto& [tag, r] : c.digital_unit.recipes) {
    json st = json::array();
    for (const auto& [u, n] : r.stages) st.push_back(json::array({std::string(to_string(u)), n}));
    recipes[std::string(to_string(tag))] = {{"stages", st}, {"reduction", r.reduction}};
  }
  j["digital_unit"] = {{"f_asic", c.digital_unit.f_asic}, {"stage_cycles", stages}, {"recipes", recipes}};
  return j.dump(2);
}

}  // namespace eposim
