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

#include <algorithm>
#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "eposim/error.hpp"
#include "eposim/mesh.hpp"

namespace eposim {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

struct Op {
  int top;
  double phi;
};

void check_square_finite(const MatrixXd& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw ValidationError(std::string(what) + " must be a non-empty square matrix");
  }
  if (!a.allFinite()) throw ValidationError(std::string(what) + " has non-finite entries");
}

// Reflection through the mode pair changes sign of the cosine when the pair's
// signs differ: T(phi) D = D T(pi - phi).
double pushed_through(double phi, const VectorXd& d, int top) {
  if (d(top) == d(top + 1)) return phi;
  double out = std::numbers::pi - phi;
  if (out > std::numbers::pi) out -= 2 * std::numbers::pi;
  return out;
}

std::vector<MziSetting> place_on_lattice(int m, const std::vector<Op>& ops) {
  std::vector<int> last(static_cast<std::size_t>(m), -1);
  std::vector<MziSetting> out;
  out.reserve(ops.size());
  for (const Op& op : ops) {
    const auto t = static_cast<std::size_t>(op.top);
    int layer = std::max(last[t], last[t + 1]) + 1;
    if (layer % 2 != op.top % 2) ++layer;
    if (layer >= m && m > 1) {
      throw InvariantError("MZI placement exceeded the " + std::to_string(m) + "-layer rectangle");
    }
    last[t] = last[t + 1] = layer;
    out.push_back({layer, op.top / 2, op.phi});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const MziSetting& a, const MziSetting& b) { return a.layer < b.layer; });
  return out;
}

template <class Rows>
void apply_mzi(Rows&& x, int top, const Eigen::Matrix2d& t) {
  const Eigen::RowVectorXd a = x.row(top);
  const Eigen::RowVectorXd b = x.row(top + 1);
  x.row(top) = t(0, 0) * a + t(0, 1) * b;
  x.row(top + 1) = t(1, 0) * a + t(1, 1) * b;
}

void apply_mesh(const std::vector<MziSetting>& mzis, MatrixXd& x) {
  for (const auto& z : mzis) apply_mzi(x, z.top_mode(), mzi_matrix(z.phi));
}

json settings_to_json(const std::vector<MziSetting>& s) {
  json a = json::array();
  for (const auto& z : s) a.push_back(json::array({z.layer, z.pos, z.phi}));
  return a;
}

std::vector<MziSetting> settings_from_json(const json& a, int m, const std::string& source,
                                           const char* field) {
  if (!a.is_array()) throw ParseError(source, 1, field, "expected an array");
  std::vector<MziSetting> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const json& e = a[i];
    const std::string f = std::string(field) + "[" + std::to_string(i) + "]";
    if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
        !e[2].is_number()) {
      throw ParseError(source, 1, f, "expected [layer, pos, phi]");
    }
    MziSetting z{e[0].get<int>(), e[1].get<int>(), e[2].get<double>()};
    if (z.layer < 0 || z.layer >= std::max(m, 1) || z.pos < 0 || z.top_mode() + 1 >= m) {
      throw ValidationError(source + ": " + f + " is off the " + std::to_string(m) + "-mode lattice");
    }
    out.push_back(z);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const MziSetting& x, const MziSetting& y) { return x.layer < y.layer; });
  return out;
}

VectorXd vector_from_json(const json& a, const std::string& source, const char* field) {
  if (!a.is_array()) throw ParseError(source, 1, field, "expected an array");
  VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw ParseError(source, 1, field, "expected numbers");
    v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  }
  return v;
}

}  // namespace

Eigen::Matrix2d mzi_matrix(double phi) {
  const double s = std::sin(phi), c = std::cos(phi);
  Eigen::Matrix2d t;
  t << s, c, c, -s;
  return t;
}

Svd svd_decompose(const MatrixXd& tile) {
  check_square_finite(tile, "tile");
  Eigen::JacobiSVD<MatrixXd> svd(tile, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV().transpose()};
}

MeshDecomposition clements_decompose(const MatrixXd& q, SignSide side) {
  check_square_finite(q, "matrix");
  const int m = static_cast<int>(q.rows());
  const double dev = (q.transpose() * q - MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
  if (dev > 1e-8) {
    throw ValidationError("matrix is not orthogonal (max |q^T q - I| = " + std::to_string(dev) + ")");
  }
  MatrixXd w = q;
  std::vector<Op> left, right;
  for (int i = 0; i + 1 < m; ++i) {
    if (i % 2 == 0) {
      for (int j = 0; j <= i; ++j) {
        const int r = m - 1 - j, c = i - j;
        const double phi = std::atan2(-w(r, c + 1), w(r, c));
        const double s = std::sin(phi), cs = std::cos(phi);
        const VectorXd a = w.col(c), b = w.col(c + 1);
        w.col(c) = s * a + cs * b;
        w.col(c + 1) = cs * a - s * b;
        w(r, c) = 0.0;
        right.push_back({c, phi});
      }
    } else {
      for (int j = 1; j <= i + 1; ++j) {
        const int r = m + j - i - 2, c = j - 1;
        const double phi = std::atan2(w(r - 1, c), w(r, c));
        apply_mzi(w, r - 1, mzi_matrix(phi));
        w(r, c) = 0.0;
        left.push_back({r - 1, phi});
      }
    }
  }
  // Now q = L_1..L_k diag(d) R_n..R_1; vectors meet R_1 first and L_1 last.
  VectorXd d(m);
  for (int k = 0; k < m; ++k) d(k) = w(k, k) < 0 ? -1.0 : 1.0;

  std::vector<Op> seq;
  seq.reserve(left.size() + right.size());
  for (const Op& op : right) {
    seq.push_back(side == SignSide::input ? Op{op.top, pushed_through(op.phi, d, op.top)} : op);
  }
  for (auto it = left.rbegin(); it != left.rend(); ++it) {
    seq.push_back(side == SignSide::output ? Op{it->top, pushed_through(it->phi, d, it->top)} : *it);
  }
  return {place_on_lattice(m, seq), d};
}

MatrixXd mesh_matrix(int m, const std::vector<MziSetting>& mzis) {
  MatrixXd x = MatrixXd::Identity(m, m);
  std::vector<MziSetting> sorted = mzis;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const MziSetting& a, const MziSetting& b) { return a.layer < b.layer; });
  apply_mesh(sorted, x);
  return x;
}

MatrixXd recompose(int m, const MeshDecomposition& d, SignSide side) {
  const MatrixXd mesh = mesh_matrix(m, d.mzis);
  return side == SignSide::output ? MatrixXd(d.signs.asDiagonal() * mesh)
                                  : MatrixXd(mesh * d.signs.asDiagonal());
}

MatrixXd PhaseProgram::matrix() const {
  MatrixXd x = MatrixXd::Identity(m, m);
  apply_mesh(phi_v, x);
  x = (sign.cwiseProduct(sigma)).asDiagonal() * x;
  apply_mesh(phi_u, x);
  return scale * x;
}

PhaseProgram zero_program(int m) {
  const MeshDecomposition id = clements_decompose(MatrixXd::Identity(m, m));
  PhaseProgram p;
  p.m = m;
  p.scale = 0.0;
  p.phi_u = id.mzis;
  p.phi_v = id.mzis;
  p.sigma = VectorXd::Zero(m);
  p.sign = id.signs;
  return p;
}

PhaseProgram program_tile(const MatrixXd& tile) {
  check_square_finite(tile, "tile");
  const int m = static_cast<int>(tile.rows());
  if (tile.cwiseAbs().maxCoeff() == 0.0) return zero_program(m);
  const Svd s = svd_decompose(tile);
  const MeshDecomposition u = clements_decompose(s.U, SignSide::input);
  const MeshDecomposition v = clements_decompose(s.Vt, SignSide::output);
  PhaseProgram p;
  p.m = m;
  p.scale = s.sigma(0);
  p.phi_u = u.mzis;
  p.phi_v = v.mzis;
  p.sigma = (s.sigma / p.scale).cwiseMin(1.0).cwiseMax(0.0);
  p.sign = u.signs.cwiseProduct(v.signs);
  return p;
}

std::string export_program(const PhaseProgram& p) {
  json j;
  j["m"] = p.m;
  j["scale"] = p.scale;
  j["phi_u"] = settings_to_json(p.phi_u);
  j["sigma"] = std::vector<double>(p.sigma.data(), p.sigma.data() + p.sigma.size());
  j["sign"] = std::vector<double>(p.sign.data(), p.sign.data() + p.sign.size());
  j["phi_v"] = settings_to_json(p.phi_v);
  return j.dump(1);
}

PhaseProgram import_program(std::string_view text, const std::string& source) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    const auto upto = text.substr(0, std::min<std::size_t>(e.byte, text.size()));
    throw ParseError(source, 1 + static_cast<std::size_t>(std::count(upto.begin(), upto.end(), '\n')),
                     "", e.what());
  }
  if (!j.is_object()) throw ParseError(source, 1, "", "expected an object");
  for (const char* k : {"m", "scale", "phi_u", "sigma", "phi_v"}) {
    if (!j.contains(k)) throw ParseError(source, 1, k, "missing field");
  }
  if (!j["m"].is_number_integer() || j["m"].get<int>() < 1) throw ParseError(source, 1, "m", "expected a positive integer");
  if (!j["scale"].is_number()) throw ParseError(source, 1, "scale", "expected a number");
  PhaseProgram p;
  p.m = j["m"].get<int>();
  p.scale = j["scale"].get<double>();
  p.phi_u = settings_from_json(j["phi_u"], p.m, source, "phi_u");
  p.phi_v = settings_from_json(j["phi_v"], p.m, source, "phi_v");
  p.sigma = vector_from_json(j["sigma"], source, "sigma");
  p.sign = j.contains("sign") ? vector_from_json(j["sign"], source, "sign") : VectorXd::Ones(p.m);
  const auto n = static_cast<std::size_t>(p.m) * static_cast<std::size_t>(p.m - 1) / 2;
  if (p.phi_u.size() != n || p.phi_v.size() != n) {
    throw ValidationError(source + ": phase lists must hold m(m-1)/2 = " + std::to_string(n) + " entries");
  }
  if (p.sigma.size() != p.m || p.sign.size() != p.m) {
    throw ValidationError(source + ": sigma and sign must hold m entries");
  }
  if ((p.sigma.array() < 0.0).any() || (p.sigma.array() > 1.0).any()) {
    throw ValidationError(source + ": attenuator values must lie in [0, 1]");
  }
  if (((p.sign.array().abs() - 1.0).abs() > 0.0).any()) {
    throw ValidationError(source + ": sign entries must be +1 or -1");
  }
  if (p.scale < 0.0 || !std::isfinite(p.scale)) throw ValidationError(source + ": scale must be finite and >= 0");
  return p;
}

}  // namespace eposim
