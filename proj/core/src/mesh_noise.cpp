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
#include <random>

#include "eposim/error.hpp"
#include "eposim/mesh.hpp"

namespace eposim {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Eigen::Matrix2d rotation(double d) {
  Eigen::Matrix2d r;
  r << std::cos(d), -std::sin(d), std::sin(d), std::cos(d);
  return r;
}

}  // namespace

void NoiseSpec::validate() const {
  if (!(eps_phi >= 0.0) || !(eps_dc >= 0.0)) throw ValidationError("noise eps_phi and eps_dc must be >= 0");
  if (b_in < 1 || b_in > 16) throw ValidationError("noise b_in must lie in [1, 16]");
  if (b_out < 1 || b_out > 16) throw ValidationError("noise b_out must lie in [1, 16]");
  if (b_weight < 0 || b_weight > 24) throw ValidationError("noise b_weight must lie in [0, 24]");
  if (out_full_scale < 0.0) throw ValidationError("noise out_full_scale must be >= 0");
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return splitmix64(splitmix64(seed) ^ (trial * 0xD1B54A32D192ED03ULL + 1));
}

double quantize_midrise(double x, int bits, double fs) {
  const double step = 2.0 * fs / std::ldexp(1.0, bits);
  const double top = fs - step / 2;
  const double q = (std::floor(x / step) + 0.5) * step;
  return std::clamp(q, -top, top);
}

double quantize_phase(double phi, int bits) {
  constexpr double pi = std::numbers::pi;
  const double step = 2 * pi / std::ldexp(1.0, bits);
  const double wrapped = phi - 2 * pi * std::floor((phi + pi) / (2 * pi));
  return -pi + (std::floor((wrapped + pi) / step) + 0.5) * step;
}

MeshInstance::MeshInstance(const PhaseProgram& p, const NoiseSpec& noise, std::uint64_t trial)
    : m_(p.m), scale_(p.scale), noise_(noise) {
  noise.validate();
  std::mt19937_64 rng(trial_seed(noise.seed, trial));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const bool quant = noise.b_weight > 0;
  // Draws happen unconditionally so streams stay aligned across noise levels.
  auto stage = [&](const MziSetting& z) {
    const double e = noise.eps_phi * gauss(rng);
    const double d1 = noise.eps_dc * gauss(rng);
    const double d2 = noise.eps_dc * gauss(rng);
    // R(d2) T(phi) R(d1) = T(phi - d2 + d1), so a known coupler error is a phase offset.
    const double target = noise.corrected ? z.phi + d2 - d1 : z.phi;
    const double phi = (quant ? quantize_phase(target, noise.b_weight) : target) + e;
    return Stage{z.top_mode(), rotation(d2) * mzi_matrix(phi) * rotation(d1)};
  };
  for (const auto& z : p.phi_v) v_stages_.push_back(stage(z));
  column_.resize(m_);
  for (int k = 0; k < m_; ++k) {
    const double theta0 = std::asin(std::clamp(p.sigma(k), 0.0, 1.0));
    const double theta = (quant ? quantize_phase(theta0, noise.b_weight) : theta0) + noise.eps_phi * gauss(rng);
    column_(k) = p.sign(k) * std::sin(theta);
  }
  for (const auto& z : p.phi_u) u_stages_.push_back(stage(z));
}

void MeshInstance::propagate(Eigen::Ref<MatrixXd> x) const {
  for (const Stage& s : v_stages_) apply_stage(x, s);
  x = column_.asDiagonal() * x;
  for (const Stage& s : u_stages_) apply_stage(x, s);
}

void MeshInstance::apply_stage(Eigen::Ref<MatrixXd> x, const Stage& s) {
  const Eigen::RowVectorXd a = x.row(s.top);
  const Eigen::RowVectorXd b = x.row(s.top + 1);
  x.row(s.top) = s.t(0, 0) * a + s.t(0, 1) * b;
  x.row(s.top + 1) = s.t(1, 0) * a + s.t(1, 1) * b;
}

VectorXd MeshInstance::forward(const VectorXd& v) const {
  if (v.size() != m_) {
    throw ValidationError("input vector has " + std::to_string(v.size()) + " entries, mesh has " +
                          std::to_string(m_));
  }
  MatrixXd x(m_, 1);
  for (int k = 0; k < m_; ++k) x(k, 0) = quantize_midrise(v(k), noise_.b_in);
  propagate(x);
  const double fs = noise_.out_full_scale > 0.0 ? noise_.out_full_scale : std::sqrt(double(m_));
  VectorXd y(m_);
  for (int k = 0; k < m_; ++k) y(k) = scale_ * quantize_midrise(x(k, 0), noise_.b_out, fs);
  return y;
}

MatrixXd MeshInstance::matrix() const {
  MatrixXd x = MatrixXd::Identity(m_, m_);
  propagate(x);
  return x;
}

VectorXd mesh_forward(const PhaseProgram& p, const VectorXd& v, const std::optional<NoiseSpec>& noise,
                      std::uint64_t trial) {
  if (v.size() != p.m) {
    throw ValidationError("input vector has " + std::to_string(v.size()) + " entries, mesh has " +
                          std::to_string(p.m));
  }
  if (noise) return MeshInstance(p, *noise, trial).forward(v);
  if (p.is_zero()) return VectorXd::Zero(p.m);
  MatrixXd x = v;
  for (const auto& z : p.phi_v) MeshInstance::apply_stage(x, {z.top_mode(), mzi_matrix(z.phi)});
  x = p.sign.cwiseProduct(p.sigma).asDiagonal() * x;
  for (const auto& z : p.phi_u) MeshInstance::apply_stage(x, {z.top_mode(), mzi_matrix(z.phi)});
  return p.scale * x.col(0);
}

MatrixXd random_orthogonal(int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXd g(m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ();
  const MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < m; ++k) {
    if (r(k, k) < 0) q.col(k) *= -1.0;
  }
  return q;
}

MatrixErrorStats measure_matrix_error(int m, const NoiseSpec& noise, int trials) {
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (m < 2) throw ValidationError("mesh size must be >= 2");
  noise.validate();
  MatrixErrorStats st;
  st.samples.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    const auto tt = static_cast<std::uint64_t>(t);
    const MatrixXd q = random_orthogonal(m, trial_seed(trial_seed(noise.seed, tt), 1));
    const PhaseProgram p = program_tile(q);
    const MatrixXd real = p.scale * MeshInstance(p, noise, tt).matrix();
    st.samples.push_back((real - q).squaredNorm() / m);
  }
  double sum = 0.0;
  for (double s : st.samples) sum += s;
  st.mean = sum / trials;
  return st;
}

double model_matrix_error(int m, const NoiseSpec& n, ProgrammingMode mode, const ErrorModel& c) {
  const double dm = double(m);
  const double dc = mode == ProgrammingMode::naive ? c.c2 * dm * n.eps_dc * n.eps_dc
                                                   : c.c3 * dm * dm * std::pow(n.eps_dc, 4);
  return c.c1 * dm * n.eps_phi * n.eps_phi + dc;
}

double estimate_output_bits(int m, const NoiseSpec& n, ProgrammingMode mode, const ErrorModel& c) {
  n.validate();
  const double dv_in = std::ldexp(1.0, -n.b_in);
  const double total = dv_in * dv_in + model_matrix_error(m, n, mode, c);
  return std::max(0.0, -0.5 * std::log2(total));
}

ErrorModel calibrate_error_model(std::uint64_t seed, int trials, const std::vector<int>& sizes, double eps) {
  auto fit = [&](bool phase) {
    double sxy = 0.0, sxx = 0.0;
    for (int m : sizes) {
      NoiseSpec n;
      n.seed = seed;
      (phase ? n.eps_phi : n.eps_dc) = eps;
      const double x = m * eps * eps;
      sxy += x * measure_matrix_error(m, n, trials).mean;
      sxx += x * x;
    }
    return sxy / sxx;
  };
  ErrorModel c;
  c.c1 = fit(true);
  c.c2 = fit(false);
  c.c3 = c.c2;
  return c;
}

double phase_quantization_eps(int bits) {
  return 2 * std::numbers::pi * std::ldexp(1.0, -bits) / std::sqrt(12.0);
}

PrecisionPoint precision_study(int m, const NoiseSpec& noise, int trials, int vectors_per_trial,
                               ProgrammingMode mode, const ErrorModel& c) {
  if (trials < 1 || vectors_per_trial < 1) throw ValidationError("trials and vectors per trial must be >= 1");
  if (m < 2) throw ValidationError("mesh size must be >= 2");
  NoiseSpec n = noise;
  n.corrected = mode == ProgrammingMode::error_corrected;
  n.validate();
  double err = 0.0, ref = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto tt = static_cast<std::uint64_t>(t);
    const MatrixXd q = random_orthogonal(m, trial_seed(trial_seed(n.seed, tt), 1));
    const PhaseProgram p = program_tile(q);
    const MeshInstance mesh(p, n, tt);
    std::mt19937_64 rng(trial_seed(trial_seed(n.seed, tt), 2));
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int k = 0; k < vectors_per_trial; ++k) {
      VectorXd v(m);
      for (int i = 0; i < m; ++i) v(i) = uni(rng);
      err += (mesh.forward(v) - q * v).squaredNorm();
      ref += v.squaredNorm();
    }
  }
  PrecisionPoint r;
  r.m = m;
  r.trials = trials;
  r.rms_error = std::sqrt(err / ref);
  r.measured_bits = r.rms_error > 0.0 ? std::max(0.0, -std::log2(r.rms_error)) : 64.0;
  NoiseSpec model = n;
  if (n.b_weight > 0) {
    const double q = phase_quantization_eps(n.b_weight);
    model.eps_phi = std::sqrt(n.eps_phi * n.eps_phi + q * q);
  }
  r.model_bits = estimate_output_bits(m, model, mode, c);
  return r;
}

}  // namespace eposim
