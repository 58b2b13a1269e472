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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "eposim/error.hpp"
#include "eposim/mesh.hpp"

using namespace eposim;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kPi = std::numbers::pi;

MatrixXd random_matrix(int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = u(rng);
  return a;
}

VectorXd random_vector(int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VectorXd v(m);
  for (int i = 0; i < m; ++i) v(i) = u(rng);
  return v;
}

// Applies MZIs by explicit m x m embedding, in list order.
MatrixXd embed_oracle(int m, const std::vector<MziSetting>& mzis) {
  MatrixXd acc = MatrixXd::Identity(m, m);
  for (const auto& z : mzis) {
    MatrixXd t = MatrixXd::Identity(m, m);
    const int a = z.top_mode();
    t(a, a) = std::sin(z.phi);
    t(a, a + 1) = std::cos(z.phi);
    t(a + 1, a) = std::cos(z.phi);
    t(a + 1, a + 1) = -std::sin(z.phi);
    acc = t * acc;
  }
  return acc;
}

}  // namespace

TEST_SUITE("mesh") {
  TEST_CASE("mzi matrix is orthogonal, symmetric, det -1") {
    for (double phi : {0.0, 0.3, 1.0, kPi / 2, -2.5}) {
      const Eigen::Matrix2d t = mzi_matrix(phi);
      CHECK((t.transpose() * t - Eigen::Matrix2d::Identity()).norm() < 1e-15);
      CHECK((t - t.transpose()).norm() == 0.0);
      CHECK(t.determinant() == doctest::Approx(-1.0));
    }
  }

  TEST_CASE("svd examples") {
    const Svd id = svd_decompose(MatrixXd::Identity(3, 3));
    CHECK((id.sigma - VectorXd::Ones(3)).norm() < 1e-14);
    MatrixXd d = MatrixXd::Zero(3, 3);
    d.diagonal() << 3, 2, 1;
    CHECK((svd_decompose(d).sigma - d.diagonal()).norm() < 1e-13);
    const MatrixXd a = random_matrix(8, 3);
    const Svd s = svd_decompose(a);
    CHECK((s.U * s.sigma.asDiagonal() * s.Vt - a).cwiseAbs().maxCoeff() <= 1e-10 * a.cwiseAbs().maxCoeff());
    for (int k = 1; k < 8; ++k) CHECK(s.sigma(k) <= s.sigma(k - 1));
    CHECK((s.U.transpose() * s.U - MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((s.Vt * s.Vt.transpose() - MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-10);
    MatrixXd bad = a;
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(svd_decompose(bad), ValidationError);
  }

  TEST_CASE("two-mode examples") {
    MatrixXd swap(2, 2);
    swap << 0, 1, 1, 0;
    auto d = clements_decompose(swap);
    REQUIRE(d.mzis.size() == 1);
    CHECK(std::abs(std::remainder(d.mzis[0].phi, 2 * kPi)) < 1e-12);
    MatrixXd z(2, 2);
    z << 1, 0, 0, -1;
    d = clements_decompose(z);
    REQUIRE(d.mzis.size() == 1);
    CHECK(std::abs(std::remainder(d.mzis[0].phi - kPi / 2, 2 * kPi)) < 1e-12);
  }

  TEST_CASE("clements recomposes random orthogonal matrices") {
    for (int m = 2; m <= 64; ++m) {
      const MatrixXd q = random_orthogonal(m, 100 + m);
      for (SignSide side : {SignSide::input, SignSide::output}) {
        const MeshDecomposition d = clements_decompose(q, side);
        REQUIRE(d.mzis.size() == std::size_t(m * (m - 1) / 2));
        CHECK((recompose(m, d, side) - q).cwiseAbs().maxCoeff() < 1e-8);
        for (const auto& z : d.mzis) {
          CHECK(z.layer >= 0);
          CHECK(z.layer < m);
          CHECK(z.top_mode() + 1 < m);
        }
      }
    }
  }

  TEST_CASE("mesh_matrix agrees with explicit embedding") {
    const MatrixXd q = random_orthogonal(6, 9);
    const MeshDecomposition d = clements_decompose(q);
    CHECK(d.mzis.size() == 15);
    CHECK((mesh_matrix(6, d.mzis) - embed_oracle(6, d.mzis)).cwiseAbs().maxCoeff() < 1e-13);
  }

  TEST_CASE("clements rejects non-orthogonal input") {
    CHECK_THROWS_AS(clements_decompose(random_matrix(4, 1)), ValidationError);
  }

  TEST_CASE("program_tile examples") {
    PhaseProgram p = program_tile(MatrixXd::Identity(4, 4));
    CHECK(p.scale == doctest::Approx(1.0));
    CHECK((p.sigma - VectorXd::Ones(4)).norm() < 1e-12);
    p = program_tile(2.0 * MatrixXd::Identity(4, 4));
    CHECK(p.scale == doctest::Approx(2.0));
    CHECK((p.sigma - VectorXd::Ones(4)).norm() < 1e-12);
    CHECK(p.phi_u.size() == 6);
    CHECK(p.phi_v.size() == 6);
    CHECK(p.phi_u.size() + p.phi_v.size() + std::size_t(p.sigma.size()) == 16);
  }

  TEST_CASE("zero tile maps to the zero program") {
    const PhaseProgram p = program_tile(MatrixXd::Zero(5, 5));
    CHECK(p.is_zero());
    CHECK(p.sigma.isZero());
    CHECK(mesh_forward(p, VectorXd::Ones(5)).isZero());
  }

  TEST_CASE("identity program passes basis vectors through") {
    const PhaseProgram p = program_tile(MatrixXd::Identity(4, 4));
    VectorXd e = VectorXd::Zero(4);
    e(0) = 1.0;
    CHECK((mesh_forward(p, e) - e).norm() < 1e-12);
  }

  TEST_CASE("round trip MVM on random tiles") {
    std::mt19937_64 rng(21);
    for (int m : {2, 3, 5, 8, 16, 32}) {
      const MatrixXd a = random_matrix(m, 1000 + m);
      const PhaseProgram p = program_tile(a);
      for (double s : p.sigma) {
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
      }
      double worst = 0.0;
      for (int k = 0; k < 100; ++k) {
        const VectorXd v = random_vector(m, rng);
        const VectorXd ref = a * v;
        worst = std::max(worst, (mesh_forward(p, v) - ref).norm() / ref.norm());
      }
      CAPTURE(m);
      CHECK(worst <= 1e-7);
    }
  }

  TEST_CASE("orthogonal programs conserve energy") {
    std::mt19937_64 rng(4);
    for (int m : {4, 9, 16}) {
      const PhaseProgram p = program_tile(random_orthogonal(m, m));
      CHECK((p.sigma - VectorXd::Ones(m)).cwiseAbs().maxCoeff() < 1e-12);
      const VectorXd v = random_vector(m, rng);
      CHECK(std::abs(mesh_forward(p, v).norm() - v.norm()) < 1e-8);
    }
  }

  TEST_CASE("noisy forward at 16 bits sits at the quantization floor") {
    std::mt19937_64 rng(8);
    const MatrixXd a = random_matrix(8, 77);
    const PhaseProgram p = program_tile(a);
    NoiseSpec n;
    n.seed = 3;
    for (int k = 0; k < 20; ++k) {
      const VectorXd v = random_vector(8, rng);
      const VectorXd y = mesh_forward(p, v, n);
      // input step 2^-15 through a gain <= scale, output step sqrt(8) 2^-15 times scale
      CHECK((y - a * v).cwiseAbs().maxCoeff() < p.scale * 8 * std::ldexp(1.0, -15));
    }
  }

  TEST_CASE("noise is deterministic given the seed") {
    const PhaseProgram p = program_tile(random_matrix(8, 5));
    NoiseSpec n;
    n.eps_phi = 0.01;
    n.eps_dc = 0.01;
    n.seed = 99;
    const VectorXd v = VectorXd::LinSpaced(8, -1.0, 1.0);
    const VectorXd a = mesh_forward(p, v, n, 4), b = mesh_forward(p, v, n, 4);
    CHECK((a - b).norm() == 0.0);
    n.seed = 100;
    CHECK((mesh_forward(p, v, n, 4) - a).norm() > 0.0);
  }

  TEST_CASE("dimension mismatch is rejected") {
    const PhaseProgram p = program_tile(MatrixXd::Identity(4, 4));
    CHECK_THROWS_AS(mesh_forward(p, VectorXd::Ones(3)), ValidationError);
  }

  TEST_CASE("noise spec validation") {
    NoiseSpec n;
    n.b_in = 0;
    CHECK_THROWS_AS(n.validate(), ValidationError);
    n = {};
    n.eps_phi = -1;
    CHECK_THROWS_AS(n.validate(), ValidationError);
    n = {};
    n.b_out = 17;
    CHECK_THROWS_AS(n.validate(), ValidationError);
  }

  TEST_CASE("quantizers") {
    CHECK(quantize_midrise(0.0, 1) == doctest::Approx(0.5));
    CHECK(quantize_midrise(-0.1, 1) == doctest::Approx(-0.5));
    CHECK(quantize_midrise(5.0, 4) == doctest::Approx(1.0 - 1.0 / 16));
    CHECK(quantize_midrise(-5.0, 4) == doctest::Approx(-1.0 + 1.0 / 16));
    for (double x = -1.0; x < 1.0; x += 0.01) CHECK(std::abs(quantize_midrise(x, 10) - x) <= std::ldexp(1.0, -10));
    for (double phi = -7.0; phi < 7.0; phi += 0.1) {
      const double q = quantize_phase(phi, 8);
      CHECK(std::abs(std::remainder(q - phi, 2 * kPi)) <= kPi / 256 + 1e-12);
      CHECK(q >= -kPi);
      CHECK(q < kPi);
    }
  }

  TEST_CASE("matrix error is zero without noise") {
    NoiseSpec n;
    CHECK(measure_matrix_error(8, n, 5).mean < 1e-25);
  }

  TEST_CASE("matrix error grows linearly in m under naive phase noise") {
    NoiseSpec n;
    n.eps_phi = 1e-3;
    n.seed = 17;
    double prev = measure_matrix_error(8, n, 200).mean;
    CHECK(prev <= 3 * 8 * 1e-6);
    CHECK(prev >= 8 * 1e-6 / 3);
    for (int m : {16, 32}) {
      const double cur = measure_matrix_error(m, n, 200).mean;
      CHECK(cur / prev >= 1.5);
      CHECK(cur / prev <= 2.7);
      prev = cur;
    }
  }

  TEST_CASE("error correction removes coupler error exactly") {
    NoiseSpec n;
    n.eps_dc = 0.02;
    n.corrected = true;
    CHECK(measure_matrix_error(16, n, 10).mean < 1e-24);
    n.corrected = false;
    CHECK(measure_matrix_error(16, n, 10).mean > 1e-5);
  }

  TEST_CASE("bit estimate examples and monotonicity") {
    const ErrorModel c{1.954, 3.919, 3.919};
    NoiseSpec n;
    n.b_in = 10;
    CHECK(estimate_output_bits(64, n, ProgrammingMode::naive, c) == doctest::Approx(10.0));
    n.eps_dc = 1e-3;
    CHECK(estimate_output_bits(64, n, ProgrammingMode::naive, c) <=
          estimate_output_bits(64, n, ProgrammingMode::error_corrected, c));
    CHECK(estimate_output_bits(256, n, ProgrammingMode::error_corrected, c) >= 8.0);
    for (auto mode : {ProgrammingMode::naive, ProgrammingMode::error_corrected}) {
      NoiseSpec a = n;
      a.eps_phi = 1e-4;
      double prev = 1e9;
      for (int m = 2; m <= 512; m *= 2) {
        const double b = estimate_output_bits(m, a, mode, c);
        CHECK(b <= prev);
        prev = b;
      }
      NoiseSpec more = a;
      more.eps_phi *= 2;
      CHECK(estimate_output_bits(64, more, mode, c) <= estimate_output_bits(64, a, mode, c));
      more = a;
      more.eps_dc *= 2;
      CHECK(estimate_output_bits(64, more, mode, c) <= estimate_output_bits(64, a, mode, c));
      more = a;
      more.b_in += 2;
      CHECK(estimate_output_bits(64, more, mode, c) >= estimate_output_bits(64, a, mode, c));
    }
    n.eps_phi = 10.0;
    CHECK(estimate_output_bits(64, n, ProgrammingMode::naive, c) == 0.0);
  }

  TEST_CASE("calibrated constants land near the per-MZI analytic value") {
    // Each MZI phase error moves a 2x2 block by |dT|_F^2 = 2 eps^2, and there are ~m^2 of them.
    const ErrorModel c = calibrate_error_model(2, 30, {8, 16});
    CHECK(c.c1 > 1.3);
    CHECK(c.c1 < 2.5);
    CHECK(c.c2 > 2.6);
    CHECK(c.c2 < 5.0);
    CHECK(c.c3 == c.c2);
  }

  TEST_CASE("precision study agrees with the calibrated model") {
    const ErrorModel c{1.954, 3.919, 3.919};
    NoiseSpec n;
    n.b_in = 10;
    n.b_weight = 12;
    n.eps_dc = 1e-3;
    n.seed = 5;
    for (auto mode : {ProgrammingMode::naive, ProgrammingMode::error_corrected}) {
      const PrecisionPoint p = precision_study(16, n, 60, 2, mode, c);
      CHECK(std::abs(p.measured_bits - p.model_bits) < 0.3);
    }
    NoiseSpec clean;
    clean.b_in = 10;
    const PrecisionPoint q = precision_study(16, clean, 20, 4, ProgrammingMode::naive, c);
    CHECK(q.measured_bits == doctest::Approx(10.0).epsilon(0.03));
  }

  TEST_CASE("program export and import round-trip") {
    const PhaseProgram p = program_tile(random_matrix(5, 8));
    const PhaseProgram back = import_program(export_program(p));
    CHECK(back.m == p.m);
    CHECK(back.scale == p.scale);
    CHECK(back.phi_u == p.phi_u);
    CHECK(back.phi_v == p.phi_v);
    CHECK(back.sigma == p.sigma);
    CHECK(back.sign == p.sign);
    CHECK_THROWS_AS(import_program("{\"m\": 2}"), ParseError);
    CHECK_THROWS_AS(import_program("{not json"), ParseError);
  }
}
