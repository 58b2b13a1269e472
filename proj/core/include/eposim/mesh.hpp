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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace eposim {

/// Transfer matrix of one MZI: [[sin phi, cos phi], [cos phi, -sin phi]].
Eigen::Matrix2d mzi_matrix(double phi);

/// One MZI on the rectangular lattice. Even layers couple modes (2p, 2p+1),
/// odd layers couple (2p+1, 2p+2). Layer 0 is traversed first.
struct MziSetting {
  int layer = 0;
  int pos = 0;
  double phi = 0.0;

  int top_mode() const { return 2 * pos + (layer % 2); }
  bool operator==(const MziSetting&) const = default;
};

struct Svd {
  Eigen::MatrixXd U;
  Eigen::VectorXd sigma;  // nonincreasing, nonnegative
  Eigen::MatrixXd Vt;
};

/// Throws ValidationError on non-finite or non-square input.
Svd svd_decompose(const Eigen::MatrixXd& tile);

/// Which side of the MZI lattice carries the residual diagonal of +-1 signs.
enum class SignSide { input, output };

/// q = diag(signs) * mesh (output side) or q = mesh * diag(signs) (input side).
struct MeshDecomposition {
  std::vector<MziSetting> mzis;  // m(m-1)/2 entries, sorted by layer
  Eigen::VectorXd signs;
};

/// Real rectangular decomposition of an orthogonal matrix.
/// Throws ValidationError when q is not orthogonal to 1e-8.
MeshDecomposition clements_decompose(const Eigen::MatrixXd& q, SignSide side = SignSide::output);

/// Orthogonal matrix realized by the given MZIs (applied in layer order).
Eigen::MatrixXd mesh_matrix(int m, const std::vector<MziSetting>& mzis);
Eigen::MatrixXd recompose(int m, const MeshDecomposition& d, SignSide side);

/// Phases realizing scale * U * diag(sign .* sigma) * Vt.
struct PhaseProgram {
  int m = 0;
  double scale = 0.0;
  std::vector<MziSetting> phi_u;  // U mesh, signs folded onto its input side
  Eigen::VectorXd sigma;          // attenuators in [0, 1]
  Eigen::VectorXd sign;           // +-1 per attenuator column (0/pi phase)
  std::vector<MziSetting> phi_v;  // Vt mesh, signs folded onto its output side

  bool is_zero() const { return scale == 0.0; }
  /// Noise-free matrix the program realizes, including scale.
  Eigen::MatrixXd matrix() const;
};

/// All-zero tile yields the zero program (scale 0, attenuators 0).
PhaseProgram program_tile(const Eigen::MatrixXd& tile);
PhaseProgram zero_program(int m);

std::string export_program(const PhaseProgram& p);
/// Throws ParseError on malformed text and ValidationError on inconsistent counts.
PhaseProgram import_program(std::string_view text, const std::string& source = "<program>");

struct NoiseSpec {
  double eps_phi = 0.0;  // per-MZI phase error std, radians
  double eps_dc = 0.0;   // per-coupler mixing-angle error std, radians
  int b_in = 16;
  int b_out = 16;
  int b_weight = 0;             // phase quantization bits, 0 disables
  double out_full_scale = 0.0;  // ADC range is [-fs, fs]; 0 selects sqrt(m)
  bool corrected = false;       // coupler errors are known and folded into the programmed phases
  std::uint64_t seed = 0;

  /// Throws ValidationError on out-of-range fields.
  void validate() const;
};

/// Deterministic per-trial seed derived from (seed, trial).
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

/// Symmetric mid-rise quantizer on [-fs, fs] with saturation.
double quantize_midrise(double x, int bits, double full_scale = 1.0);
/// Mid-rise quantizer on the phase circle [-pi, pi).
double quantize_phase(double phi, int bits);

/// One sampled hardware realization of a program under a NoiseSpec.
class MeshInstance {
 public:
  MeshInstance(const PhaseProgram& p, const NoiseSpec& noise, std::uint64_t trial = 0);

  /// Quantizes v to b_in bits, propagates, quantizes to b_out bits, applies scale.
  Eigen::VectorXd forward(const Eigen::VectorXd& v) const;
  /// Realized matrix without converter quantization, excluding scale.
  Eigen::MatrixXd matrix() const;

 struct Stage {
    int top;
    Eigen::Matrix2d t;
  };
  /// Applies one 2x2 stage to rows (top, top+1) of x.
  static void apply_stage(Eigen::Ref<Eigen::MatrixXd> x, const Stage& s);

 private:
  void propagate(Eigen::Ref<Eigen::MatrixXd> x) const;

  int m_;
  double scale_;
  NoiseSpec noise_;
  std::vector<Stage> v_stages_;
  Eigen::VectorXd column_;
  std::vector<Stage> u_stages_;
};

/// Without noise returns program.matrix() * v exactly (no quantization).
Eigen::VectorXd mesh_forward(const PhaseProgram& p, const Eigen::VectorXd& v,
                             const std::optional<NoiseSpec>& noise = std::nullopt,
                             std::uint64_t trial = 0);

struct MatrixErrorStats {
  double mean = 0.0;
  std::vector<double> samples;
};

/// Monte-Carlo matrix error over random orthogonal tiles, naive programming.
/// Each sample is ||M_real - M||_F^2 / m.
MatrixErrorStats measure_matrix_error(int m, const NoiseSpec& noise, int trials);

enum class ProgrammingMode { naive, error_corrected };

/// Constants of dM^2 = c1 m eps_phi^2 + (naive ? c2 m eps_dc^2 : c3 m^2 eps_dc^4).
struct ErrorModel {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
};

double model_matrix_error(int m, const NoiseSpec& noise, ProgrammingMode mode, const ErrorModel& c);
double estimate_output_bits(int m, const NoiseSpec& noise, ProgrammingMode mode, const ErrorModel& c);

/// Least-squares fit of c1 and c2 against measure_matrix_error. c3 is set to c2.
ErrorModel calibrate_error_model(std::uint64_t seed, int trials,
                                 const std::vector<int>& sizes = {8, 16, 32, 64},
                                 double eps = 1e-3);

/// Haar-random orthogonal matrix.
Eigen::MatrixXd random_orthogonal(int m, std::uint64_t seed);

struct PrecisionPoint {
  int m = 0;
  int trials = 0;
  double rms_error = 0.0;  // sqrt(sum |y_real - y|^2 / sum |v|^2)
  double measured_bits = 0.0;
  double model_bits = 0.0;
};

/// Monte-Carlo output precision on random orthogonal tiles with uniform inputs in [-1, 1].
PrecisionPoint precision_study(int m, const NoiseSpec& noise, int trials, int vectors_per_trial,
                               ProgrammingMode mode, const ErrorModel& c);

/// Phase error std equivalent to mid-rise quantization over 2*pi.
double phase_quantization_eps(int bits);

}  // namespace eposim
