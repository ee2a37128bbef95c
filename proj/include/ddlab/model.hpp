#pragma once

// Rotating-frame Hamiltonians of a central spin coupled to a dipolar spin bath.
//
//   H_SE = S_z sum_j b_j I_z^j
//   H_E  = sum_{i<j} d_ij [2 I_z^i I_z^j - (I_x^i I_x^j + I_y^i I_y^j)]
//   H_f  = H_SE + H_E           (no Zeeman terms in the rotating frame)
//
// Couplings are angular frequencies in rad/us.

#include <cstdint>
#include <memory>
#include <utility>

#include "ddlab/spinspace.hpp"

namespace ddlab {

// 2*pi * 1e-3: kHz (plain frequency) -> rad/us.
inline constexpr double kKhzToRadPerUs = 6.283185307179586 * 1e-3;

class SpinBathModel {
 public:
  // Validates shapes, symmetry and zero diagonal of d.
  SpinBathModel(Eigen::VectorXd b, Eigen::MatrixXd d, int cap = kMaxBathSpins);

  int n_bath() const { return static_cast<int>(b_.size()); }
  const Eigen::VectorXd& b() const { return b_; }
  const Eigen::MatrixXd& d() const { return d_; }
  const OperatorSet& ops() const { return *ops_; }
  std::shared_ptr<const OperatorSet> shared_ops() const { return ops_; }

 private:
  Eigen::VectorXd b_;
  Eigen::MatrixXd d_;
  std::shared_ptr<const OperatorSet> ops_;
};

Matrix build_h_se(const SpinBathModel& model);
Matrix build_h_e(const SpinBathModel& model);
Matrix build_h_free(const SpinBathModel& model);

// sum_u S_u (a_u + sum_j bu(u, j) I_z^j); rows of bu are x, y, z.
Matrix build_h_error(const Eigen::Vector3d& a, const Eigen::MatrixXd& bu, const SpinBathModel& model);

enum class CouplingMode { Explicit, Random };
enum class CouplingDistribution { UniformSymmetric, Gaussian };

struct CouplingSpec {
  CouplingMode mode = CouplingMode::Random;
  int n_bath = 7;
  double b_scale = 0.0;  // rad/us
  double d_scale = 0.0;  // rad/us
  CouplingDistribution distribution = CouplingDistribution::UniformSymmetric;
  std::uint64_t seed = 0;
};

struct Couplings {
  Eigen::VectorXd b;
  Eigen::MatrixXd d;
};

// Deterministic for a fixed seed. Every |b_j| <= b_scale and |d_ij| <= d_scale;
// the gaussian draw uses sd = scale/2 truncated at +-scale.
Couplings sample_couplings(const CouplingSpec& spec);

}  // namespace ddlab
