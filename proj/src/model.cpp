#include "ddlab/model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "ddlab/errors.hpp"

namespace ddlab {

SpinBathModel::SpinBathModel(Eigen::VectorXd b, Eigen::MatrixXd d, int cap)
    : b_(std::move(b)), d_(std::move(d)) {
  const auto n = b_.size();
  if (d_.rows() != n || d_.cols() != n) {
    throw ContractError("SpinBathModel: d must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (d_(i, i) != 0.0) throw ContractError("SpinBathModel: d must have zero diagonal");
    for (Eigen::Index j = 0; j < i; ++j)
      if (d_(i, j) != d_(j, i)) throw ContractError("SpinBathModel: d must be symmetric");
  }
  if (!b_.allFinite() || !d_.allFinite()) throw ContractError("SpinBathModel: non-finite coupling");
  ops_ = std::make_shared<const OperatorSet>(build_operator_set(static_cast<int>(n), cap));
}

namespace {

// +1/2 for a 0 bit (spin up) at site k of an n_sites chain, system at site 0.
double site_z(Eigen::Index state, int k, int n_sites) {
  return ((state >> (n_sites - 1 - k)) & 1) ? -0.5 : 0.5;
}

}  // namespace

Matrix build_h_se(const SpinBathModel& model) {
  const auto& ops = model.ops();
  const int n_sites = model.n_bath() + 1;
  Matrix h = Matrix::Zero(ops.dim(), ops.dim());
  for (Eigen::Index s = 0; s < ops.dim(); ++s) {
    double field = 0.0;
    for (int j = 0; j < model.n_bath(); ++j) field += model.b()(j) * site_z(s, j + 1, n_sites);
    h(s, s) = site_z(s, 0, n_sites) * field;
  }
  return h;
}

Matrix build_h_e(const SpinBathModel& model) {
  const auto& ops = model.ops();
  const int n_sites = model.n_bath() + 1;
  Matrix h = Matrix::Zero(ops.dim(), ops.dim());
  for (int i = 0; i < model.n_bath(); ++i) {
    for (int j = i + 1; j < model.n_bath(); ++j) {
      const double dij = model.d()(i, j);
      if (dij == 0.0) continue;
      const Eigen::Index mi = Eigen::Index(1) << (n_sites - 2 - i);
      const Eigen::Index mj = Eigen::Index(1) << (n_sites - 2 - j);
      for (Eigen::Index s = 0; s < ops.dim(); ++s) {
        const double zi = site_z(s, i + 1, n_sites), zj = site_z(s, j + 1, n_sites);
        h(s, s) += 2.0 * dij * zi * zj;
        // -(IxIx + IyIy) = -(I+I- + I-I+)/2 swaps antiparallel pairs
        if (zi != zj) h(s ^ mi ^ mj, s) += -0.5 * dij;
      }
    }
  }
  return h;
}

Matrix build_h_free(const SpinBathModel& model) { return build_h_se(model) + build_h_e(model); }

Matrix build_h_error(const Eigen::Vector3d& a, const Eigen::MatrixXd& bu, const SpinBathModel& model) {
  const auto& ops = model.ops();
  if (bu.rows() != 3 || bu.cols() != model.n_bath()) {
    throw ContractError("build_h_error: coupling matrix must be 3 x n_bath");
  }
  Matrix h = Matrix::Zero(ops.dim(), ops.dim());
  const Axis axes[3] = {Axis::X, Axis::Y, Axis::Z};
  for (int u = 0; u < 3; ++u) {
    Matrix field = a(u) * ops.identity;
    for (int j = 0; j < model.n_bath(); ++j) field += bu(u, j) * ops.iz[j];
    h += ops.s(axes[u]) * field;
  }
  return h;
}

namespace {

double draw(std::mt19937_64& rng, double scale, CouplingDistribution dist) {
  if (scale == 0.0) return 0.0;
  if (dist == CouplingDistribution::UniformSymmetric) {
    return std::uniform_real_distribution<double>(-scale, scale)(rng);
  }
  std::normal_distribution<double> normal(0.0, 0.5 * scale);
  for (;;) {
    const double x = normal(rng);
    if (std::abs(x) <= scale) return x;
  }
}

}  // namespace

Couplings sample_couplings(const CouplingSpec& spec) {
  if (spec.mode != CouplingMode::Random) throw ContractError("sample_couplings: spec is not in random mode");
  if (!(spec.b_scale >= 0.0) || !(spec.d_scale > 0.0)) {
    throw ContractError("sample_couplings: scales must be positive (b_scale may be 0)");
  }
  if (spec.n_bath < 0) throw ContractError("sample_couplings: n_bath must be non-negative");
  std::mt19937_64 rng(spec.seed);
  Couplings c;
  c.b.resize(spec.n_bath);
  for (int j = 0; j < spec.n_bath; ++j) c.b(j) = draw(rng, spec.b_scale, spec.distribution);
  c.d = Eigen::MatrixXd::Zero(spec.n_bath, spec.n_bath);
  for (int i = 0; i < spec.n_bath; ++i)
    for (int j = i + 1; j < spec.n_bath; ++j) c.d(i, j) = c.d(j, i) = draw(rng, spec.d_scale, spec.distribution);
  return c;
}

}  // namespace ddlab
