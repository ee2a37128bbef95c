#include "ddlab/spinspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ddlab/errors.hpp"

namespace ddlab {

const char* axis_name(Axis a) {
  switch (a) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::Z: return "z";
  }
  return "?";
}

Axis parse_axis(const std::string& s) {
  if (s == "x" || s == "X") return Axis::X;
  if (s == "y" || s == "Y") return Axis::Y;
  if (s == "z" || s == "Z") return Axis::Z;
  throw ContractError("unknown axis '" + s + "' (expected x, y or z)");
}

Matrix2 spin_half(Axis a) {
  Matrix2 m;
  switch (a) {
    case Axis::X: m << 0.0, 0.5, 0.5, 0.0; break;
    case Axis::Y: m << 0.0, cplx(0.0, -0.5), cplx(0.0, 0.5), 0.0; break;
    case Axis::Z: m << 0.5, 0.0, 0.0, -0.5; break;
  }
  return m;
}

Matrix embed_site(const Matrix2& op, int site, int n_sites) {
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  const int shift = n_sites - 1 - site;
  const Eigen::Index bit = Eigen::Index{1} << shift;
  Matrix out = Matrix::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const int c = static_cast<int>((col >> shift) & 1);
    const Eigen::Index base = col & ~bit;
    for (int r = 0; r < 2; ++r) {
      const cplx v = op(r, c);
      if (v != cplx(0.0)) out(base | (static_cast<Eigen::Index>(r) << shift), col) = v;
    }
  }
  return out;
}

const Matrix& OperatorSet::s(Axis a) const {
  switch (a) {
    case Axis::X: return sx;
    case Axis::Y: return sy;
    case Axis::Z: return sz;
  }
  return sz;
}

const Matrix& OperatorSet::i(Axis a, int j) const {
  switch (a) {
    case Axis::X: return ix.at(j);
    case Axis::Y: return iy.at(j);
    case Axis::Z: return iz.at(j);
  }
  return iz.at(j);
}

Matrix OperatorSet::i_total(Axis a) const {
  Matrix sum = Matrix::Zero(dim(), dim());
  for (int j = 0; j < n_bath; ++j) sum += i(a, j);
  return sum;
}

OperatorSet build_operator_set(int n_bath, int cap) {
  if (n_bath < 0) throw ContractError("n_bath must be non-negative");
  if (n_bath > cap) {
    const double dim = std::ldexp(1.0, n_bath + 1);
    throw ResourceError("n_bath = " + std::to_string(n_bath) + " exceeds cap " +
                        std::to_string(cap) + " (Hilbert dimension " +
                        std::to_string(static_cast<long long>(dim)) + ")");
  }
  const int n_sites = n_bath + 1;
  OperatorSet ops;
  ops.n_bath = n_bath;
  ops.sx = embed_site(spin_half(Axis::X), 0, n_sites);
  ops.sy = embed_site(spin_half(Axis::Y), 0, n_sites);
  ops.sz = embed_site(spin_half(Axis::Z), 0, n_sites);
  for (int j = 0; j < n_bath; ++j) {
    ops.ix.push_back(embed_site(spin_half(Axis::X), j + 1, n_sites));
    ops.iy.push_back(embed_site(spin_half(Axis::Y), j + 1, n_sites));
    ops.iz.push_back(embed_site(spin_half(Axis::Z), j + 1, n_sites));
  }
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  ops.identity = Matrix::Identity(dim, dim);
  return ops;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

bool is_hermitian(const Matrix& h, double tol) {
  if (h.rows() != h.cols()) return false;
  return max_abs(h - h.adjoint()) <= tol * std::max(1.0, max_abs(h));
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Evolver::Evolver(const Matrix& h) {
  if (!is_hermitian(h)) throw ContractError("evolve: Hamiltonian is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  energies_ = es.eigenvalues();
  basis_ = es.eigenvectors();
}

Propagator Evolver::propagator(double t) const {
  if (!(t >= 0.0)) throw ContractError("evolve: duration must be >= 0");
  Eigen::VectorXcd phases(energies_.size());
  for (Eigen::Index k = 0; k < energies_.size(); ++k) phases(k) = std::polar(1.0, -energies_(k) * t);
  Matrix u = basis_ * phases.asDiagonal() * basis_.adjoint();
  return {std::move(u), t};
}

Propagator evolve(const Matrix& h, double t) {
  if (!(t >= 0.0)) throw ContractError("evolve: duration must be >= 0");
  return Evolver(h).propagator(t);
}

Matrix partial_trace_bath(const Matrix& m, int n_bath) {
  const Eigen::Index dim_bath = Eigen::Index{1} << n_bath;
  if (m.rows() != 2 * dim_bath || m.cols() != 2 * dim_bath) {
    throw ContractError("partial_trace_bath: dimension " + std::to_string(m.rows()) +
                        " does not match n_bath = " + std::to_string(n_bath));
  }
  Matrix out(2, 2);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) out(r, c) = m.block(r * dim_bath, c * dim_bath, dim_bath, dim_bath).trace();
  return out;
}

DensityOperator partial_trace_bath(const DensityOperator& rho_tot, int n_bath) {
  return {partial_trace_bath(rho_tot.matrix, n_bath)};
}

cplx trace_product(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) throw ContractError("trace_product: dimension mismatch");
  // Tr{AB} = sum_ij A_ij B_ji
  return (a.array() * b.transpose().array()).sum();
}

cplx overlap(const Matrix& a, const Matrix& rho) {
  if (a.rows() != rho.rows() || a.cols() != rho.cols()) throw ContractError("overlap: dimension mismatch");
  return trace_product(a, rho);
}

cplx overlap(const Matrix& a, const DensityOperator& rho) { return overlap(a, rho.matrix); }

}  // namespace ddlab
