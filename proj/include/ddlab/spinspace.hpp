#pragma once

// Dense operator algebra on the joint space of one system spin-1/2 and
// n_bath bath spins-1/2. The system spin is the first (most significant)
// tensor factor. Spin operators have eigenvalues +-1/2 (hbar = 1), times
// are in microseconds and frequencies in rad/us.

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ddlab {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Matrix2 = Eigen::Matrix2cd;

inline constexpr int kMaxBathSpins = 12;
inline constexpr double kHermitianTol = 1e-10;

enum class Axis { X, Y, Z };

const char* axis_name(Axis a);
Axis parse_axis(const std::string& s);

// Single-spin operators (2x2), eigenvalues +-1/2.
Matrix2 spin_half(Axis a);

// Embed a 2x2 single-site operator at `site` (0 = system) of an n_sites chain.
Matrix embed_site(const Matrix2& op, int site, int n_sites);

struct OperatorSet {
  int n_bath = 0;
  Matrix sx, sy, sz;
  std::vector<Matrix> ix, iy, iz;  // index j = 0..n_bath-1
  Matrix identity;

  Eigen::Index dim() const { return identity.rows(); }
  const Matrix& s(Axis a) const;
  const Matrix& i(Axis a, int j) const;
  // Sum over all bath spins of I_a^j.
  Matrix i_total(Axis a) const;
};

// Throws ResourceError when n_bath > cap.
OperatorSet build_operator_set(int n_bath, int cap = kMaxBathSpins);

struct DensityOperator {
  Matrix matrix;
  Eigen::Index dim() const { return matrix.rows(); }
};

struct Propagator {
  Matrix matrix;
  double duration = 0.0;  // us
};

bool is_hermitian(const Matrix& h, double tol = kHermitianTol);
double max_abs(const Matrix& m);
Matrix commutator(const Matrix& a, const Matrix& b);

// exp(-i H t) by Hermitian eigendecomposition. Throws ContractError for a
// non-Hermitian H or t < 0.
Propagator evolve(const Matrix& h, double t);

// Caches the eigendecomposition of H for repeated exponentials.
class Evolver {
 public:
  explicit Evolver(const Matrix& h);

  Propagator propagator(double t) const;
  const Eigen::VectorXd& energies() const { return energies_; }
  const Matrix& basis() const { return basis_; }

 private:
  Eigen::VectorXd energies_;
  Matrix basis_;
};

// Tr_bath over the last n_bath factors; result is 2x2.
DensityOperator partial_trace_bath(const DensityOperator& rho_tot, int n_bath);
Matrix partial_trace_bath(const Matrix& m, int n_bath);

// Tr{A rho}.
cplx overlap(const Matrix& a, const DensityOperator& rho);
cplx overlap(const Matrix& a, const Matrix& rho);

// Tr{A B} without forming the product.
cplx trace_product(const Matrix& a, const Matrix& b);

}  // namespace ddlab
