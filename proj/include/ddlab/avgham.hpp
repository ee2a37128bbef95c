#pragma once

// Toggling-frame average Hamiltonians (Magnus orders 0 and 1) of a pulse
// timeline, and numerical checks of the cancellation claims.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ddlab/model.hpp"
#include "ddlab/pulsegen.hpp"
#include "ddlab/sequences.hpp"

namespace ddlab {

struct ToggledSegment {
  double duration = 0.0;  // us
  Matrix h_tilde;
};

enum class PulseModelKind { Ideal, Errored };

struct PulseModel {
  PulseModelKind kind = PulseModelKind::Ideal;
  ErrorModel errors;
  double rf_scale = 1.0;

  static PulseModel ideal() { return {}; }
  static PulseModel errored(const ErrorModel& e, double rf_scale = 1.0) {
    return {PulseModelKind::Errored, e, rf_scale};
  }
};

// Segments of the first cycle of `tl`. Ideal mode needs delta pulses. In
// errored mode each pulse is split into its ideal part and an error
// rotation; the rotation generator and the pulse duration are folded into
// the following free segment (cyclically for the last pulse).
std::vector<ToggledSegment> toggling_frames(const Timeline& tl, const Matrix& h_free, const OperatorSet& ops,
                                            const PulseModel& pulse_model = PulseModel::ideal());

// Product of the ideal pulses of one cycle.
Matrix cycle_frame(const Timeline& tl, const OperatorSet& ops);

// order 0 or 1 term (not cumulative).
Matrix average_hamiltonian(const std::vector<ToggledSegment>& segments, int order);

// frame * exp(-i (H0 + H1) tau_c).
Matrix magnus_propagator(const std::vector<ToggledSegment>& segments, const Matrix& frame);

// Hermitian G with exp(-i G) = U, eigenphases in (-pi, pi].
Matrix unitary_generator(const Matrix& u);

// H = sum_u S_u (x) B_u + 1 (x) B_0.
struct OperatorDecomposition {
  Eigen::Vector3d a = Eigen::Vector3d::Zero();      // Tr(B_u)/d_bath
  Eigen::MatrixXd b;                                // 3 x n_bath, I_z^j coefficients of B_u
  Matrix system_part;                               // H - 1 (x) B_0
  Matrix bath_part;                                 // 1 (x) B_0
};

OperatorDecomposition decompose(const Matrix& h, const OperatorSet& ops);

struct ClaimParams {
  double tau = 10.0;             // us
  double flip_angle_error = 0.05;
  std::uint64_t seed = 1;
};

struct ClaimReport {
  std::string claim;
  std::string description;
  std::map<std::string, double> norms;
  double tolerance = 1e-10;
  bool pass = false;
};

std::vector<std::string> claim_ids();

// Throws ContractError for an unknown id.
ClaimReport verify_claim(const std::string& claim_id, const SpinBathModel& model, const ClaimParams& params = {});

}  // namespace ddlab
