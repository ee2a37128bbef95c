#pragma once

// Exact propagation of the joint system-bath state through a pulse timeline,
// ensemble-averaged over RF amplitude realizations.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ddlab/model.hpp"
#include "ddlab/pulsegen.hpp"
#include "ddlab/sequences.hpp"

namespace ddlab {

enum class RecordMode { CycleBoundaries, EveryPulse };

const char* record_mode_name(RecordMode m);
RecordMode parse_record_mode(const std::string& s);

struct RunSpec {
  std::shared_ptr<const SpinBathModel> model;
  Timeline timeline;
  ErrorModel errors;
  Axis initial_axis = Axis::X;
  int n_realizations = 1;
  std::uint64_t master_seed = 0;
  RecordMode record = RecordMode::CycleBoundaries;
  int threads = 1;  // results do not depend on this
};

struct SurvivalTrace {
  std::vector<double> times;     // us
  std::vector<long> n_pulses;
  std::vector<double> s;
  std::vector<double> std_error;
  Axis axis = Axis::X;
  std::string label;

  std::size_t size() const { return times.size(); }
};

// rho(0) = 1/d + (2/d) S_axis; bath factor maximally mixed.
DensityOperator prepare_initial_state(Axis axis, const SpinBathModel& model);

// Tr{S_u (rho_t - 1/d)} / Tr{S_u rho_0_dev}. Throws ContractError on zero normalization.
double survival_probability(const DensityOperator& rho_t, const Matrix& rho_0_dev, Axis axis, const OperatorSet& ops);

// Seed of realization k, a splitmix64 mix of (master_seed, k).
std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t k);

// s is measured along the ideal-frame direction P S_u P^dagger, P the product
// of the ideal pulses applied so far, so a perfect echo reads +1.
SurvivalTrace propagate(const RunSpec& spec);

// Unitary of one cycle of `tl` for a fixed RF scale, pulses via real_pulse
// (free Hamiltonian active during finite pulses).
Matrix cycle_propagator(const Timeline& tl, const SpinBathModel& model, const Matrix& h_free, double rf_scale,
                        const ErrorModel& errors);

// f(m) = Tr{A U^m A U^-m} / Tr{A A} for m = 0..m_max, from a Schur
// factorization of the unitary U.
std::vector<double> power_autocorrelation(const Matrix& u, const Matrix& a, int m_max);

enum class CorrelationKind { IxTotal, IzSingle };

// Tr{A(0) A(t)} / Tr{A A} with A(t) = e^{-iH_E t} A e^{iH_E t}.
std::vector<double> bath_correlation(const SpinBathModel& model, const std::vector<double>& t_grid,
                                     CorrelationKind which, int spin = 0);

// Mean of i_z^j(t) over all bath spins.
std::vector<double> bath_correlation_iz_mean(const SpinBathModel& model, const std::vector<double>& t_grid);

struct TauEstimate {
  bool reached = false;
  double tau = 0.0;        // first 1/e crossing, us
  double end_value = 0.0;  // series value at the last grid point
};

// Linear interpolation of the first crossing of 1/e.
TauEstimate estimate_tau_b(const std::vector<double>& series, const std::vector<double>& times);

}  // namespace ddlab
