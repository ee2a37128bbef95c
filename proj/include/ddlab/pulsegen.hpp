#pragma once

// Control propagators for ideal (instantaneous) and real (finite, errored)
// pulses, plus the decomposition real = error * ideal.

#include <cstdint>
#include <string>

#include "ddlab/spinspace.hpp"

namespace ddlab {

enum class PulseAxis { X, Y, MinusX, MinusY };

const char* pulse_axis_name(PulseAxis a);  // "x", "y", "-x", "-y"
PulseAxis parse_pulse_axis(const std::string& s);

struct PulseSpec {
  PulseAxis axis = PulseAxis::Y;
  double nominal_angle = 0.0;  // rad
  double duration = 0.0;       // us, 0 = delta pulse
  double rf_amplitude = 0.0;   // omega_p, rad/us
};

// Pulse of the given angle and duration; rf amplitude follows from angle/duration.
PulseSpec make_pulse(PulseAxis axis, double angle, double duration);

// pi-pulse length for an RF field given in kHz (plain frequency).
double pi_pulse_duration_us(double rf_khz);

enum class RfKind { Fixed, Bimodal, Gaussian };

// Multiplicative RF amplitude scale factors.
struct RfDistribution {
  RfKind kind = RfKind::Fixed;
  double low = 0.95, high = 1.05, weight = 0.5;  // bimodal: low with probability weight
  double mean = 1.0, sd = 0.10;                   // gaussian

  static RfDistribution fixed() { return {}; }
  static RfDistribution bimodal(double low, double high, double weight);
  static RfDistribution gaussian(double mean, double sd);
};

struct ErrorModel {
  RfDistribution rf;
  double flip_angle_error = 0.0;  // realized angle = (1 + eps) * nominal
  double axis_tilt = 0.0;         // rad, rotation of the axis within the transverse plane

  bool is_ideal() const;
  void validate() const;  // throws ContractError
};

// Unit rotation axis and sign (-1 for -x/-y) after applying a transverse tilt.
struct RotationAxis {
  Eigen::Vector3d n;
  double sign;
};
RotationAxis rotation_axis(PulseAxis axis, double tilt);

// 2x2 rotation exp(-i angle n.S).
Matrix2 rotation2(const Eigen::Vector3d& n, double angle);

// kron(U2, 1_bath)
Matrix embed_system(const Matrix2& u2, int n_bath);

// exp(-i S_axis angle), duration 0.
Propagator ideal_pulse(PulseAxis axis, double angle, const OperatorSet& ops);

// exp{-i (H_free + omega_p rf_scale (1+eps) S_axis') tau_p}. An empty h_free
// (0x0) means no free evolution during the pulse. Delta pulses ignore h_free.
Propagator real_pulse(const PulseSpec& spec, double rf_scale, const ErrorModel& err, const Matrix& h_free,
                      const OperatorSet& ops);

// real (with h_free = 0) times ideal^dagger: a pure system rotation.
Propagator error_factor(const PulseSpec& spec, double rf_scale, const ErrorModel& err, const OperatorSet& ops);

// Same decomposition with the free Hamiltonian acting during the pulse.
Propagator error_factor(const PulseSpec& spec, double rf_scale, const ErrorModel& err, const Matrix& h_free,
                        const OperatorSet& ops);

// Deterministic per seed; strictly positive.
double sample_rf_scale(const RfDistribution& dist, std::uint64_t seed);

}  // namespace ddlab
