#include "ddlab/pulsegen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ddlab/errors.hpp"

namespace ddlab {

const char* pulse_axis_name(PulseAxis a) {
  switch (a) {
    case PulseAxis::X: return "x";
    case PulseAxis::Y: return "y";
    case PulseAxis::MinusX: return "-x";
    case PulseAxis::MinusY: return "-y";
  }
  return "?";
}

PulseAxis parse_pulse_axis(const std::string& s) {
  if (s == "x" || s == "+x") return PulseAxis::X;
  if (s == "y" || s == "+y") return PulseAxis::Y;
  if (s == "-x") return PulseAxis::MinusX;
  if (s == "-y") return PulseAxis::MinusY;
  throw ContractError("unknown pulse axis '" + s + "'");
}

PulseSpec make_pulse(PulseAxis axis, double angle, double duration) {
  if (!(duration >= 0.0)) throw ContractError("pulse duration must be >= 0");
  return {axis, angle, duration, duration > 0.0 ? angle / duration : 0.0};
}

double pi_pulse_duration_us(double rf_khz) {
  if (!(rf_khz > 0.0)) throw ContractError("rf field must be positive");
  return std::numbers::pi / (2.0 * std::numbers::pi * rf_khz * 1e-3);
}

RfDistribution RfDistribution::bimodal(double low, double high, double weight) {
  RfDistribution d;
  d.kind = RfKind::Bimodal;
  d.low = low;
  d.high = high;
  d.weight = weight;
  return d;
}

RfDistribution RfDistribution::gaussian(double mean, double sd) {
  RfDistribution d;
  d.kind = RfKind::Gaussian;
  d.mean = mean;
  d.sd = sd;
  return d;
}

bool ErrorModel::is_ideal() const {
  return rf.kind == RfKind::Fixed && flip_angle_error == 0.0 && axis_tilt == 0.0;
}

void ErrorModel::validate() const {
  switch (rf.kind) {
    case RfKind::Fixed: break;
    case RfKind::Bimodal:
      if (!(rf.weight >= 0.0 && rf.weight <= 1.0)) throw ContractError("bimodal weight must lie in [0, 1]");
      if (!(rf.low > 0.0 && rf.high > 0.0)) throw ContractError("RF scale factors must be positive");
      break;
    case RfKind::Gaussian:
      if (!(rf.mean > 0.0) || !(rf.sd >= 0.0)) throw ContractError("gaussian RF needs mean > 0 and sd >= 0");
      break;
  }
  if (!std::isfinite(flip_angle_error) || flip_angle_error <= -1.0) {
    throw ContractError("flip-angle error must be finite and > -1");
  }
  if (!std::isfinite(axis_tilt)) throw ContractError("axis tilt must be finite");
}

RotationAxis rotation_axis(PulseAxis axis, double tilt) {
  const bool is_y = axis == PulseAxis::Y || axis == PulseAxis::MinusY;
  const double phase = (is_y ? 0.5 * std::numbers::pi : 0.0) + tilt;
  const double sign = (axis == PulseAxis::MinusX || axis == PulseAxis::MinusY) ? -1.0 : 1.0;
  if (tilt == 0.0) {
    // exact unit vectors keep ideal pulses free of cos(pi/2) residue
    return {is_y ? Eigen::Vector3d(0, 1, 0) : Eigen::Vector3d(1, 0, 0), sign};
  }
  return {Eigen::Vector3d(std::cos(phase), std::sin(phase), 0.0), sign};
}

Matrix2 rotation2(const Eigen::Vector3d& n, double angle) {
  const double c = std::cos(0.5 * angle), s = std::sin(0.5 * angle);
  Matrix2 u;
  // cos(a/2) 1 - i sin(a/2) n.sigma
  u(0, 0) = cplx(c, -s * n.z());
  u(1, 1) = cplx(c, s * n.z());
  u(0, 1) = cplx(-s * n.y(), -s * n.x());
  u(1, 0) = cplx(s * n.y(), -s * n.x());
  return u;
}

Matrix embed_system(const Matrix2& u2, int n_bath) { return embed_site(u2, 0, n_bath + 1); }

Propagator ideal_pulse(PulseAxis axis, double angle, const OperatorSet& ops) {
  const RotationAxis ra = rotation_axis(axis, 0.0);
  return {embed_system(rotation2(ra.n, ra.sign * angle), ops.n_bath), 0.0};
}

namespace {

void check_spec(const PulseSpec& spec) {
  if (!(spec.duration >= 0.0)) throw ContractError("pulse duration must be >= 0");
  if (spec.duration > 0.0) {
    if (!(spec.rf_amplitude > 0.0)) throw ContractError("finite pulse requires a positive rf amplitude");
    if (std::abs(spec.rf_amplitude * spec.duration - spec.nominal_angle) > 1e-9 * std::max(1.0, std::abs(spec.nominal_angle))) {
      throw ContractError("rf_amplitude * duration must equal the nominal angle");
    }
  }
}

double realized_angle(const PulseSpec& spec, double rf_scale, const ErrorModel& err) {
  return spec.nominal_angle * rf_scale * (1.0 + err.flip_angle_error);
}

}  // namespace

Propagator real_pulse(const PulseSpec& spec, double rf_scale, const ErrorModel& err, const Matrix& h_free,
                      const OperatorSet& ops) {
  check_spec(spec);
  if (!(rf_scale > 0.0)) throw ContractError("rf scale must be positive");
  const RotationAxis ra = rotation_axis(spec.axis, err.axis_tilt);
  const double angle = ra.sign * realized_angle(spec, rf_scale, err);
  if (spec.duration == 0.0 || h_free.size() == 0) {
    return {embed_system(rotation2(ra.n, angle), ops.n_bath), spec.duration};
  }
  if (h_free.rows() != ops.dim()) throw ContractError("real_pulse: free Hamiltonian dimension mismatch");
  const double omega = angle / spec.duration;
  Matrix h = h_free + omega * (ra.n.x() * ops.sx + ra.n.y() * ops.sy);
  return evolve(h, spec.duration);
}

Propagator error_factor(const PulseSpec& spec, double rf_scale, const ErrorModel& err, const OperatorSet& ops) {
  return error_factor(spec, rf_scale, err, Matrix(), ops);
}

Propagator error_factor(const PulseSpec& spec, double rf_scale, const ErrorModel& err, const Matrix& h_free,
                        const OperatorSet& ops) {
  const Propagator real = real_pulse(spec, rf_scale, err, h_free, ops);
  const Propagator ideal = ideal_pulse(spec.axis, spec.nominal_angle, ops);
  return {real.matrix * ideal.matrix.adjoint(), 0.0};
}

double sample_rf_scale(const RfDistribution& dist, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  switch (dist.kind) {
    case RfKind::Fixed: return 1.0;
    case RfKind::Bimodal: {
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      return u < dist.weight ? dist.low : dist.high;
    }
    case RfKind::Gaussian: {
      std::normal_distribution<double> normal(dist.mean, dist.sd);
      for (;;) {
        const double x = normal(rng);
        if (x > 0.0) return x;
      }
    }
  }
  return 1.0;
}

}  // namespace ddlab
