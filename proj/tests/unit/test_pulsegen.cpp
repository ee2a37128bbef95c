#include <doctest.h>

#include <random>

#include "ddlab/errors.hpp"
#include "ddlab/pulsegen.hpp"
#include "oracle.hpp"

using namespace ddlab;

namespace {

bool equal_up_to_phase(const Matrix& a, const Matrix& b, double tol) {
  cplx phase = (b.adjoint() * a).trace() / double(a.rows());
  if (std::abs(std::abs(phase) - 1.0) > tol) return false;
  return max_abs(a - phase * b) < tol;
}

}  // namespace

TEST_CASE("ideal pulses") {
  auto ops = build_operator_set(1);
  Matrix y = ideal_pulse(PulseAxis::Y, M_PI, ops).matrix;
  CHECK(max_abs(y * y + ops.identity) < 1e-12);
  Matrix x = ideal_pulse(PulseAxis::X, M_PI, ops).matrix;
  CHECK(max_abs(x.adjoint() * ops.sz * x + ops.sz) < 1e-12);
  CHECK(max_abs(y.adjoint() * ops.sy * y - ops.sy) < 1e-12);
  CHECK(ideal_pulse(PulseAxis::X, M_PI, ops).duration == 0.0);
  Matrix my = ideal_pulse(PulseAxis::MinusY, M_PI, ops).matrix;
  CHECK(max_abs(my - ideal_pulse(PulseAxis::Y, -M_PI, ops).matrix) < 1e-12);
  Matrix ref = oracle::kron(oracle::expm_taylor(cplx(0, -M_PI / 2) * oracle::pauli_half('x') * 2.0),
                            Matrix::Identity(2, 2));
  CHECK(max_abs(x - ref) < 1e-12);
}

TEST_CASE("pi pulse length at 48 kHz") {
  CHECK(pi_pulse_duration_us(48.0) == doctest::Approx(10.4167).epsilon(1e-4));
  CHECK(std::round(pi_pulse_duration_us(48.0) * 10) / 10 == doctest::Approx(10.4));
}

TEST_CASE("real pulse reduces to the ideal pulse") {
  auto ops = build_operator_set(2);
  PulseSpec spec = make_pulse(PulseAxis::Y, M_PI, 10.4);
  CHECK(spec.rf_amplitude * spec.duration == doctest::Approx(M_PI).epsilon(1e-12));
  Propagator r = real_pulse(spec, 1.0, ErrorModel{}, Matrix(), ops);
  CHECK(r.duration == 10.4);
  CHECK(max_abs(r.matrix - ideal_pulse(PulseAxis::Y, M_PI, ops).matrix) < 1e-10);
  CHECK(max_abs(r.matrix * ideal_pulse(PulseAxis::Y, -M_PI, ops).matrix - ops.identity) < 1e-10);
}

TEST_CASE("free Hamiltonian during the pulse") {
  auto ops = build_operator_set(2);
  PulseSpec spec = make_pulse(PulseAxis::X, M_PI, 10.0);
  Matrix ideal = ideal_pulse(PulseAxis::X, M_PI, ops).matrix;
  Matrix h = 0.01 * ops.sz * ops.iz[0] + 0.02 * ops.sz * ops.iz[1];
  double dev1 = (real_pulse(spec, 1.0, ErrorModel{}, h, ops).matrix - ideal).norm();
  double dev2 = (real_pulse(spec, 1.0, ErrorModel{}, Matrix(2.0 * h), ops).matrix - ideal).norm();
  CHECK(dev1 > 1e-4);
  CHECK(dev2 > dev1);
  Matrix expect = oracle::expm_taylor(cplx(0, -1) * (h + spec.rf_amplitude * ops.sx) * spec.duration);
  CHECK(max_abs(real_pulse(spec, 1.0, ErrorModel{}, h, ops).matrix - expect) < 1e-10);
}

TEST_CASE("real pulse needs RF for finite duration") {
  auto ops = build_operator_set(0);
  PulseSpec bad{PulseAxis::Y, M_PI, 5.0, 0.0};
  CHECK_THROWS_AS(real_pulse(bad, 1.0, ErrorModel{}, Matrix(), ops), ContractError);
}

TEST_CASE("error factor") {
  auto ops = build_operator_set(1);
  PulseSpec spec = make_pulse(PulseAxis::Y, M_PI, 0.0);
  CHECK(max_abs(error_factor(spec, 1.0, ErrorModel{}, ops).matrix - ops.identity) < 1e-12);

  ErrorModel e;
  e.flip_angle_error = 0.03;
  Matrix ef = error_factor(spec, 1.0, e, ops).matrix;
  CHECK(max_abs(ef - ideal_pulse(PulseAxis::Y, 0.03 * M_PI, ops).matrix) < 1e-12);

  ErrorModel tilt;
  tilt.axis_tilt = 0.1;
  Matrix et = error_factor(spec, 1.0, tilt, ops).matrix;
  CHECK(max_abs(et * et.adjoint() - ops.identity) < 1e-12);
  CHECK(std::abs(std::abs(et.determinant()) - 1.0) < 1e-12);
}

TEST_CASE("error factor composition over random specs") {
  auto ops = build_operator_set(1);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  Matrix h = 0.01 * ops.sz * ops.iz[0] + 0.003 * ops.sx * ops.ix[0];
  for (int k = 0; k < 50; ++k) {
    auto axis = static_cast<PulseAxis>(k % 4);
    double dur = k % 3 == 0 ? 0.0 : 5.0 + 5.0 * std::abs(u(rng));
    PulseSpec spec = make_pulse(axis, M_PI * (0.5 + std::abs(u(rng))), dur);
    ErrorModel e;
    e.flip_angle_error = 0.1 * u(rng);
    e.axis_tilt = 0.1 * u(rng);
    double rf = 1.0 + 0.1 * u(rng);
    Matrix ideal = ideal_pulse(axis, spec.nominal_angle, ops).matrix;
    Matrix real0 = real_pulse(spec, rf, e, Matrix(), ops).matrix;
    CHECK(max_abs(error_factor(spec, rf, e, ops).matrix * ideal - real0) < 1e-10);
    Matrix real1 = real_pulse(spec, rf, e, h, ops).matrix;
    CHECK(max_abs(error_factor(spec, rf, e, h, ops).matrix * ideal - real1) < 1e-10);
  }
}

TEST_CASE("flip-angle errors cancel in a +y/-y pair") {
  auto ops = build_operator_set(1);
  ErrorModel e;
  e.flip_angle_error = 0.07;
  PulseSpec a = make_pulse(PulseAxis::Y, M_PI, 0.0);
  PulseSpec b = make_pulse(PulseAxis::MinusY, M_PI, 0.0);
  Matrix pair = real_pulse(b, 1.0, e, Matrix(), ops).matrix * real_pulse(a, 1.0, e, Matrix(), ops).matrix;
  CHECK(equal_up_to_phase(pair, ops.identity, 1e-12));
}

TEST_CASE("rf scale sampling") {
  CHECK(sample_rf_scale(RfDistribution::fixed(), 1) == 1.0);
  CHECK(sample_rf_scale(RfDistribution::fixed(), 99) == 1.0);

  auto bi = RfDistribution::bimodal(0.95, 1.05, 0.5);
  double sum = 0;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    double v = sample_rf_scale(bi, s);
    CHECK((v == 0.95 || v == 1.05));
    sum += v;
  }
  CHECK(std::abs(sum / 10000 - 1.0) < 0.002);

  auto g = RfDistribution::gaussian(1.0, 0.10);
  double m = 0, m2 = 0;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    double v = sample_rf_scale(g, s);
    CHECK(v > 0);
    m += v;
    m2 += v * v;
  }
  m /= 10000;
  double sd = std::sqrt(m2 / 10000 - m * m);
  CHECK(std::abs(m - 1.0) < 0.005);
  CHECK(std::abs(sd - 0.10) < 0.005);
  CHECK(sample_rf_scale(g, 17) == sample_rf_scale(g, 17));
}

TEST_CASE("error model validation") {
  ErrorModel e;
  e.rf = RfDistribution::bimodal(0.9, 1.1, 1.5);
  CHECK_THROWS_AS(e.validate(), ContractError);
  e.rf = RfDistribution::bimodal(-0.9, 1.1, 0.5);
  CHECK_THROWS_AS(e.validate(), ContractError);
  e.rf = RfDistribution::fixed();
  CHECK(e.is_ideal());
  e.flip_angle_error = 0.1;
  CHECK_FALSE(e.is_ideal());
}
