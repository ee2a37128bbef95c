#include <doctest.h>

#include <algorithm>

#include "ddlab/avgham.hpp"
#include "ddlab/engine.hpp"
#include "ddlab/errors.hpp"
#include "oracle.hpp"

using namespace ddlab;

namespace {

SpinBathModel random_model(int n, std::uint64_t seed, double b = 0.02, double d = 0.03) {
  CouplingSpec spec;
  spec.n_bath = n;
  spec.b_scale = b;
  spec.d_scale = d;
  spec.seed = seed;
  auto c = sample_couplings(spec);
  return SpinBathModel(c.b, c.d);
}

std::vector<double> spectrum(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  return {es.eigenvalues().data(), es.eigenvalues().data() + h.rows()};
}

}  // namespace

TEST_CASE("empty timeline is one segment") {
  auto m = random_model(2, 1);
  Matrix h = build_h_free(m);
  auto segs = toggling_frames(compile_free(12.0, 1), h, m.ops());
  REQUIRE(segs.size() == 1);
  CHECK(segs[0].duration == 12.0);
  CHECK(max_abs(segs[0].h_tilde - h) < 1e-15);
  CHECK(max_abs(average_hamiltonian(segs, 0) - h) < 1e-15);
  CHECK(max_abs(average_hamiltonian(segs, 1)) == 0.0);
}

TEST_CASE("hahn toggling") {
  auto m = random_model(2, 2);
  const auto& ops = m.ops();
  Matrix hse = build_h_se(m);
  auto segs = toggling_frames(compile_hahn(10.0, 0.0), hse, ops);
  REQUIRE(segs.size() == 2);
  CHECK(max_abs(segs[0].h_tilde - hse) < 1e-15);
  CHECK(max_abs(segs[1].h_tilde + hse) < 1e-14);
  CHECK(max_abs(average_hamiltonian(segs, 0)) < 1e-15);
}

TEST_CASE("pdd cancels the SE part") {
  auto m = random_model(3, 3);
  const auto& ops = m.ops();
  Eigen::MatrixXd bu(3, 3);
  bu << 0.01, -0.02, 0.015, 0.03, 0.005, -0.01, m.b()(0), m.b()(1), m.b()(2);
  Matrix h = build_h_error(Eigen::Vector3d(0.02, -0.01, 0.03), bu, m) + build_h_e(m);
  auto segs = toggling_frames(compile_pdd(5.0, 0.0, 1), h, ops);
  REQUIRE(segs.size() == 4);
  Matrix se = Matrix::Zero(ops.dim(), ops.dim());
  for (const auto& s : segs) se += decompose(s.h_tilde, ops).system_part;
  CHECK(max_abs(se) < 1e-15);
  CHECK(max_abs(average_hamiltonian(segs, 0) - build_h_e(m)) < 1e-15);
}

TEST_CASE("toggling frames preserve spectra") {
  auto m = random_model(3, 4);
  Matrix h = build_h_free(m);
  auto ref = spectrum(h);
  for (auto tl : {compile_pdd(3.0, 0.0, 1), compile_cdd(2, 1.0, 0.0, 1), compile_udd(4, 50.0, 0.0, 1)}) {
    for (const auto& s : toggling_frames(tl, h, m.ops())) {
      CHECK(is_hermitian(s.h_tilde));
      auto sp = spectrum(s.h_tilde);
      for (std::size_t k = 0; k < sp.size(); ++k) CHECK(std::abs(sp[k] - ref[k]) < 1e-12);
    }
  }
}

TEST_CASE("time reversal") {
  auto m = random_model(3, 5);
  // symmetric cycles have no first-order term, so use the asymmetric XY-4
  auto segs = toggling_frames(compile_pdd(6.0, 0.0, 1), build_h_free(m), m.ops());
  auto rev = segs;
  std::reverse(rev.begin(), rev.end());
  CHECK(max_abs(average_hamiltonian(rev, 0) - average_hamiltonian(segs, 0)) < 1e-15);
  Matrix h1 = average_hamiltonian(segs, 1);
  CHECK(max_abs(h1) > 1e-8);
  CHECK(max_abs(average_hamiltonian(rev, 1) + h1) < 1e-15);
  CHECK(is_hermitian(h1));
}

TEST_CASE("first order against a brute-force double sum") {
  auto m = random_model(2, 6);
  auto segs = toggling_frames(compile_pdd(4.0, 0.0, 1), build_h_free(m), m.ops());
  double tc = 0;
  for (const auto& s : segs) tc += s.duration;
  Matrix ref = Matrix::Zero(8, 8);
  for (std::size_t l = 0; l < segs.size(); ++l)
    for (std::size_t k = 0; k < l; ++k)
      ref += commutator(segs[l].h_tilde * segs[l].duration, segs[k].h_tilde * segs[k].duration);
  ref *= cplx(0, -1) / (2 * tc);
  CHECK(max_abs(average_hamiltonian(segs, 1) - ref) < 1e-15);
}

TEST_CASE("finite pulses need the errored model") {
  auto m = random_model(1, 1);
  CHECK_THROWS_AS(toggling_frames(compile_hahn(5.0, 1.0), build_h_free(m), m.ops()), ContractError);
  auto segs = toggling_frames(compile_hahn(5.0, 1.0), build_h_free(m), m.ops(), PulseModel::errored(ErrorModel{}));
  double total = 0;
  for (const auto& s : segs) total += s.duration;
  CHECK(total == doctest::Approx(11.0));
  CHECK_THROWS_AS(average_hamiltonian({}, 0), ContractError);
  CHECK_THROWS_AS(average_hamiltonian(segs, 2), ContractError);
}

TEST_CASE("errored mode is exact at zeroth order for delta pulses") {
  auto m = random_model(2, 7);
  const auto& ops = m.ops();
  ErrorModel e;
  e.flip_angle_error = 0.02;
  auto tl = compile_cpmg(6.0, 0.0, 1, CpmgVariant::CPMG);
  auto segs = toggling_frames(tl, build_h_free(m), ops, PulseModel::errored(e));
  Matrix h0 = average_hamiltonian(segs, 0);
  // exact cycle propagator with real pulses vs frame * exp(-i H0 tc) to first order in the couplings
  Matrix exact = cycle_propagator(tl, m, build_h_free(m), 1.0, e);
  Matrix approx = cycle_frame(tl, ops) * evolve(h0, tl.cycle_time).matrix;
  CHECK(max_abs(exact - approx) < 5e-3);
}

TEST_CASE("unitary generator round trip") {
  Matrix h = oracle::random_hermitian(8, 3) * 0.3;
  Matrix u = evolve(h, 1.0).matrix;
  Matrix g = unitary_generator(u);
  CHECK(is_hermitian(g));
  CHECK(max_abs(evolve(g, 1.0).matrix - u) < 1e-12);
}

TEST_CASE("operator decomposition") {
  auto m = random_model(3, 8);
  const auto& ops = m.ops();
  Eigen::MatrixXd bu(3, 3);
  bu << 0.1, 0.2, 0.3, -0.1, -0.2, -0.3, 0.5, 0.6, 0.7;
  Eigen::Vector3d a(0.4, -0.5, 0.6);
  Matrix h = build_h_error(a, bu, m) + build_h_e(m);
  auto dec = decompose(h, ops);
  CHECK((dec.a - a).norm() < 1e-14);
  CHECK((dec.b - bu).norm() < 1e-14);
  CHECK(max_abs(dec.bath_part - build_h_e(m)) < 1e-14);
  CHECK(max_abs(dec.system_part + dec.bath_part - h) < 1e-14);
}

TEST_CASE("claims") {
  auto m = random_model(3, 1);
  auto ids = claim_ids();
  CHECK(ids == std::vector<std::string>{"a", "b", "c"});
  for (const auto& id : ids) {
    auto r = verify_claim(id, m);
    INFO(id);
    CHECK(r.pass);
    CHECK(r.tolerance == 1e-10);
    CHECK_FALSE(r.norms.empty());
  }
  CHECK_THROWS_AS(verify_claim("z", m), ContractError);
}

TEST_CASE("magnus convergence order") {
  auto tl = compile_pdd(5.0, 0.0, 1);
  double ratio_sum = 0;
  int n = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto m = random_model(2, seed, 0.05, 0.05);
    Matrix h = build_h_free(m);
    auto err = [&](const Matrix& hh) {
      auto segs = toggling_frames(tl, hh, m.ops());
      Matrix exact = cycle_propagator(tl, m, hh, 1.0, ErrorModel{});
      return (exact - magnus_propagator(segs, cycle_frame(tl, m.ops()))).norm();
    };
    ratio_sum += err(h) / err(Matrix(h / 2.0));
    ++n;
  }
  double ratio = ratio_sum / n;
  CHECK(ratio > 6);
  CHECK(ratio < 10);
}
