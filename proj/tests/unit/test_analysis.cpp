#include <doctest.h>

#include <cmath>

#include "ddlab/analysis.hpp"
#include "ddlab/errors.hpp"

using namespace ddlab;

namespace {

SurvivalTrace synth(int n, double dt, double (*f)(double)) {
  SurvivalTrace tr;
  for (int k = 0; k < n; ++k) {
    double t = k * dt;
    tr.times.push_back(t);
    tr.n_pulses.push_back(k);
    tr.s.push_back(f(t));
    tr.std_error.push_back(0.0);
  }
  return tr;
}

double exp75(double t) { return std::exp(-t / 75); }
double flat(double) { return 1.0; }
double damped(double t) { return std::cos(0.3 * t) * std::exp(-t / 60); }

}  // namespace

TEST_CASE("envelope") {
  auto mono = synth(100, 1.0, exp75);
  CHECK(envelope(mono).s == mono.s);

  auto c = synth(50, 1.0, flat);
  CHECK(envelope(c).s == c.s);

  auto d = synth(600, 0.25, damped);
  auto env = envelope(d);
  for (std::size_t k = 0; k < d.size(); ++k) CHECK(env.s[k] >= std::abs(d.s[k]) - 1e-15);
  // maxima of |cos| sit at multiples of pi/0.3
  for (int j = 1; j < 6; ++j) {
    double t = j * M_PI / 0.3;
    std::size_t k = std::size_t(std::lround(t / 0.25));
    CHECK(std::abs(env.s[k] - std::exp(-d.times[k] / 60)) < 0.05 * std::exp(-d.times[k] / 60));
  }
  CHECK_THROWS_AS(envelope(synth(3, 1.0, flat)), ContractError);
}

TEST_CASE("decay time extractors") {
  auto tr = synth(400, 1.0, exp75);
  auto a = decay_time(tr, DecayMethod::OneOverE);
  auto b = decay_time(tr, DecayMethod::ExpFit);
  CHECK(a.reached);
  CHECK(std::abs(a.decay_time - 75) < 1);
  CHECK(b.reached);
  CHECK(std::abs(a.decay_time - b.decay_time) < 0.02 * b.decay_time);
  CHECK(a.method == DecayMethod::OneOverE);
  CHECK(b.method == DecayMethod::ExpFit);

  auto f = decay_time(synth(50, 1.0, flat), DecayMethod::OneOverE);
  CHECK_FALSE(f.reached);
  CHECK(f.end_value == 1.0);
  CHECK_FALSE(decay_time(synth(50, 1.0, flat), DecayMethod::ExpFit).reached);
}

TEST_CASE("decay time is scale covariant") {
  auto tr = synth(300, 1.0, damped);
  auto scaled = tr;
  for (auto& t : scaled.times) t *= 3.5;
  for (auto m : {DecayMethod::OneOverE, DecayMethod::ExpFit}) {
    auto a = decay_time(tr, m);
    auto b = decay_time(scaled, m);
    CHECK(b.decay_time == doctest::Approx(3.5 * a.decay_time).epsilon(1e-10));
  }
}

TEST_CASE("method names") {
  CHECK(parse_decay_method("one_over_e") == DecayMethod::OneOverE);
  CHECK(parse_decay_method(decay_method_name(DecayMethod::ExpFit)) == DecayMethod::ExpFit);
  CHECK_THROWS_AS(parse_decay_method("median"), ContractError);
}

TEST_CASE("order fit round trip") {
  double tau_b = 110;
  std::vector<std::pair<double, double>> pts;
  for (double r : {0.05, 0.1, 0.3, 0.7}) pts.push_back({0.9 - 0.9 * std::log(r), r * tau_b});
  auto fit = fit_order_relation(pts, tau_b);
  CHECK(std::abs(fit.c - 0.9) < 1e-9);
  CHECK(std::abs(fit.b + 0.9) < 1e-9);
  CHECK(fit.c_sd < 1e-9);
  CHECK(fit.points.size() == 4);
  CHECK(kPaperOrderC == 0.9);
  CHECK(kPaperOrderB == -0.9);

  CHECK_THROWS_AS(fit_order_relation({{1, 30}}, tau_b), ContractError);
  CHECK_THROWS_AS(fit_order_relation({{1, 30}, {2, 30}}, tau_b), ContractError);
  CHECK_THROWS_AS(fit_order_relation(pts, 0.0), ContractError);
}

TEST_CASE("order fit uncertainty with noise") {
  std::vector<std::pair<double, double>> pts{{1, 60}, {2, 25}, {3, 9}, {4, 4}};
  auto fit = fit_order_relation(pts, 100);
  CHECK(fit.b < 0);
  CHECK(fit.b_sd > 0);
  CHECK(fit.c_sd > 0);
}

TEST_CASE("sweep timelines") {
  auto t = sweep_timeline(Family::CPMG, 1, 30.0, 10.4, false, 1000.0);
  CHECK(t.cycle_time == doctest::Approx(80.8));
  CHECK(t.n_cycles == 12);
  auto u = sweep_timeline(Family::UDD, 3, 10.0, 1.0, false, 0.0, 5);
  CHECK(u.cycle_time == doctest::Approx(4 * 10.0 + 3 * 1.0));
  CHECK(u.n_cycles == 5);
  // fair: one pulse per (tau + tau_p) for every family
  for (auto [f, o] : {std::pair{Family::CPMG, 1}, {Family::PDD, 1}, {Family::CDD, 2}, {Family::UDD, 4}}) {
    auto tl = sweep_timeline(f, o, 20.0, 5.0, true, 0.0, 1);
    CHECK(cycle_stats(tl).avg_pulses_per_unit_time == doctest::Approx(1.0 / 25.0));
  }
  CHECK(sequence_label(Family::CDD, 3) == "CDD3");
}

TEST_CASE("sweep on a static bath never decays") {
  auto m = std::make_shared<SpinBathModel>(Eigen::Vector2d(0.02, -0.015), Eigen::MatrixXd::Zero(2, 2));
  SweepSpec s;
  s.family = Family::CPMG;
  s.tau_grid = {5, 10, 20, 40};
  s.time_budget = 2000;
  s.model = m;
  auto r = sweep_tau(s);
  CHECK(r.points.size() == 4);
  for (const auto& p : r.points) {
    CHECK(p.ok);
    CHECK_FALSE(p.summary.reached);
  }
  CHECK_FALSE(r.resolved);
}

TEST_CASE("sweep on a fluctuating bath prefers short delays without errors") {
  CouplingSpec cs;
  cs.n_bath = 3;
  cs.b_scale = 0.02;
  cs.d_scale = 0.03;
  cs.seed = 2;
  auto c = sample_couplings(cs);
  SweepSpec s;
  s.family = Family::CPMG;
  s.tau_grid = {5, 20, 80, 200};
  s.time_budget = 6000;
  s.model = std::make_shared<SpinBathModel>(c.b, c.d);
  auto r = sweep_tau(s);
  REQUIRE(r.has_opt);
  CHECK(r.opt_index == 0);
  for (std::size_t k = 1; k < r.points.size(); ++k)
    CHECK_FALSE(clearly_better(r.points[k], r.points[k - 1]));
}

TEST_CASE("sweep records failing points") {
  auto m = std::make_shared<SpinBathModel>(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 1));
  SweepSpec s;
  s.family = Family::CPMG;
  s.tau_grid = {-1, 10};
  s.time_budget = 200;
  s.model = m;
  auto r = sweep_tau(s);
  CHECK_FALSE(r.points[0].ok);
  CHECK_FALSE(r.points[0].error.empty());
  CHECK(r.points[1].ok);
  s.tau_grid.clear();
  CHECK_THROWS_AS(sweep_tau(s), ContractError);
}

TEST_CASE("clearly better") {
  SweepPoint a, b;
  a.ok = b.ok = true;
  a.summary.reached = b.summary.reached = true;
  a.summary.decay_time = 102;
  b.summary.decay_time = 100;
  CHECK(clearly_better(a, b));
  a.summary.decay_time = 100.5;
  CHECK_FALSE(clearly_better(a, b));
  a.summary.reached = false;
  CHECK(clearly_better(a, b));
  b.summary.reached = false;
  a.summary.end_value = 0.9;
  b.summary.end_value = 0.8;
  a.end_stderr = b.end_stderr = 0.01;
  CHECK(clearly_better(a, b));
  a.end_stderr = b.end_stderr = 0.05;
  CHECK_FALSE(clearly_better(a, b));
}
