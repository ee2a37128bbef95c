#include <doctest.h>

#include <sstream>

#include "ddlab/errors.hpp"
#include "ddlab/sequences.hpp"

using namespace ddlab;

TEST_CASE("hahn") {
  auto tl = compile_hahn(100.0, 0.0);
  REQUIRE(tl.events.size() == 1);
  CHECK(tl.events[0] == PulseEvent{100.0, PulseAxis::Y, M_PI, 0.0});
  CHECK(tl.cycle_time == 200.0);
  CHECK(compile_hahn(100.0, 10.4).cycle_time == doctest::Approx(210.4));
  CHECK_THROWS_AS(compile_hahn(0.0, 0.0), ContractError);
}

TEST_CASE("cpmg family") {
  auto tl = compile_cpmg(30.0, 10.4, 1, CpmgVariant::CPMG);
  CHECK(tl.cycle_time == doctest::Approx(80.8));
  REQUIRE(tl.events.size() == 2);
  CHECK(tl.events[0].start == doctest::Approx(15.0));
  CHECK(tl.events[1].start == doctest::Approx(55.4));
  CHECK(tl.events[0].axis == PulseAxis::Y);
  CHECK(tl.events[1].axis == PulseAxis::Y);

  auto c2 = compile_cpmg(30.0, 0.0, 1, CpmgVariant::CPMG2);
  CHECK(c2.events[0].axis == PulseAxis::Y);
  CHECK(c2.events[1].axis == PulseAxis::MinusY);
  auto cp = compile_cpmg(30.0, 0.0, 1, CpmgVariant::CP);
  CHECK(cp.events[0].axis == PulseAxis::X);

  auto m3 = compile_cpmg(30.0, 10.4, 3, CpmgVariant::CPMG);
  CHECK(m3.events.size() == 6);
  CHECK(m3.total_time() == doctest::Approx(3 * 80.8));
  CHECK_THROWS_AS(compile_cpmg(30.0, 0.0, 0, CpmgVariant::CPMG), ContractError);
  CHECK_THROWS_AS(compile_cpmg(-1.0, 0.0, 1, CpmgVariant::CPMG), ContractError);
}

TEST_CASE("pdd") {
  CHECK(compile_pdd(40.0, 10.4, 1).cycle_time == doctest::Approx(201.6));
  CHECK(compile_pdd(70.0, 10.4, 1).cycle_time == doctest::Approx(321.6));
  auto tl = compile_pdd(10.0, 0.0, 1);
  REQUIRE(tl.events.size() == 4);
  PulseAxis order[] = {PulseAxis::X, PulseAxis::Y, PulseAxis::X, PulseAxis::Y};
  for (int k = 0; k < 4; ++k) {
    CHECK(tl.events[k].start == doctest::Approx(10.0 * (k + 1)));
    CHECK(tl.events[k].axis == order[k]);
  }
}

TEST_CASE("cdd") {
  auto p = compile_pdd(20.0, 10.4, 2);
  auto c1 = compile_cdd(1, 20.0, 10.4, 2);
  CHECK(p.events == c1.events);
  CHECK(p.cycle_time == c1.cycle_time);

  auto c2 = compile_cdd(2, 30.0, 10.4, 1);
  CHECK(c2.events.size() == 20);
  CHECK(c2.free_periods_per_cycle == 16);
  CHECK(c2.cycle_time == doctest::Approx(688.0));

  auto c3 = compile_cdd(3, 10.0, 10.4, 1);
  CHECK(c3.events.size() == 84);
  CHECK(c3.cycle_time == doctest::Approx(1513.6));

  int n = 0;
  for (int k = 1; k <= kMaxCddOrder; ++k) {
    n = 4 * n + 4;
    CHECK(cdd_pulse_count(k) == n);
    CHECK(cdd_free_period_count(k) == (1 << (2 * k)));
  }
  CHECK(cdd_pulse_count(4) == 340);
  CHECK(int(compile_cdd(4, 1.0, 0.0, 1).events.size()) == 340);
  CHECK_THROWS_AS(compile_cdd(0, 1.0, 0.0, 1), ContractError);
  CHECK_THROWS_AS(compile_cdd(6, 1.0, 0.0, 1), ContractError);
}

TEST_CASE("udd") {
  auto u2 = compile_udd(2, 80.0, 0.0, 1);
  auto cp = compile_cpmg(40.0, 0.0, 1, CpmgVariant::CPMG);
  REQUIRE(u2.events.size() == 2);
  for (int k = 0; k < 2; ++k) CHECK(u2.events[k].start == doctest::Approx(cp.events[k].start).epsilon(1e-14));
  CHECK(u2.events[0].start == doctest::Approx(20.0));
  CHECK(u2.events[1].start == doctest::Approx(60.0));

  auto u2f = compile_udd(2, 2 * 30.0 + 2 * 10.4, 10.4, 1);
  auto cpf = compile_cpmg(30.0, 10.4, 1, CpmgVariant::CPMG);
  CHECK(u2f.cycle_time == doctest::Approx(cpf.cycle_time));

  auto u1 = compile_udd(1, 200.0, 0.0, 1);
  auto h = compile_hahn(100.0, 0.0);
  REQUIRE(u1.events.size() == 1);
  CHECK(u1.events[0].start == doctest::Approx(h.events[0].start).epsilon(1e-14));
  CHECK(u1.events[0].axis == h.events[0].axis);
  CHECK(u1.cycle_time == h.cycle_time);

  auto u4 = compile_udd(4, 1.0, 0.0, 1);
  double frac[] = {0.0954915028125263, 0.3454915028125263, 0.6545084971874737, 0.9045084971874737};
  for (int k = 0; k < 4; ++k) CHECK(std::abs(u4.events[k].start - frac[k]) < 1e-12);

  CHECK_THROWS_AS(compile_udd(4, 40.0, 10.4, 1), ContractError);
  CHECK_THROWS_AS(compile_udd(0, 40.0, 0.0, 1), ContractError);
}

TEST_CASE("cycle stats") {
  auto s = cycle_stats(compile_cpmg(30.0, 10.4, 1, CpmgVariant::CPMG));
  CHECK(s.avg_pulses_per_unit_time == doctest::Approx(2.0 / 80.8));
  CHECK(s.pulses_per_cycle == 2);
  CHECK(s.avg_delay == doctest::Approx(30.0));

  auto h = cycle_stats(compile_hahn(50.0, 0.0));
  CHECK(h.pulses_per_cycle == 1);
  CHECK(h.avg_delay == doctest::Approx(50.0));

  auto p = compile_pdd(25.0, 0.0, 1);
  auto c2 = compile_cdd(2, 25.0, 0.0, 1);
  CHECK(cycle_stats(p).avg_delay == doctest::Approx(cycle_stats(c2).avg_delay));
  CHECK(c2.free_periods_per_cycle == 4 * p.free_periods_per_cycle);
}

TEST_CASE("every family validates and repeats") {
  std::vector<Timeline> all = {
      compile_free(5.0, 3),
      compile_hahn(20.0, 10.4, 3),
      compile_cpmg(20.0, 10.4, 3, CpmgVariant::CP),
      compile_cpmg(20.0, 10.4, 3, CpmgVariant::CPMG),
      compile_cpmg(20.0, 10.4, 3, CpmgVariant::CPMG2),
      compile_pdd(20.0, 10.4, 3),
      compile_cdd(2, 20.0, 10.4, 3),
      compile_cdd(3, 2.0, 1.0, 3),
      compile_udd(4, 200.0, 10.4, 3),
  };
  for (const auto& tl : all) {
    CHECK(validate_timeline(tl).empty());
    auto one = tl.cycle_events();
    REQUIRE(tl.events.size() == one.size() * 3);
    for (std::size_t m = 0; m < 3; ++m)
      for (std::size_t k = 0; k < one.size(); ++k) {
        const auto& e = tl.events[m * one.size() + k];
        CHECK(e.start == doctest::Approx(one[k].start + m * tl.cycle_time));
        CHECK(e.axis == one[k].axis);
      }
  }
}

TEST_CASE("validation catches broken timelines") {
  Timeline tl = compile_cpmg(30.0, 10.0, 1, CpmgVariant::CPMG);
  tl.events[1].start = tl.events[0].start + 5.0;
  auto v = validate_timeline(tl);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("event 0") != std::string::npos);
  CHECK(v[0].find("event 1") != std::string::npos);

  Timeline late = compile_hahn(10.0, 0.0);
  late.events[0].start = 25.0;
  CHECK_FALSE(validate_timeline(late).empty());
}

TEST_CASE("timeline text round trip") {
  auto tl = compile_cdd(2, 7.5, 1.25, 2);
  std::stringstream ss;
  write_timeline(ss, tl);
  CHECK(ss.str().find("# cycle_time_us") != std::string::npos);
  auto back = read_timeline(ss);
  CHECK(back.events == tl.events);
  CHECK(back.cycle_time == tl.cycle_time);
  CHECK(back.n_cycles == tl.n_cycles);
  CHECK(back.label == tl.label);
}
