#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "jumpcbo/schedule.hpp"

using namespace cbo;

TEST_CASE("constant schedule") {
  const auto s = Schedule::constant(3.5);
  CHECK(s(0.0) == 3.5);
  CHECK(s(100.0) == 3.5);
  CHECK_THROWS_AS(s(-0.1), std::invalid_argument);
}

TEST_CASE("exponential approach") {
  const auto s = Schedule::exponential_approach(2.0, -1.0, 100.0);  // 2 - e^{-t/100}
  CHECK(s(0.0) == doctest::Approx(1.0));
  CHECK(s(100.0) == doctest::Approx(2.0 - std::exp(-1.0)));
  CHECK(s(1e6) == doctest::Approx(2.0));
}

TEST_CASE("piecewise exponential decay is continuous at the switch") {
  const auto s = Schedule::piecewise_exponential_decay(1.0, 20.0, 20.0);
  CHECK(s(0.0) == 1.0);
  CHECK(s(20.0) == 1.0);
  CHECK(s(20.0 + 1e-9) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s(40.0) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("table schedule interpolates and clamps") {
  const auto s = Schedule::table({{0.0, 1.0}, {10.0, 3.0}});
  CHECK(s(0.0) == 1.0);
  CHECK(s(5.0) == doctest::Approx(2.0));
  CHECK(s(100.0) == 3.0);
  CHECK_THROWS_AS(Schedule::table({{0.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Schedule::table({{5.0, 1.0}, {0.0, 2.0}}), std::invalid_argument);
}

TEST_CASE("json round trip") {
  for (const auto& s : {Schedule::constant(2.0),
                        Schedule::exponential_approach(4.0, 1.0, 90.0),
                        Schedule::piecewise_exponential_decay(1.0, 90.0, 90.0),
                        Schedule::table({{0.0, 1.0}, {5.0, 0.5}, {10.0, 0.1}})}) {
    const auto back = Schedule::from_json(s.to_json());
    for (double t : {0.0, 1.0, 7.3, 50.0}) CHECK(back(t) == s(t));
  }
}

TEST_CASE("schedule set validation") {
  ScheduleSet s;
  s.validate(10.0);
  s.alpha = 0.0;
  CHECK_THROWS(s.validate(10.0));
  s.alpha = 1.0;
  s.sigma = Schedule::constant(-1.0);
  CHECK_THROWS(s.validate(10.0));
}

TEST_CASE("schedule set json round trip") {
  const ScheduleSet s = preset("rosenbrock-exp2-a20");
  const ScheduleSet back = ScheduleSet::from_json(s.to_json());
  CHECK(back.alpha == s.alpha);
  for (double t : {0.0, 30.0, 120.0}) {
    CHECK(back.beta(t) == s.beta(t));
    CHECK(back.sigma(t) == s.sigma(t));
    CHECK(back.gamma(t) == s.gamma(t));
    CHECK(back.lambda(t) == s.lambda(t));
  }
}

TEST_CASE("benchmark presets") {
  const ScheduleSet e1 = preset("rastrigin-exp1-a20");
  CHECK(e1.alpha == 20.0);
  CHECK(e1.beta(0.0) == 1.0);
  CHECK(e1.sigma(50.0) == 5.1);
  CHECK(e1.gamma(10.0) == 1.0);
  CHECK(e1.gamma(40.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(e1.lambda(0.0) == 20.0);

  const ScheduleSet e2 = preset("rosenbrock-exp2-a30");
  CHECK(e2.alpha == 30.0);
  CHECK(e2.beta(0.0) == doctest::Approx(1.0));
  CHECK(e2.sigma(0.0) == doctest::Approx(5.0));
  CHECK(e2.lambda(0.0) == 90.0);
  CHECK(e2.gamma(90.0) == 1.0);

  const ScheduleSet nj = preset("rosenbrock-exp2-a20-nojump");
  CHECK(nj.beta(100.0) == 1.0);
  CHECK(nj.sigma(100.0) == 5.0);
  CHECK(nj.lambda(100.0) == 0.0);

  CHECK_THROWS_AS(preset("nope"), std::invalid_argument);
  CHECK(preset_names().size() == 6);
}
