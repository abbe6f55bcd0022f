#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "jumpcbo/objective.hpp"

using namespace cbo;

TEST_CASE("rastrigin minimum and hand values") {
  const auto f = rastrigin(2);
  const double at_min = f.evaluate(std::vector<double>{0.0, 0.0});
  CHECK(at_min == doctest::Approx(0.0).epsilon(1e-12));
  // x = (1,1): each term (1 - 10 cos 2pi) = -9, so f = 10 - 9 = 1
  CHECK(f.evaluate(std::vector<double>{1.0, 1.0}) == doctest::Approx(1.0));
  CHECK(f.known_minimum() == 0.0);
  REQUIRE(f.known_minimizer());
  CHECK((*f.known_minimizer())[0] == 0.0);
}

TEST_CASE("rastrigin shift moves the minimizer") {
  const auto f = rastrigin(3, 2.0);
  CHECK(f.evaluate(std::vector<double>{2.0, 2.0, 2.0}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((*f.known_minimizer())[2] == 2.0);
}

TEST_CASE("rastrigin is dimension-normalized") {
  const auto f5 = rastrigin(5);
  const auto f20 = rastrigin(20);
  CHECK(f5.evaluate(std::vector<double>(5, 3.0)) ==
        doctest::Approx(f20.evaluate(std::vector<double>(20, 3.0))));
}

TEST_CASE("rosenbrock minimum and hand value") {
  const auto f = rosenbrock(2);
  CHECK(f.evaluate(std::vector<double>{1.0, 1.0}) == doctest::Approx(0.0));
  // (0,0): (100*0 + 1)/2
  CHECK(f.evaluate(std::vector<double>{0.0, 0.0}) == doctest::Approx(0.5));
  const auto f5 = rosenbrock(5);
  CHECK(f5.evaluate(std::vector<double>(5, 1.0)) == doctest::Approx(0.0));
}

TEST_CASE("quadratic shifted") {
  const auto f = quadratic_shifted(3, std::vector<double>{1.0, 2.0, 3.0});
  CHECK(f.evaluate(std::vector<double>{1.0, 2.0, 3.0}) == doctest::Approx(1.0));
  CHECK(f.evaluate(std::vector<double>{2.0, 2.0, 3.0}) == doctest::Approx(2.0));
  CHECK(f.known_minimum() == 1.0);
}

TEST_CASE("construction rejects bad arguments") {
  CHECK_THROWS_AS(rastrigin(0), std::invalid_argument);
  CHECK_THROWS_AS(rosenbrock(1), std::invalid_argument);
  CHECK_THROWS_AS(quadratic_shifted(2, std::vector<double>{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(objective_by_name("sphere", 2), std::invalid_argument);
}

TEST_CASE("lookup by name") {
  CHECK(objective_by_name("rastrigin", 4).name() == "rastrigin");
  CHECK(objective_by_name("rosenbrock", 4).name() == "rosenbrock");
  CHECK(objective_by_name("quadratic", 4).name() == "quadratic");
}
