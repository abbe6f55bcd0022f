#include "jumpcbo/objective.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace cbo {

ObjectiveFunction::ObjectiveFunction(std::string name, int dimension, EvalFn evaluate,
                                     std::optional<std::vector<double>> known_minimizer,
                                     std::optional<double> known_minimum)
    : name_(std::move(name)),
      dimension_(dimension),
      evaluate_(std::move(evaluate)),
      known_minimizer_(std::move(known_minimizer)),
      known_minimum_(known_minimum) {
  if (dimension_ < 1) throw std::invalid_argument("objective dimension must be >= 1");
  if (known_minimizer_ && static_cast<int>(known_minimizer_->size()) != dimension_)
    throw std::invalid_argument("known_minimizer dimension mismatch");
}

ObjectiveFunction rastrigin(int d, double shift) {
  if (d < 1) throw std::invalid_argument("rastrigin: d must be >= 1");
  auto eval = [d, shift](std::span<const double> x) {
    double acc = 0.0;
    for (int i = 0; i < d; ++i) {
      const double y = x[i] - shift;
      acc += y * y - 10.0 * std::cos(2.0 * std::numbers::pi * y);
    }
    return 10.0 + acc / d;
  };
  return ObjectiveFunction("rastrigin", d, eval, std::vector<double>(d, shift), 0.0);
}

ObjectiveFunction rosenbrock(int d) {
  if (d < 2) throw std::invalid_argument("rosenbrock: d must be >= 2");
  auto eval = [d](std::span<const double> x) {
    double acc = 0.0;
    for (int i = 0; i + 1 < d; ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      const double b = x[i] - 1.0;
      acc += 100.0 * a * a + b * b;
    }
    return acc / d;
  };
  return ObjectiveFunction("rosenbrock", d, eval, std::vector<double>(d, 1.0), 0.0);
}

ObjectiveFunction quadratic_shifted(int d, std::vector<double> center) {
  if (d < 1) throw std::invalid_argument("quadratic: d must be >= 1");
  if (static_cast<int>(center.size()) != d)
    throw std::invalid_argument("quadratic: center dimension mismatch");
  auto eval = [center](std::span<const double> x) {
    double acc = 1.0;
    for (std::size_t i = 0; i < center.size(); ++i) {
      const double y = x[i] - center[i];
      acc += y * y;
    }
    return acc;
  };
  return ObjectiveFunction("quadratic", d, eval, center, 1.0);
}

ObjectiveFunction quadratic_shifted(int d, double center_value) {
  return quadratic_shifted(d, std::vector<double>(d, center_value));
}

ObjectiveFunction objective_by_name(const std::string& name, int d) {
  if (name == "rastrigin") return rastrigin(d);
  if (name == "rosenbrock") return rosenbrock(d);
  if (name == "quadratic") return quadratic_shifted(d);
  throw std::invalid_argument("unknown objective: " + name);
}

}  // namespace cbo
