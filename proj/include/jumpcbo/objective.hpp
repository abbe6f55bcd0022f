#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cbo {

// Objective to minimize, with optional ground-truth metadata used by the
// benchmark harness. Immutable after construction; evaluate() must be
// deterministic and safe to call from many threads.
class ObjectiveFunction {
 public:
  using EvalFn = std::function<double(std::span<const double>)>;

  ObjectiveFunction(std::string name, int dimension, EvalFn evaluate,
                    std::optional<std::vector<double>> known_minimizer = std::nullopt,
                    std::optional<double> known_minimum = std::nullopt);

  const std::string& name() const { return name_; }
  int dimension() const { return dimension_; }
  double evaluate(std::span<const double> x) const { return evaluate_(x); }

  const std::optional<std::vector<double>>& known_minimizer() const { return known_minimizer_; }
  std::optional<double> known_minimum() const { return known_minimum_; }

 private:
  std::string name_;
  int dimension_;
  EvalFn evaluate_;
  std::optional<std::vector<double>> known_minimizer_;
  std::optional<double> known_minimum_;
};

// f(x) = 10 + (1/d) * sum_i [(x_i - B)^2 - 10 cos(2 pi (x_i - B))],
// minimum 0 at (B,...,B). Rejects d < 1.
ObjectiveFunction rastrigin(int d, double shift = 0.0);

// f(x) = (1/d) * sum_{i<d} [100 (x_{i+1} - x_i^2)^2 + (x_i - 1)^2],
// minimum 0 at (1,...,1). Rejects d < 2.
ObjectiveFunction rosenbrock(int d);

// f(x) = 1 + |x - V|^2, minimum 1 at V. Strictly positive everywhere, which
// the convergence diagnostics rely on.
ObjectiveFunction quadratic_shifted(int d, std::vector<double> center);
ObjectiveFunction quadratic_shifted(int d, double center_value = 0.0);

// Lookup by the names accepted in config files: "rastrigin", "rosenbrock",
// "quadratic". Throws std::invalid_argument for unknown names.
ObjectiveFunction objective_by_name(const std::string& name, int d);

}  // namespace cbo
