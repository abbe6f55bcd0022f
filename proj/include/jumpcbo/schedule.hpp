#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace cbo {

// Closed-form time-dependent coefficient. Closed forms (rather than
// callbacks) keep config files exactly serializable; "table" is the
// escape hatch for research schedules.
class Schedule {
 public:
  enum class Kind {
    kConstant,                  // c
    kExponentialApproach,       // a + b * exp(-t / rate)
    kPiecewiseExponentialDecay, // v for t <= t_switch, v * exp((t_switch - t)/rate) after
    kTable,                     // piecewise-linear interpolation of (t, value) pairs
  };

  static Schedule constant(double c);
  static Schedule exponential_approach(double limit, double amplitude, double rate);
  static Schedule piecewise_exponential_decay(double value, double t_switch, double rate);
  static Schedule table(std::vector<std::pair<double, double>> knots);

  // Value at time t >= 0; rejects negative t.
  double operator()(double t) const;

  Kind kind() const { return kind_; }

  nlohmann::json to_json() const;
  static Schedule from_json(const nlohmann::json& j);

 private:
  Schedule(Kind kind, std::vector<double> params,
           std::vector<std::pair<double, double>> knots = {});

  Kind kind_;
  std::vector<double> params_;
  std::vector<std::pair<double, double>> knots_;
};

// The full coefficient set of one model configuration.
struct ScheduleSet {
  Schedule beta = Schedule::constant(1.0);     // drift strength
  Schedule sigma = Schedule::constant(1.0);    // diffusion strength
  Schedule gamma = Schedule::constant(0.0);    // jump scaling
  Schedule lambda = Schedule::constant(0.0);   // Poisson intensity
  double alpha = 1.0;                          // consensus sharpness, > 0

  // Throws if alpha <= 0 or sigma/gamma/lambda go negative (or non-finite)
  // on a sample grid over [0, horizon].
  void validate(double horizon) const;

  nlohmann::json to_json() const;
  static ScheduleSet from_json(const nlohmann::json& j);
};

// Parameter presets for the benchmark experiments. Known names:
//   rastrigin-exp1-a20, rastrigin-exp1-a30        (jump and non-jump models alike)
//   rosenbrock-exp2-a20, rosenbrock-exp2-a30      (jump models)
//   rosenbrock-exp2-a20-nojump, rosenbrock-exp2-a30-nojump
// Throws std::invalid_argument for unknown names.
ScheduleSet preset(const std::string& name);

std::vector<std::string> preset_names();

}  // namespace cbo
