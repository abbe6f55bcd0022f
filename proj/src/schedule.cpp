#include "jumpcbo/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cbo {

Schedule::Schedule(Kind kind, std::vector<double> params,
                   std::vector<std::pair<double, double>> knots)
    : kind_(kind), params_(std::move(params)), knots_(std::move(knots)) {}

Schedule Schedule::constant(double c) { return Schedule(Kind::kConstant, {c}); }

Schedule Schedule::exponential_approach(double limit, double amplitude, double rate) {
  if (rate <= 0.0) throw std::invalid_argument("schedule rate must be > 0");
  return Schedule(Kind::kExponentialApproach, {limit, amplitude, rate});
}

Schedule Schedule::piecewise_exponential_decay(double value, double t_switch, double rate) {
  if (rate <= 0.0) throw std::invalid_argument("schedule rate must be > 0");
  if (t_switch < 0.0) throw std::invalid_argument("switch time must be >= 0");
  return Schedule(Kind::kPiecewiseExponentialDecay, {value, t_switch, rate});
}

Schedule Schedule::table(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw std::invalid_argument("table schedule needs >= 2 knots");
  if (!std::is_sorted(knots.begin(), knots.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; }))
    throw std::invalid_argument("table schedule knots must be sorted in time");
  return Schedule(Kind::kTable, {}, std::move(knots));
}

double Schedule::operator()(double t) const {
  if (t < 0.0) throw std::invalid_argument("schedule evaluated at negative time");
  switch (kind_) {
    case Kind::kConstant:
      return params_[0];
    case Kind::kExponentialApproach:
      // a + b * exp(-t / r)
      return params_[0] + params_[1] * std::exp(-t / params_[2]);
    case Kind::kPiecewiseExponentialDecay: {
      const double v = params_[0], ts = params_[1], r = params_[2];
      return t <= ts ? v : v * std::exp((ts - t) / r);
    }
    case Kind::kTable: {
      if (t <= knots_.front().first) return knots_.front().second;
      if (t >= knots_.back().first) return knots_.back().second;
      auto hi = std::upper_bound(knots_.begin(), knots_.end(), t,
                                 [](double tt, const auto& k) { return tt < k.first; });
      auto lo = hi - 1;
      const double w = (t - lo->first) / (hi->first - lo->first);
      return lo->second + w * (hi->second - lo->second);
    }
  }
  throw std::logic_error("unreachable schedule kind");
}

nlohmann::json Schedule::to_json() const {
  switch (kind_) {
    case Kind::kConstant:
      return {{"kind", "constant"}, {"value", params_[0]}};
    case Kind::kExponentialApproach:
      return {{"kind", "exponential_approach"},
              {"limit", params_[0]}, {"amplitude", params_[1]}, {"rate", params_[2]}};
    case Kind::kPiecewiseExponentialDecay:
      return {{"kind", "piecewise_exponential_decay"},
              {"v", params_[0]}, {"t_switch", params_[1]}, {"rate", params_[2]}};
    case Kind::kTable: {
      nlohmann::json pts = nlohmann::json::array();
      for (const auto& [t, v] : knots_) pts.push_back({t, v});
      return {{"kind", "table"}, {"points", pts}};
    }
  }
  throw std::logic_error("unreachable schedule kind");
}

Schedule Schedule::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind");
  if (kind == "constant") return constant(j.at("value"));
  if (kind == "exponential_approach")
    return exponential_approach(j.at("limit"), j.at("amplitude"), j.at("rate"));
  if (kind == "piecewise_exponential_decay")
    return piecewise_exponential_decay(j.at("v"), j.at("t_switch"), j.at("rate"));
  if (kind == "table") {
    std::vector<std::pair<double, double>> knots;
    for (const auto& p : j.at("points")) knots.emplace_back(p.at(0), p.at(1));
    return table(std::move(knots));
  }
  throw std::invalid_argument("unknown schedule kind: " + kind);
}

void ScheduleSet::validate(double horizon) const {
  if (alpha <= 0.0) throw std::invalid_argument("alpha must be > 0");
  const int kSamples = 256;
  const double T = std::max(horizon, 0.0);
  for (int k = 0; k <= kSamples; ++k) {
    const double t = T * k / kSamples;
    const double vals[4] = {beta(t), sigma(t), gamma(t), lambda(t)};
    for (double v : vals)
      if (!std::isfinite(v)) throw std::runtime_error("schedule non-finite at t=" + std::to_string(t));
    if (vals[1] < 0.0 || vals[2] < 0.0 || vals[3] < 0.0)
      throw std::runtime_error("sigma/gamma/lambda must be >= 0 (violated at t=" + std::to_string(t) + ")");
  }
}

nlohmann::json ScheduleSet::to_json() const {
  return {{"beta", beta.to_json()},   {"sigma", sigma.to_json()},
          {"gamma", gamma.to_json()}, {"lambda", lambda.to_json()},
          {"alpha", alpha}};
}

ScheduleSet ScheduleSet::from_json(const nlohmann::json& j) {
  ScheduleSet s;
  s.beta = Schedule::from_json(j.at("beta"));
  s.sigma = Schedule::from_json(j.at("sigma"));
  s.gamma = Schedule::from_json(j.at("gamma"));
  s.lambda = Schedule::from_json(j.at("lambda"));
  s.alpha = j.at("alpha");
  return s;
}

namespace {

ScheduleSet exp1(double alpha) {
  ScheduleSet s;
  s.beta = Schedule::constant(1.0);
  s.sigma = Schedule::constant(5.1);
  s.gamma = Schedule::piecewise_exponential_decay(1.0, 20.0, 20.0);
  s.lambda = Schedule::constant(20.0);
  s.alpha = alpha;
  return s;
}

ScheduleSet exp2_jump(double alpha) {
  ScheduleSet s;
  s.beta = Schedule::exponential_approach(2.0, -1.0, 100.0);   // 2 - e^{-t/100}
  s.sigma = Schedule::exponential_approach(4.0, 1.0, 90.0);    // 4 + e^{-t/90}
  s.gamma = Schedule::piecewise_exponential_decay(1.0, 90.0, 90.0);
  s.lambda = Schedule::constant(90.0);
  s.alpha = alpha;
  return s;
}

ScheduleSet exp2_nojump(double alpha) {
  ScheduleSet s;
  s.beta = Schedule::constant(1.0);
  s.sigma = Schedule::constant(5.0);
  s.gamma = Schedule::constant(0.0);
  s.lambda = Schedule::constant(0.0);
  s.alpha = alpha;
  return s;
}

}  // namespace

ScheduleSet preset(const std::string& name) {
  if (name == "rastrigin-exp1-a20") return exp1(20.0);
  if (name == "rastrigin-exp1-a30") return exp1(30.0);
  if (name == "rosenbrock-exp2-a20") return exp2_jump(20.0);
  if (name == "rosenbrock-exp2-a30") return exp2_jump(30.0);
  if (name == "rosenbrock-exp2-a20-nojump") return exp2_nojump(20.0);
  if (name == "rosenbrock-exp2-a30-nojump") return exp2_nojump(30.0);
  throw std::invalid_argument("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
  return {"rastrigin-exp1-a20",     "rastrigin-exp1-a30",
          "rosenbrock-exp2-a20",    "rosenbrock-exp2-a30",
          "rosenbrock-exp2-a20-nojump", "rosenbrock-exp2-a30-nojump"};
}

}  // namespace cbo
