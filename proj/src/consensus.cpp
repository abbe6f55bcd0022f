#include "jumpcbo/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cbo {

int ParticleEnsemble::first_non_finite() const {
  for (int i = 0; i < n_particles; ++i)
    for (double v : row(i))
      if (!std::isfinite(v)) return i;
  return -1;
}

std::vector<double> consensus_point(const ParticleEnsemble& ensemble,
                                    std::span<const double> fvals, double alpha) {
  const int n = ensemble.n_particles;
  const int d = ensemble.dimension;
  if (n < 1) throw std::invalid_argument("consensus_point: empty ensemble");
  if (static_cast<int>(fvals.size()) != n)
    throw std::invalid_argument("consensus_point: fvals size mismatch");
  if (alpha <= 0.0) throw std::invalid_argument("consensus_point: alpha must be > 0");

  const double f_min = *std::min_element(fvals.begin(), fvals.end());
  std::vector<double> out(static_cast<std::size_t>(d), 0.0);
  double weight_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = std::exp(-alpha * (fvals[i] - f_min));
    weight_sum += w;
    const auto x = ensemble.row(i);
    for (int l = 0; l < d; ++l) out[static_cast<std::size_t>(l)] += w * x[l];
  }
  for (auto& v : out) v /= weight_sum;
  return out;
}

std::vector<double> consensus_point(const ParticleEnsemble& ensemble,
                                    const ObjectiveFunction& f, double alpha) {
  return consensus_point(ensemble, evaluate_all(ensemble, f), alpha);
}

std::vector<double> evaluate_all(const ParticleEnsemble& ensemble, const ObjectiveFunction& f) {
  if (f.dimension() != ensemble.dimension)
    throw std::invalid_argument("evaluate_all: objective/ensemble dimension mismatch");
  std::vector<double> fvals(static_cast<std::size_t>(ensemble.n_particles));
  for (int i = 0; i < ensemble.n_particles; ++i) {
    const double v = f.evaluate(ensemble.row(i));
    if (!std::isfinite(v))
      throw std::runtime_error("objective non-finite at particle " + std::to_string(i));
    fvals[static_cast<std::size_t>(i)] = v;
  }
  return fvals;
}

}  // namespace cbo
