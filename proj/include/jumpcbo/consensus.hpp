#pragma once

#include <span>
#include <vector>

#include "jumpcbo/objective.hpp"

namespace cbo {

// The N x d particle state, row-major. All entries must stay finite; the
// stepper raises on the first violation naming particle and step.
struct ParticleEnsemble {
  int n_particles = 0;
  int dimension = 0;
  std::vector<double> positions;  // n_particles * dimension, row-major

  ParticleEnsemble() = default;
  ParticleEnsemble(int n, int d) : n_particles(n), dimension(d), positions(static_cast<std::size_t>(n) * d, 0.0) {}

  std::span<double> row(int i) { return {positions.data() + static_cast<std::size_t>(i) * dimension, static_cast<std::size_t>(dimension)}; }
  std::span<const double> row(int i) const { return {positions.data() + static_cast<std::size_t>(i) * dimension, static_cast<std::size_t>(dimension)}; }

  // Index of the first non-finite entry's particle, or -1 when clean.
  int first_non_finite() const;
};

// Softmin-weighted average sum_i x_i e^{-alpha f_i} / sum_i e^{-alpha f_i},
// stabilized by subtracting min_j f_j before exponentiation (mathematically
// exact). fvals[i] must be f(x_i). Reduction runs in ascending particle
// index for bit-reproducibility.
std::vector<double> consensus_point(const ParticleEnsemble& ensemble,
                                    std::span<const double> fvals, double alpha);

// Convenience overload evaluating f itself.
std::vector<double> consensus_point(const ParticleEnsemble& ensemble,
                                    const ObjectiveFunction& f, double alpha);

// Evaluates f at every particle (ascending index). Throws on non-finite
// values, naming the particle.
std::vector<double> evaluate_all(const ParticleEnsemble& ensemble, const ObjectiveFunction& f);

}  // namespace cbo
