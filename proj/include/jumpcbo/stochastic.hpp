#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace cbo {

// Deterministic, seedable random stream. Counter-based construction
// (splitmix64 over an incrementing counter), so identical (seed, stream_id)
// reproduces the identical sequence on every platform and under any thread
// count, and distinct stream_ids give statistically independent streams.
//
// Single-owner: a stream may be handed between workers but never shared
// concurrently.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  double uniform();                    // [0, 1)
  double uniform(double lo, double hi);
  double normal();                     // N(0, 1)
  // K ~ Poisson(mean). Inversion by uniform products for small means
  // (always the regime at the benchmark scales, lambda*h <= 0.9); larger
  // means are split into <= 30-mean chunks and summed, which stays exact.
  std::uint64_t poisson(double mean);

  // Stable 64-bit mix used for all seed derivation (run seeds from the
  // master seed, particle streams from run seeds).
  static std::uint64_t derive(std::uint64_t a, std::uint64_t b);

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// RNG channels within a run; kept separate so that variants which do not
// consume a channel leave the others bit-identical.
enum class RngChannel : std::uint64_t {
  kInit = 0,
  kWiener = 1,
  kPoissonCount = 2,
  kJumpSize = 3,
};

// Stream for (run, particle, channel). particle = kCommonNoiseParticle
// addresses the noise shared by the whole ensemble (common Wiener / common
// Poisson variants).
inline constexpr std::uint64_t kCommonNoiseParticle = ~std::uint64_t{0};

RngStream particle_stream(std::uint64_t run_seed, std::uint64_t particle, RngChannel channel);

// Component-wise i.i.d. jump-size distribution with mean-zero components.
class JumpSizeDistribution {
 public:
  enum class Kind { kStandardGaussian, kUniformSymmetric, kCustomTable };

  static JumpSizeDistribution standard_gaussian();
  static JumpSizeDistribution uniform_symmetric(double half_width);
  // Piecewise-linear density on knots (z, rho(z)); normalized internally.
  // Rejects tables whose mean is not zero within 1e-9 (quadrature check).
  static JumpSizeDistribution custom_table(std::vector<std::pair<double, double>> knots);

  Kind kind() const { return kind_; }
  // E |Zbar|^2 of one component: analytic for the built-ins, quadrature of
  // the linear interpolant for tables.
  double second_moment() const { return second_moment_; }

  double sample(RngStream& rng) const;

 private:
  JumpSizeDistribution() = default;

  Kind kind_ = Kind::kStandardGaussian;
  double half_width_ = 0.0;
  double second_moment_ = 1.0;
  // Inverse-CDF data for custom tables.
  std::vector<double> knot_z_, knot_pdf_, knot_cdf_;
};

// d i.i.d. N(0, h) components. Rejects h <= 0.
std::vector<double> wiener_increment(RngStream& rng, int d, double h);

// Draws K ~ Poisson(lambda * h) and returns K jump-size vectors with
// i.i.d. components. Jump arrival times within the step are not resolved:
// the Euler scheme freezes all coefficients at the step start, so only the
// sum of the sizes matters; callers typically sum the batch.
std::vector<std::vector<double>> compound_poisson_batch(RngStream& count_rng,
                                                        RngStream& size_rng,
                                                        double lambda, double h, int d,
                                                        const JumpSizeDistribution& dist);

// Sum of a compound-Poisson batch with a pre-drawn count; avoids
// materializing the batch in the stepper's hot loop.
void add_jump_sum(RngStream& size_rng, std::uint64_t count, int d,
                  const JumpSizeDistribution& dist, std::vector<double>& accum);

}  // namespace cbo
