#include "jumpcbo/stochastic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cbo {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

// Finalizer of the splitmix64 generator; a bijective 64-bit mix.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : state_(mix64(seed + kGamma * mix64(stream_id + kGamma))) {}

std::uint64_t RngStream::next_u64() {
  state_ += kGamma;
  return mix64(state_);
}

std::uint64_t RngStream::derive(std::uint64_t a, std::uint64_t b) {
  return mix64(a + kGamma * mix64(b + kGamma));
}

double RngStream::uniform() {
  // 53 random bits -> [0, 1)
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 in (0, 1] so the log stays finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t RngStream::poisson(double mean) {
  if (mean < 0.0 || !std::isfinite(mean)) throw std::invalid_argument("poisson mean must be finite and >= 0");
  if (mean == 0.0) return 0;
  std::uint64_t total = 0;
  // Chunking keeps exp(-chunk) well away from underflow while staying exact
  // (a sum of independent Poissons is Poisson).
  while (mean > 0.0) {
    const double chunk = mean > 30.0 ? 30.0 : mean;
    mean -= chunk;
    const double limit = std::exp(-chunk);
    double prod = uniform();
    std::uint64_t k = 0;
    while (prod >= limit) {
      prod *= uniform();
      ++k;
    }
    total += k;
  }
  return total;
}

RngStream particle_stream(std::uint64_t run_seed, std::uint64_t particle, RngChannel channel) {
  const std::uint64_t id = RngStream::derive(particle, static_cast<std::uint64_t>(channel));
  return RngStream(run_seed, id);
}

JumpSizeDistribution JumpSizeDistribution::standard_gaussian() {
  JumpSizeDistribution d;
  d.kind_ = Kind::kStandardGaussian;
  d.second_moment_ = 1.0;
  return d;
}

JumpSizeDistribution JumpSizeDistribution::uniform_symmetric(double half_width) {
  if (half_width <= 0.0) throw std::invalid_argument("uniform_symmetric needs half_width > 0");
  JumpSizeDistribution d;
  d.kind_ = Kind::kUniformSymmetric;
  d.half_width_ = half_width;
  d.second_moment_ = half_width * half_width / 3.0;
  return d;
}

JumpSizeDistribution JumpSizeDistribution::custom_table(
    std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw std::invalid_argument("custom_table needs >= 2 knots");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (knots[i].first <= knots[i - 1].first)
      throw std::invalid_argument("custom_table knots must be strictly increasing in z");
  for (const auto& [z, p] : knots) {
    if (!std::isfinite(z) || !std::isfinite(p) || p < 0.0)
      throw std::invalid_argument("custom_table density must be finite and >= 0");
  }

  // Piecewise-linear density: exact segment integrals of 1, z, z^2.
  double mass = 0.0, mean = 0.0, second = 0.0;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const auto [z0, p0] = knots[i - 1];
    const auto [z1, p1] = knots[i];
    const double w = z1 - z0;
    mass += 0.5 * w * (p0 + p1);
    mean += w * (p0 * (2 * z0 + z1) + p1 * (z0 + 2 * z1)) / 6.0;
    // int z^2 (p0 + (p1-p0)(z-z0)/w) dz over [z0, z1]
    second += w * (p0 * (3 * z0 * z0 + 2 * z0 * z1 + z1 * z1) +
                   p1 * (z0 * z0 + 2 * z0 * z1 + 3 * z1 * z1)) / 12.0;
  }
  if (mass <= 0.0) throw std::invalid_argument("custom_table has zero mass");
  mean /= mass;
  second /= mass;
  if (!std::isfinite(second)) throw std::invalid_argument("custom_table second moment diverges");
  if (std::abs(mean) > 1e-9)
    throw std::invalid_argument("custom_table mean must be 0 (got " + std::to_string(mean) + ")");

  JumpSizeDistribution d;
  d.kind_ = Kind::kCustomTable;
  d.second_moment_ = second;
  d.knot_cdf_.resize(knots.size());
  d.knot_z_.resize(knots.size());
  d.knot_pdf_.resize(knots.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (i > 0) {
      acc += 0.5 * (knots[i].first - knots[i - 1].first) *
             (knots[i].second + knots[i - 1].second) / mass;
    }
    d.knot_z_[i] = knots[i].first;
    d.knot_pdf_[i] = knots[i].second / mass;
    d.knot_cdf_[i] = acc;
  }
  d.knot_cdf_.back() = 1.0;
  return d;
}

double JumpSizeDistribution::sample(RngStream& rng) const {
  switch (kind_) {
    case Kind::kStandardGaussian:
      return rng.normal();
    case Kind::kUniformSymmetric:
      return rng.uniform(-half_width_, half_width_);
    case Kind::kCustomTable: {
      const double u = rng.uniform();
      auto hi = std::upper_bound(knot_cdf_.begin(), knot_cdf_.end(), u);
      std::size_t i = hi == knot_cdf_.end() ? knot_cdf_.size() - 1
                                            : static_cast<std::size_t>(hi - knot_cdf_.begin());
      if (i == 0) i = 1;
      const double z0 = knot_z_[i - 1], z1 = knot_z_[i];
      const double p0 = knot_pdf_[i - 1], p1 = knot_pdf_[i];
      const double du = u - knot_cdf_[i - 1];
      const double w = z1 - z0;
      const double slope = (p1 - p0) / w;
      // Solve 0.5*slope*s^2 + p0*s = du for offset s in [0, w].
      double s;
      if (std::abs(slope) < 1e-300) {
        s = p0 > 0.0 ? du / p0 : 0.0;
      } else {
        const double disc = p0 * p0 + 2.0 * slope * du;
        s = (-p0 + std::sqrt(disc > 0.0 ? disc : 0.0)) / slope;
      }
      if (s < 0.0) s = 0.0;
      if (s > w) s = w;
      return z0 + s;
    }
  }
  throw std::logic_error("unreachable jump-size kind");
}

std::vector<double> wiener_increment(RngStream& rng, int d, double h) {
  if (h <= 0.0) throw std::invalid_argument("wiener_increment needs h > 0");
  const double s = std::sqrt(h);
  std::vector<double> out(static_cast<std::size_t>(d));
  for (auto& v : out) v = s * rng.normal();
  return out;
}

std::vector<std::vector<double>> compound_poisson_batch(RngStream& count_rng,
                                                        RngStream& size_rng,
                                                        double lambda, double h, int d,
                                                        const JumpSizeDistribution& dist) {
  if (h <= 0.0) throw std::invalid_argument("compound_poisson_batch needs h > 0");
  if (lambda < 0.0) throw std::invalid_argument("compound_poisson_batch needs lambda >= 0");
  if (lambda == 0.0) return {};
  const std::uint64_t k = count_rng.poisson(lambda * h);
  std::vector<std::vector<double>> batch(k);
  for (auto& jump : batch) {
    jump.resize(static_cast<std::size_t>(d));
    for (auto& z : jump) z = dist.sample(size_rng);
  }
  return batch;
}

void add_jump_sum(RngStream& size_rng, std::uint64_t count, int d,
                  const JumpSizeDistribution& dist, std::vector<double>& accum) {
  for (std::uint64_t j = 0; j < count; ++j)
    for (int l = 0; l < d; ++l) accum[static_cast<std::size_t>(l)] += dist.sample(size_rng);
}

}  // namespace cbo
