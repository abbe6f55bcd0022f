#include "jumpcbo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace cbo {

bool ModelVariant::has_jumps() const {
  switch (tag) {
    case VariantTag::kJumpCbo:
    case VariantTag::kJumpCboCommonPoisson:
    case VariantTag::kJumpCboTimeIntensity:
      return true;
    default:
      return false;
  }
}

double ModelVariant::diffusion_factor() const {
  return sqrt2_in_diffusion ? std::sqrt(2.0) : 1.0;
}

std::string ModelVariant::name() const {
  switch (tag) {
    case VariantTag::kHeavisideCbo: return "heaviside_cbo";
    case VariantTag::kIsotropicCbo: return "isotropic_cbo";
    case VariantTag::kAnisotropicCbo: return "anisotropic_cbo";
    case VariantTag::kJumpCbo: return "jump_cbo";
    case VariantTag::kJumpCboCommonPoisson: return "jump_cbo_common_poisson";
    case VariantTag::kJumpCboTimeIntensity: return "jump_cbo_time_intensity";
    case VariantTag::kCboCommonWiener: return "cbo_common_wiener";
  }
  throw std::logic_error("unreachable variant tag");
}

ModelVariant ModelVariant::from_name(const std::string& name) {
  ModelVariant v;
  if (name == "heaviside_cbo") v.tag = VariantTag::kHeavisideCbo;
  else if (name == "isotropic_cbo") v.tag = VariantTag::kIsotropicCbo;
  else if (name == "anisotropic_cbo") v.tag = VariantTag::kAnisotropicCbo;
  else if (name == "jump_cbo") v.tag = VariantTag::kJumpCbo;
  else if (name == "jump_cbo_common_poisson") v.tag = VariantTag::kJumpCboCommonPoisson;
  else if (name == "jump_cbo_time_intensity") v.tag = VariantTag::kJumpCboTimeIntensity;
  else if (name == "cbo_common_wiener") v.tag = VariantTag::kCboCommonWiener;
  else throw std::invalid_argument("unknown model variant: " + name);
  return v;
}

int RunConfig::n_steps() const {
  return static_cast<int>(std::llround(horizon / step));
}

void RunConfig::validate(const ObjectiveFunction& f) const {
  if (step <= 0.0) throw std::invalid_argument("step h must be > 0");
  if (horizon < 0.0) throw std::invalid_argument("horizon T must be >= 0");
  if (n_particles < 1) throw std::invalid_argument("n_particles must be >= 1");
  if (snapshot_stride < 1) throw std::invalid_argument("snapshot_stride must be >= 1");
  const int d = f.dimension();
  if (static_cast<int>(init_lo.size()) != d || static_cast<int>(init_hi.size()) != d)
    throw std::invalid_argument("init box dimension mismatch");
  for (int l = 0; l < d; ++l)
    if (!(init_lo[l] < init_hi[l]))
      throw std::invalid_argument("init box needs lo < hi in every dimension");
  if (variant.tag == VariantTag::kHeavisideCbo && variant.heaviside_epsilon <= 0.0)
    throw std::invalid_argument("heaviside_epsilon must be > 0");
  if (pinned_consensus && static_cast<int>(pinned_consensus->size()) != d)
    throw std::invalid_argument("pinned consensus dimension mismatch");
  schedules.validate(horizon);
  const double snapped = n_steps() * step;
  if (std::abs(snapped - horizon) > 1e-9 * std::max(1.0, horizon))
    std::cerr << "warning: horizon " << horizon << " snapped to " << snapped
              << " (nearest multiple of h)\n";
}

RunStreams::RunStreams(std::uint64_t seed, int n_particles)
    : common_wiener(particle_stream(seed, kCommonNoiseParticle, RngChannel::kWiener)),
      common_count(particle_stream(seed, kCommonNoiseParticle, RngChannel::kPoissonCount)) {
  wiener.reserve(static_cast<std::size_t>(n_particles));
  poisson_count.reserve(static_cast<std::size_t>(n_particles));
  jump_size.reserve(static_cast<std::size_t>(n_particles));
  for (int i = 0; i < n_particles; ++i) {
    const auto p = static_cast<std::uint64_t>(i);
    wiener.push_back(particle_stream(seed, p, RngChannel::kWiener));
    poisson_count.push_back(particle_stream(seed, p, RngChannel::kPoissonCount));
    jump_size.push_back(particle_stream(seed, p, RngChannel::kJumpSize));
  }
}

ParticleEnsemble euler_step(const ParticleEnsemble& ensemble,
                            std::span<const double> fvals, double t_k, int step_index,
                            const RunConfig& config, const ObjectiveFunction& f,
                            RunStreams& streams) {
  const int n = ensemble.n_particles;
  const int d = ensemble.dimension;
  const double h = config.step;
  const ModelVariant& variant = config.variant;

  const double beta = config.schedules.beta(t_k);
  const double sigma = config.schedules.sigma(t_k);
  const double lambda = variant.has_jumps() ? config.schedules.lambda(t_k) : 0.0;
  const double gamma = variant.tag == VariantTag::kJumpCboTimeIntensity
                           ? 1.0
                           : config.schedules.gamma(t_k);
  const double c_sigma = variant.diffusion_factor();

  const std::vector<double> bar =
      config.pinned_consensus ? *config.pinned_consensus
                              : consensus_point(ensemble, fvals, config.schedules.alpha);

  // f at the consensus, needed only by the Heaviside drift gate.
  double f_bar = 0.0;
  if (variant.tag == VariantTag::kHeavisideCbo) f_bar = f.evaluate(bar);

  // Shared noise, drawn once per step.
  std::vector<double> common_dw;
  if (variant.tag == VariantTag::kCboCommonWiener)
    common_dw = wiener_increment(streams.common_wiener, d, h);
  std::uint64_t common_count = 0;
  if (variant.tag == VariantTag::kJumpCboCommonPoisson && lambda * h > 0.0)
    common_count = streams.common_count.poisson(lambda * h);

  ParticleEnsemble next(n, d);
  std::vector<double> diff(static_cast<std::size_t>(d));
  std::vector<double> jump_sum(static_cast<std::size_t>(d));
  for (int i = 0; i < n; ++i) {
    const auto y = ensemble.row(i);
    auto out = next.row(i);

    for (int l = 0; l < d; ++l) diff[static_cast<std::size_t>(l)] = y[l] - bar[static_cast<std::size_t>(l)];

    double drift_gate = 1.0;
    if (variant.tag == VariantTag::kHeavisideCbo)
      drift_gate = 1.0 / (1.0 + std::exp(-(fvals[i] - f_bar) / variant.heaviside_epsilon));

    const bool isotropic = variant.tag == VariantTag::kHeavisideCbo ||
                           variant.tag == VariantTag::kIsotropicCbo;
    double norm_d = 0.0;
    if (isotropic) {
      for (double v : diff) norm_d += v * v;
      norm_d = std::sqrt(norm_d);
    }

    const std::vector<double> dw = variant.tag == VariantTag::kCboCommonWiener
                                       ? common_dw
                                       : wiener_increment(streams.wiener[static_cast<std::size_t>(i)], d, h);

    std::uint64_t count = 0;
    if (variant.has_jumps() && lambda * h > 0.0) {
      count = variant.tag == VariantTag::kJumpCboCommonPoisson
                  ? common_count
                  : streams.poisson_count[static_cast<std::size_t>(i)].poisson(lambda * h);
    }
    std::fill(jump_sum.begin(), jump_sum.end(), 0.0);
    if (count > 0)
      add_jump_sum(streams.jump_size[static_cast<std::size_t>(i)], count, d, config.jump_dist, jump_sum);

    for (int l = 0; l < d; ++l) {
      const auto ul = static_cast<std::size_t>(l);
      const double noise_scale = isotropic ? norm_d : diff[ul];
      double v = y[l] - beta * drift_gate * diff[ul] * h + c_sigma * sigma * noise_scale * dw[ul] +
                 gamma * diff[ul] * jump_sum[ul];
      if (!std::isfinite(v))
        throw std::runtime_error("non-finite update at particle " + std::to_string(i) +
                                 ", step " + std::to_string(step_index));
      out[l] = v;
    }
  }
  return next;
}

std::uint64_t run_seed(std::uint64_t master_seed, std::uint64_t run_index) {
  return RngStream::derive(master_seed, run_index);
}

namespace {

double max_norm(const ParticleEnsemble& e) {
  double worst = 0.0;
  for (int i = 0; i < e.n_particles; ++i) {
    double s = 0.0;
    for (double v : e.row(i)) s += v * v;
    worst = std::max(worst, std::sqrt(s));
  }
  return worst;
}

}  // namespace

Trajectory integrate(const RunConfig& config, const ObjectiveFunction& f,
                     std::uint64_t run_index) {
  config.validate(f);
  const int n = config.n_particles;
  const int d = f.dimension();
  const int steps = config.n_steps();
  const double h = config.step;
  const std::uint64_t seed = run_seed(config.master_seed, run_index);

  ParticleEnsemble ensemble(n, d);
  for (int i = 0; i < n; ++i) {
    auto init = particle_stream(seed, static_cast<std::uint64_t>(i), RngChannel::kInit);
    auto row = ensemble.row(i);
    for (int l = 0; l < d; ++l)
      row[l] = init.uniform(config.init_lo[static_cast<std::size_t>(l)],
                            config.init_hi[static_cast<std::size_t>(l)]);
  }
  RunStreams streams(seed, n);

  Trajectory traj;
  traj.best_ever_f = std::numeric_limits<double>::infinity();
  traj.max_particle_norm = max_norm(ensemble);

  auto note_best = [&](std::span<const double> fvals) {
    for (int i = 0; i < n; ++i) {
      if (fvals[static_cast<std::size_t>(i)] < traj.best_ever_f) {
        traj.best_ever_f = fvals[static_cast<std::size_t>(i)];
        const auto row = ensemble.row(i);
        traj.best_ever_point.assign(row.begin(), row.end());
      }
    }
  };

  std::vector<double> fvals = evaluate_all(ensemble, f);
  traj.objective_evals += static_cast<std::uint64_t>(n);
  note_best(fvals);
  traj.times.push_back(0.0);
  traj.snapshots.push_back(ensemble);

  for (int k = 0; k < steps; ++k) {
    ensemble = euler_step(ensemble, fvals, k * h, k, config, f, streams);
    fvals = evaluate_all(ensemble, f);
    traj.objective_evals += static_cast<std::uint64_t>(n);
    if (config.variant.tag == VariantTag::kHeavisideCbo) ++traj.objective_evals;
    note_best(fvals);
    traj.max_particle_norm = std::max(traj.max_particle_norm, max_norm(ensemble));
    const int step_done = k + 1;
    if (step_done % config.snapshot_stride == 0 || step_done == steps) {
      traj.times.push_back(step_done * h);
      traj.snapshots.push_back(ensemble);
    }
  }

  traj.final_consensus = config.pinned_consensus
                             ? *config.pinned_consensus
                             : consensus_point(ensemble, fvals, config.schedules.alpha);
  traj.final_consensus_f = f.evaluate(traj.final_consensus);
  ++traj.objective_evals;
  return traj;
}

double decay_exponent(const ScheduleSet& schedules, const ModelVariant& variant,
                      double t, const JumpSizeDistribution& dist) {
  const double c = variant.diffusion_factor();
  const double sigma = schedules.sigma(t);
  double rate = -2.0 * schedules.beta(t) + c * c * sigma * sigma;
  if (variant.has_jumps()) {
    const double gamma = variant.tag == VariantTag::kJumpCboTimeIntensity ? 1.0 : schedules.gamma(t);
    rate += schedules.lambda(t) * gamma * gamma * dist.second_moment();
  }
  return rate;
}

}  // namespace cbo
