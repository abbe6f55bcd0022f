#include "jumpcbo/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jumpcbo/parallel.hpp"
#include "jumpcbo/wasserstein.hpp"

namespace cbo {

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double ensemble_variance(const ParticleEnsemble& e) {
  const int n = e.n_particles, d = e.dimension;
  std::vector<double> mean(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < n; ++i) {
    const auto x = e.row(i);
    for (int l = 0; l < d; ++l) mean[static_cast<std::size_t>(l)] += x[l];
  }
  for (auto& v : mean) v /= n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto x = e.row(i);
    for (int l = 0; l < d; ++l) {
      const double g = x[l] - mean[static_cast<std::size_t>(l)];
      acc += g * g;
    }
  }
  return acc / n;
}

// log of (1/N) sum_i e^{-alpha f_i}, computed against the smallest f so the
// intermediate sum never underflows to zero.
double log_m(std::span<const double> fvals, double alpha) {
  const double f_min = *std::min_element(fvals.begin(), fvals.end());
  double s = 0.0;
  for (double f : fvals) s += std::exp(-alpha * (f - f_min));
  return -alpha * f_min + std::log(s / static_cast<double>(fvals.size()));
}

}  // namespace

DiagnosticsRecord record(const Trajectory& trajectory, const ObjectiveFunction& f,
                         double alpha) {
  if (trajectory.snapshots.empty()) throw std::invalid_argument("record: trajectory has no snapshots");
  DiagnosticsRecord rec;
  rec.times = trajectory.times;
  const auto& x_min = f.known_minimizer();
  for (const auto& snap : trajectory.snapshots) {
    const std::vector<double> fvals = evaluate_all(snap, f);
    rec.variance.push_back(ensemble_variance(snap));
    const double ml = log_m(fvals, alpha);
    rec.m_log.push_back(ml);
    rec.m_estimate.push_back(std::exp(ml));
    std::vector<double> bar = consensus_point(snap, fvals, alpha);
    if (x_min) {
      double s = 0.0;
      for (std::size_t l = 0; l < bar.size(); ++l) {
        const double g = bar[l] - (*x_min)[l];
        s += g * g;
      }
      rec.dist_to_min.push_back(std::sqrt(s));
    }
    rec.consensus_path.push_back(std::move(bar));
  }
  return rec;
}

ConsensusConditionReport consensus_conditions(const RunConfig& config,
                                              const ObjectiveFunction& f,
                                              double var0, double m0,
                                              double K1, double K2, double K3) {
  if (!f.known_minimum()) throw std::invalid_argument("consensus_conditions needs the known minimum");
  if (var0 < 0.0 || m0 <= 0.0) throw std::invalid_argument("consensus_conditions: var0 >= 0, m0 > 0 required");
  const double f_m = *f.known_minimum();
  const double alpha = config.schedules.alpha;
  const ModelVariant& variant = config.variant;
  const double c2 = variant.diffusion_factor() * variant.diffusion_factor();
  const double ez2 = config.jump_dist.second_moment();
  const double boost = 1.0 + 2.0 * std::exp(-alpha * f_m) / m0;

  auto jump_rate = [&](double t) {
    if (!variant.has_jumps()) return 0.0;
    const double g = variant.tag == VariantTag::kJumpCboTimeIntensity
                         ? 1.0
                         : config.schedules.gamma(t);
    return config.schedules.lambda(t) * g * g * ez2;
  };
  auto chi = [&](double t) {
    const double s = config.schedules.sigma(t);
    return 2.0 * config.schedules.beta(t) - (c2 * s * s + jump_rate(t)) * boost;
  };

  const int steps = std::max(config.n_steps(), 1);
  double chi_min = chi(0.0);
  double beta_sup = config.schedules.beta(0.0);
  bool chi_positive = chi_min > 0.0;
  for (int k = 1; k <= steps; ++k) {
    const double t = k * config.step;
    const double c = chi(t);
    chi_min = std::min(chi_min, c);
    beta_sup = std::max(beta_sup, config.schedules.beta(t));
    chi_positive = chi_positive && c > 0.0;
  }

  ConsensusConditionReport rep;
  rep.chi_min = chi_min;
  if (var0 == 0.0) {
    rep.eta = 0.0;
  } else {
    const double s0 = config.schedules.sigma(0.0);
    rep.eta = 4.0 * alpha * std::exp(-alpha * f_m) * var0 *
              (K1 * beta_sup + K2 * s0 * s0 + K3 * jump_rate(0.0)) / (m0 * m0 * chi_min);
  }
  rep.condition_met = chi_positive && rep.eta <= 0.75;
  return rep;
}

MeanfieldGapStudy meanfield_gap_study(const RunConfig& base, const ObjectiveFunction& f,
                                      std::vector<int> n_levels, int repetitions) {
  if (n_levels.size() < 3) throw std::invalid_argument("meanfield_gap_study needs >= 3 particle counts");
  if (!std::is_sorted(n_levels.begin(), n_levels.end()))
    throw std::invalid_argument("meanfield_gap_study: n_levels must be ascending");
  if (repetitions < 1) throw std::invalid_argument("meanfield_gap_study needs >= 1 repetition");

  const int d = f.dimension();
  const int reference_n = n_levels.back();
  const std::size_t levels = n_levels.size();

  // gaps[level][rep]
  std::vector<std::vector<double>> gaps(levels - 1, std::vector<double>(static_cast<std::size_t>(repetitions)));
  for (int r = 0; r < repetitions; ++r) {
    auto terminal = [&](int n, std::uint64_t run_index) {
      RunConfig cfg = base;
      cfg.n_particles = n;
      const Trajectory traj = integrate(cfg, f, run_index);
      return traj.snapshots.back().positions;
    };
    // Distinct run indices per level so the reference sample is independent.
    const std::vector<double> ref =
        terminal(reference_n, RngStream::derive(static_cast<std::uint64_t>(r), levels - 1));
    for (std::size_t li = 0; li + 1 < levels; ++li) {
      const std::vector<double> cur =
          terminal(n_levels[li], RngStream::derive(static_cast<std::uint64_t>(r), li));
      gaps[li][static_cast<std::size_t>(r)] =
          d == 1 ? wasserstein2_1d(cur, ref) : sliced_wasserstein2(cur, ref, d);
    }
  }

  MeanfieldGapStudy study;
  study.reference_n = reference_n;
  for (std::size_t li = 0; li + 1 < levels; ++li)
    study.rows.push_back({n_levels[li], median_of(gaps[li])});
  study.strictly_decreasing = true;
  for (std::size_t li = 1; li < study.rows.size(); ++li)
    if (!(study.rows[li].median_gap < study.rows[li - 1].median_gap))
      study.strictly_decreasing = false;
  return study;
}

namespace {

// Pre-drawn noise for one path on the finest grid; coarse levels aggregate.
struct CoupledNoise {
  // wiener[k] and jump[k] are N*d row-major for fine step k.
  std::vector<std::vector<double>> wiener;
  std::vector<std::vector<double>> jump;
};

CoupledNoise draw_coupled_noise(const RunConfig& fine, const ObjectiveFunction& f,
                                std::uint64_t run_index) {
  const int n = fine.n_particles;
  const int d = f.dimension();
  const int steps = fine.n_steps();
  const double h = fine.step;
  const std::uint64_t seed = run_seed(fine.master_seed, run_index);
  RunStreams streams(seed, n);
  const double lambda0 = fine.schedules.lambda(0.0);
  const bool common_count = fine.variant.tag == VariantTag::kJumpCboCommonPoisson;

  CoupledNoise noise;
  noise.wiener.assign(static_cast<std::size_t>(steps),
                      std::vector<double>(static_cast<std::size_t>(n) * d, 0.0));
  noise.jump.assign(static_cast<std::size_t>(steps),
                    std::vector<double>(static_cast<std::size_t>(n) * d, 0.0));
  for (int k = 0; k < steps; ++k) {
    auto& w = noise.wiener[static_cast<std::size_t>(k)];
    auto& j = noise.jump[static_cast<std::size_t>(k)];
    std::uint64_t shared = 0;
    if (common_count && lambda0 * h > 0.0) shared = streams.common_count.poisson(lambda0 * h);
    for (int i = 0; i < n; ++i) {
      const auto dw = wiener_increment(streams.wiener[static_cast<std::size_t>(i)], d, h);
      std::copy(dw.begin(), dw.end(), w.begin() + static_cast<std::size_t>(i) * d);
      if (fine.variant.has_jumps() && lambda0 * h > 0.0) {
        const std::uint64_t count =
            common_count ? shared
                         : streams.poisson_count[static_cast<std::size_t>(i)].poisson(lambda0 * h);
        if (count > 0) {
          std::vector<double> sum(static_cast<std::size_t>(d), 0.0);
          add_jump_sum(streams.jump_size[static_cast<std::size_t>(i)], count, d, fine.jump_dist, sum);
          std::copy(sum.begin(), sum.end(), j.begin() + static_cast<std::size_t>(i) * d);
        }
      }
    }
  }
  return noise;
}

// One Euler pass on step h = factor * h_fine with noise aggregated from the
// fine grid. Supports the anisotropic and jump variants used by refinement
// studies (isotropic/Heaviside share the same coupling but are not needed).
ParticleEnsemble integrate_with_noise(const RunConfig& base, const ObjectiveFunction& f,
                                      std::uint64_t run_index, int factor,
                                      const CoupledNoise& noise, double h_fine) {
  const int n = base.n_particles;
  const int d = f.dimension();
  const std::uint64_t seed = run_seed(base.master_seed, run_index);
  const int fine_steps = static_cast<int>(noise.wiener.size());
  const int steps = fine_steps / factor;
  const double h = factor * h_fine;
  const double c_sigma = base.variant.diffusion_factor();

  ParticleEnsemble e(n, d);
  for (int i = 0; i < n; ++i) {
    auto init = particle_stream(seed, static_cast<std::uint64_t>(i), RngChannel::kInit);
    auto row = e.row(i);
    for (int l = 0; l < d; ++l)
      row[l] = init.uniform(base.init_lo[static_cast<std::size_t>(l)],
                            base.init_hi[static_cast<std::size_t>(l)]);
  }

  std::vector<double> dw(static_cast<std::size_t>(d));
  std::vector<double> jsum(static_cast<std::size_t>(d));
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    const double beta = base.schedules.beta(t);
    const double sigma = base.schedules.sigma(t);
    const double gamma = base.variant.tag == VariantTag::kJumpCboTimeIntensity
                             ? 1.0
                             : base.schedules.gamma(t);
    const std::vector<double> fvals = evaluate_all(e, f);
    const std::vector<double> bar =
        base.pinned_consensus ? *base.pinned_consensus
                              : consensus_point(e, fvals, base.schedules.alpha);
    ParticleEnsemble next(n, d);
    for (int i = 0; i < n; ++i) {
      std::fill(dw.begin(), dw.end(), 0.0);
      std::fill(jsum.begin(), jsum.end(), 0.0);
      for (int s = k * factor; s < (k + 1) * factor; ++s) {
        const auto& w = noise.wiener[static_cast<std::size_t>(s)];
        const auto& j = noise.jump[static_cast<std::size_t>(s)];
        for (int l = 0; l < d; ++l) {
          dw[static_cast<std::size_t>(l)] += w[static_cast<std::size_t>(i) * d + l];
          jsum[static_cast<std::size_t>(l)] += j[static_cast<std::size_t>(i) * d + l];
        }
      }
      const auto y = e.row(i);
      auto out = next.row(i);
      for (int l = 0; l < d; ++l) {
        const auto ul = static_cast<std::size_t>(l);
        const double diff = y[l] - bar[ul];
        const double v = y[l] - beta * diff * h + c_sigma * sigma * diff * dw[ul] +
                         gamma * diff * jsum[ul];
        if (!std::isfinite(v))
          throw std::runtime_error("non-finite refinement update at particle " + std::to_string(i));
        out[l] = v;
      }
    }
    e = std::move(next);
  }
  return e;
}

}  // namespace

EulerRefinementStudy euler_refinement_study(const RunConfig& base, const ObjectiveFunction& f,
                                            std::vector<double> h_levels, int paths) {
  if (h_levels.size() < 3) throw std::invalid_argument("euler_refinement_study needs >= 3 levels");
  if (paths < 1) throw std::invalid_argument("euler_refinement_study needs >= 1 path");
  for (std::size_t i = 1; i < h_levels.size(); ++i)
    if (h_levels[i] > h_levels[i - 1])
      throw std::invalid_argument("euler_refinement_study: h_levels must be non-increasing");
  const double h_ref = h_levels.back();
  if (h_ref <= 0.0) throw std::invalid_argument("euler_refinement_study: h must be > 0");
  std::vector<int> factors;
  for (double h : h_levels) {
    const double ratio = h / h_ref;
    const int factor = static_cast<int>(std::llround(ratio));
    if (factor < 1 || std::abs(ratio - factor) > 1e-9 || (factor & (factor - 1)) != 0)
      throw std::invalid_argument(
          "euler_refinement_study: levels must form a halving sequence (each h a power-of-two "
          "multiple of the finest)");
    factors.push_back(factor);
  }
  const double steps_ref = base.horizon / h_ref;
  if (std::abs(steps_ref - std::llround(steps_ref)) > 1e-6)
    throw std::invalid_argument("euler_refinement_study: horizon must be a multiple of the finest h");

  RunConfig fine = base;
  fine.step = h_ref;
  fine.schedules.validate(base.horizon);

  const std::size_t levels = h_levels.size();
  std::vector<double> ms(levels - 1, 0.0);
  const int n = base.n_particles;
  const int d = f.dimension();
  for (int p = 0; p < paths; ++p) {
    const auto run_index = static_cast<std::uint64_t>(p);
    const CoupledNoise noise = draw_coupled_noise(fine, f, run_index);
    const ParticleEnsemble ref = integrate_with_noise(fine, f, run_index, 1, noise, h_ref);
    for (std::size_t li = 0; li + 1 < levels; ++li) {
      const ParticleEnsemble coarse =
          integrate_with_noise(fine, f, run_index, factors[li], noise, h_ref);
      double acc = 0.0;
      for (std::size_t idx = 0; idx < coarse.positions.size(); ++idx) {
        const double g = coarse.positions[idx] - ref.positions[idx];
        acc += g * g;
      }
      ms[li] += acc / n;  // |.|^2 summed over d, averaged over particles
    }
  }
  for (auto& v : ms) v /= paths;

  EulerRefinementStudy study;
  study.h_reference = h_ref;
  for (std::size_t li = 0; li + 1 < levels; ++li) {
    EulerRefinementRow row;
    row.h = h_levels[li];
    row.ms_error = ms[li];
    row.rms_ratio = li == 0 ? 0.0
                            : (ms[li] > 0.0 ? std::sqrt(ms[li - 1] / ms[li]) : 0.0);
    study.rows.push_back(row);
  }
  study.strictly_decreasing = true;
  for (std::size_t li = 1; li < study.rows.size(); ++li)
    if (!(study.rows[li].ms_error < study.rows[li - 1].ms_error))
      study.strictly_decreasing = false;
  return study;
}

std::vector<AlphaSweepRow> alpha_sweep(const RunConfig& base, const ObjectiveFunction& f,
                                       std::vector<double> alphas, int repetitions) {
  if (!std::is_sorted(alphas.begin(), alphas.end()))
    throw std::invalid_argument("alpha_sweep: alphas must be ascending");
  for (double a : alphas)
    if (a <= 0.0) throw std::invalid_argument("alpha_sweep: alphas must be > 0");
  if (repetitions < 1) throw std::invalid_argument("alpha_sweep needs >= 1 repetition");
  const double f_m = f.known_minimum().value_or(0.0);

  std::vector<AlphaSweepRow> rows;
  for (double a : alphas) {
    RunConfig cfg = base;
    cfg.schedules.alpha = a;
    std::vector<double> gaps(static_cast<std::size_t>(repetitions));
    for (int r = 0; r < repetitions; ++r) {
      const Trajectory traj = integrate(cfg, f, static_cast<std::uint64_t>(r));
      gaps[static_cast<std::size_t>(r)] = traj.final_consensus_f - f_m;
    }
    rows.push_back({a, median_of(std::move(gaps))});
  }
  return rows;
}

double fitted_pinned_decay_rate(const RunConfig& base, const ObjectiveFunction& f,
                                std::vector<double> pin, double fit_horizon, int paths) {
  if (paths < 1) throw std::invalid_argument("fitted_pinned_decay_rate needs >= 1 path");
  if (fit_horizon <= 0.0) throw std::invalid_argument("fitted_pinned_decay_rate needs horizon > 0");
  RunConfig cfg = base;
  cfg.pinned_consensus = pin;
  cfg.horizon = fit_horizon;
  cfg.snapshot_stride = std::max(cfg.n_steps(), 1);

  double ms0 = 0.0, msT = 0.0;
  std::size_t count0 = 0, countT = 0;
  for (int p = 0; p < paths; ++p) {
    const Trajectory traj = integrate(cfg, f, static_cast<std::uint64_t>(p));
    const ParticleEnsemble& first = traj.snapshots.front();
    const ParticleEnsemble& last = traj.snapshots.back();
    for (int i = 0; i < first.n_particles; ++i) {
      double s = 0.0;
      const auto x = first.row(i);
      for (std::size_t l = 0; l < pin.size(); ++l) {
        const double g = x[l] - pin[l];
        s += g * g;
      }
      ms0 += s;
      ++count0;
    }
    for (int i = 0; i < last.n_particles; ++i) {
      double s = 0.0;
      const auto x = last.row(i);
      for (std::size_t l = 0; l < pin.size(); ++l) {
        const double g = x[l] - pin[l];
        s += g * g;
      }
      msT += s;
      ++countT;
    }
  }
  ms0 /= static_cast<double>(count0);
  msT /= static_cast<double>(countT);
  if (ms0 <= 0.0 || msT <= 0.0)
    throw std::runtime_error("fitted_pinned_decay_rate: degenerate mean-square distances");
  return std::log(msT / ms0) / (cfg.n_steps() * cfg.step);
}

}  // namespace cbo
