#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "jumpcbo/diagnostics.hpp"
#include "jumpcbo/wasserstein.hpp"

using namespace cbo;

namespace {

RunConfig quadratic_config(int d, int n) {
  RunConfig cfg;
  cfg.variant = ModelVariant::from_name("jump_cbo");
  cfg.schedules.beta = Schedule::constant(1.0);
  cfg.schedules.sigma = Schedule::constant(0.3);
  cfg.schedules.gamma = Schedule::constant(0.2);
  cfg.schedules.lambda = Schedule::constant(2.0);
  cfg.schedules.alpha = 10.0;
  cfg.n_particles = n;
  cfg.horizon = 1.0;
  cfg.step = 0.01;
  cfg.init_lo.assign(static_cast<std::size_t>(d), -2.0);
  cfg.init_hi.assign(static_cast<std::size_t>(d), 2.0);
  cfg.master_seed = 77;
  return cfg;
}

}  // namespace

TEST_CASE("record: identical particles give zero variance") {
  Trajectory traj;
  ParticleEnsemble e(3, 2);
  e.positions = {1.5, -0.5, 1.5, -0.5, 1.5, -0.5};
  traj.times = {0.0};
  traj.snapshots = {e};
  const auto f = quadratic_shifted(2);
  const auto rec = record(traj, f, 5.0);
  CHECK(rec.variance[0] == 0.0);
  CHECK(rec.consensus_path[0][0] == doctest::Approx(1.5));
  CHECK(rec.consensus_path[0][1] == doctest::Approx(-0.5));
  CHECK(rec.dist_to_min.size() == 1);
}

TEST_CASE("record: two-particle hand variance") {
  Trajectory traj;
  ParticleEnsemble e(2, 1);
  e.positions = {-1.0, 1.0};
  traj.times = {0.0};
  traj.snapshots = {e};
  const auto f = quadratic_shifted(1);
  const auto rec = record(traj, f, 1.0);
  CHECK(rec.variance[0] == doctest::Approx(1.0));  // population convention
}

TEST_CASE("M stabilization matches the naive sum and never underflows") {
  Trajectory traj;
  ParticleEnsemble e(4, 1);
  e.positions = {0.1, 0.2, -0.1, 0.4};
  traj.times = {0.0};
  traj.snapshots = {e};
  const auto f = quadratic_shifted(1);

  const double alpha_small = 2.0;
  const auto rec = record(traj, f, alpha_small);
  double naive = 0.0;
  for (int i = 0; i < 4; ++i) naive += std::exp(-alpha_small * f.evaluate(e.row(i)));
  naive /= 4.0;
  CHECK(rec.m_estimate[0] == doctest::Approx(naive).epsilon(1e-12));

  // alpha*f ~ 30*40: naive M underflows, the log stays finite.
  ParticleEnsemble big(2, 1);
  big.positions = {6.0, -6.0};
  Trajectory traj2;
  traj2.times = {0.0};
  traj2.snapshots = {big};
  const auto rec2 = record(traj2, f, 30.0);
  CHECK(std::isfinite(rec2.m_log[0]));
}

TEST_CASE("variance collapses when the decay exponent is negative") {
  const auto f = quadratic_shifted(5);
  RunConfig cfg = quadratic_config(5, 200);
  cfg.horizon = 20.0;
  cfg.snapshot_stride = 2000;
  const double rate = decay_exponent(cfg.schedules, cfg.variant, 0.0, cfg.jump_dist);
  REQUIRE(rate < -0.5);
  const auto traj = integrate(cfg, f, 0);
  const auto rec = record(traj, f, cfg.schedules.alpha);
  CHECK(rec.variance.back() <= 1e-4 * rec.variance.front());
}

TEST_CASE("wasserstein: diracs, symmetry, triangle inequality") {
  const std::vector<double> a = {1.0}, b = {4.5};
  CHECK(wasserstein2_1d(a, b) == doctest::Approx(3.5));

  RngStream rng(5, 0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(10), y(7), z(13);
    for (auto& v : x) v = rng.uniform(-5.0, 5.0);
    for (auto& v : y) v = rng.uniform(-5.0, 5.0);
    for (auto& v : z) v = rng.uniform(-5.0, 5.0);
    const double xy = wasserstein2_1d(x, y);
    const double yx = wasserstein2_1d(y, x);
    CHECK(xy == doctest::Approx(yx).epsilon(1e-12));
    CHECK(xy <= wasserstein2_1d(x, z) + wasserstein2_1d(z, y) + 1e-12);
    CHECK(wasserstein2_1d(x, x) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("sliced wasserstein reduces to 1-d and detects translation") {
  std::vector<double> a = {0.0, 0.0}, b = {1.0, 0.0};  // two points in d=2
  const double w = sliced_wasserstein2(a, b, 2);
  CHECK(w > 0.0);
  CHECK(w <= 1.0 + 1e-12);  // projections shrink distances
  CHECK(sliced_wasserstein2(a, a, 2) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("consensus conditions closed forms") {
  const auto f = quadratic_shifted(2);
  RunConfig cfg = quadratic_config(2, 10);
  cfg.variant = ModelVariant::from_name("anisotropic_cbo");
  cfg.schedules.sigma = Schedule::constant(0.0);
  cfg.schedules.gamma = Schedule::constant(0.0);
  cfg.schedules.lambda = Schedule::constant(0.0);
  cfg.schedules.beta = Schedule::constant(1.0);
  const auto rep = consensus_conditions(cfg, f, 0.5, 0.4, 2.0, 1.0, 1.0);
  CHECK(rep.chi_min == doctest::Approx(2.0));

  const auto rep0 = consensus_conditions(cfg, f, 0.0, 0.4, 2.0, 1.0, 1.0);
  CHECK(rep0.eta == 0.0);
  CHECK(rep0.condition_met);

  // Hand recomputation of eta for the pure-drift case:
  // eta = 4 a e^{-a f_m} Var0 K1 beta / (M0^2 chi_min)
  const double a = cfg.schedules.alpha;
  const double expected =
      4.0 * a * std::exp(-a * 1.0) * 0.5 * (2.0 * 1.0) / (0.4 * 0.4 * 2.0);
  CHECK(rep.eta == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("meanfield gap: equal N and seeds give zero gap") {
  const auto f = quadratic_shifted(1);
  RunConfig cfg = quadratic_config(1, 10);
  const auto t1 = integrate(cfg, f, 4);
  const auto t2 = integrate(cfg, f, 4);
  CHECK(wasserstein2_1d(t1.snapshots.back().positions, t2.snapshots.back().positions) ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(meanfield_gap_study(cfg, f, {10, 20}, 2), std::invalid_argument);
}

TEST_CASE("euler refinement input validation and trivial equality") {
  const auto f = quadratic_shifted(2);
  RunConfig cfg = quadratic_config(2, 5);
  cfg.horizon = 1.0;
  CHECK_THROWS_AS(euler_refinement_study(cfg, f, {0.04, 0.02}, 2), std::invalid_argument);
  CHECK_THROWS_AS(euler_refinement_study(cfg, f, {0.01, 0.02, 0.04}, 2), std::invalid_argument);
  CHECK_THROWS_AS(euler_refinement_study(cfg, f, {0.05, 0.03, 0.01}, 2), std::invalid_argument);
  // A level equal to the reference has zero coupled-noise error.
  const auto study = euler_refinement_study(cfg, f, {0.02, 0.02, 0.02}, 2);
  for (const auto& row : study.rows) CHECK(row.ms_error == 0.0);
}

TEST_CASE("alpha sweep: constant objectives have zero gap") {
  const auto flat = ObjectiveFunction("flat", 1, [](std::span<const double>) { return 2.0; },
                                      std::vector<double>{0.0}, 2.0);
  RunConfig cfg = quadratic_config(1, 10);
  cfg.horizon = 0.2;
  const auto rows = alpha_sweep(cfg, flat, {1.0, 10.0}, 3);
  for (const auto& row : rows) CHECK(row.median_gap == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(alpha_sweep(cfg, flat, {10.0, 1.0}, 3), std::invalid_argument);
}

TEST_CASE("pinned decay rate: flat when the exponent balances to zero") {
  const auto f = quadratic_shifted(1);
  // Pinned particles are independent, so 20 particles x 4000 paths gives an
  // 80k-sample estimate. Small coefficients keep the mean-square estimator
  // from being heavy-tailed: -2(0.05) + 0.2^2 + 1.5(0.2)^2 = 0.
  RunConfig cfg = quadratic_config(1, 20);
  cfg.variant.sqrt2_in_diffusion = false;  // c = 1
  cfg.schedules.beta = Schedule::constant(0.05);
  cfg.schedules.sigma = Schedule::constant(0.2);
  cfg.schedules.gamma = Schedule::constant(0.2);
  cfg.schedules.lambda = Schedule::constant(1.5);
  cfg.init_lo = {1.0};
  cfg.init_hi = {3.0};
  REQUIRE(decay_exponent(cfg.schedules, cfg.variant, 0.0, cfg.jump_dist) ==
          doctest::Approx(0.0));
  const double fitted = fitted_pinned_decay_rate(cfg, f, {0.0}, 1.0, 4000);
  CHECK(std::abs(fitted) < 0.1);
}
