#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "jumpcbo/dynamics.hpp"

using namespace cbo;

namespace {

RunConfig base_config(int d, int n, const std::string& variant = "anisotropic_cbo") {
  RunConfig cfg;
  cfg.variant = ModelVariant::from_name(variant);
  cfg.schedules.beta = Schedule::constant(1.0);
  cfg.schedules.sigma = Schedule::constant(0.0);
  cfg.schedules.gamma = Schedule::constant(0.0);
  cfg.schedules.lambda = Schedule::constant(0.0);
  cfg.schedules.alpha = 5.0;
  cfg.n_particles = n;
  cfg.horizon = 1.0;
  cfg.step = 0.01;
  cfg.init_lo.assign(static_cast<std::size_t>(d), -2.0);
  cfg.init_hi.assign(static_cast<std::size_t>(d), 2.0);
  cfg.master_seed = 42;
  return cfg;
}

}  // namespace

TEST_CASE("variant names round trip") {
  for (const char* name : {"heaviside_cbo", "isotropic_cbo", "anisotropic_cbo", "jump_cbo",
                           "jump_cbo_common_poisson", "jump_cbo_time_intensity",
                           "cbo_common_wiener"}) {
    const auto v = ModelVariant::from_name(name);
    CHECK(v.name() == name);
  }
  CHECK_THROWS_AS(ModelVariant::from_name("pso"), std::invalid_argument);
  CHECK(ModelVariant::from_name("jump_cbo").has_jumps());
  CHECK_FALSE(ModelVariant::from_name("anisotropic_cbo").has_jumps());
  ModelVariant v = ModelVariant::from_name("jump_cbo");
  CHECK(v.diffusion_factor() == doctest::Approx(std::sqrt(2.0)));
  v.sqrt2_in_diffusion = false;
  CHECK(v.diffusion_factor() == 1.0);
}

TEST_CASE("pure drift matches the frozen-coefficient oracle") {
  const auto f = rastrigin(2);
  RunConfig cfg = base_config(2, 6);
  const std::uint64_t seed = run_seed(cfg.master_seed, 3);
  ParticleEnsemble e(6, 2);
  RngStream rng(77, 0);
  for (auto& v : e.positions) v = rng.uniform(-2.0, 2.0);
  const auto fvals = evaluate_all(e, f);
  const auto bar = consensus_point(e, fvals, cfg.schedules.alpha);
  RunStreams streams(seed, 6);
  const auto next = euler_step(e, fvals, 0.0, 0, cfg, f, streams);
  // y - h*beta*(y - bar), with the consensus frozen at the step start
  for (int i = 0; i < 6; ++i)
    for (int l = 0; l < 2; ++l) {
      const double expected =
          e.row(i)[l] - 0.01 * (e.row(i)[l] - bar[static_cast<std::size_t>(l)]);
      CHECK(next.row(i)[l] == expected);  // exact: same arithmetic
    }
}

TEST_CASE("single particle is a fixed point of every variant") {
  const auto f = rastrigin(3);
  for (const char* name : {"heaviside_cbo", "isotropic_cbo", "anisotropic_cbo", "jump_cbo",
                           "jump_cbo_common_poisson", "jump_cbo_time_intensity",
                           "cbo_common_wiener"}) {
    RunConfig cfg = base_config(3, 1, name);
    cfg.schedules.sigma = Schedule::constant(2.0);
    cfg.schedules.gamma = Schedule::constant(1.0);
    cfg.schedules.lambda = Schedule::constant(5.0);
    const Trajectory traj = integrate(cfg, f, 0);
    const auto& first = traj.snapshots.front();
    const auto& last = traj.snapshots.back();
    for (int l = 0; l < 3; ++l) CHECK(last.row(0)[l] == first.row(0)[l]);
  }
}

TEST_CASE("jump degeneracy: lambda 0 jump model is bit-identical to the plain model") {
  const auto f = rastrigin(2);
  RunConfig cfg = base_config(2, 8, "jump_cbo");
  cfg.schedules.sigma = Schedule::constant(1.5);
  const Trajectory a = integrate(cfg, f, 1);
  cfg.variant = ModelVariant::from_name("anisotropic_cbo");
  const Trajectory b = integrate(cfg, f, 1);
  CHECK(a.snapshots.back().positions == b.snapshots.back().positions);
  CHECK(a.final_consensus == b.final_consensus);
}

TEST_CASE("two-particle gap contracts by exactly (1 - beta h) per step") {
  // f symmetric about the midpoint -> equal weights -> consensus = midpoint.
  const auto f = quadratic_shifted(1, 0.0);
  RunConfig cfg = base_config(1, 2);
  cfg.schedules.beta = Schedule::constant(0.5);
  const std::uint64_t seed = run_seed(cfg.master_seed, 0);
  ParticleEnsemble e(2, 1);
  e.positions = {-1.0, 1.0};
  RunStreams streams(seed, 2);
  double gap = 2.0;
  for (int k = 0; k < 10; ++k) {
    const auto fvals = evaluate_all(e, f);
    e = euler_step(e, fvals, k * 0.01, k, cfg, f, streams);
    gap *= 1.0 - 0.5 * 0.01;
    CHECK(e.positions[1] - e.positions[0] == doctest::Approx(gap).epsilon(1e-14));
    CHECK(e.positions[0] + e.positions[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  }
}

TEST_CASE("time-intensity variant ignores the gamma schedule") {
  const auto f = rastrigin(2);
  RunConfig cfg = base_config(2, 5, "jump_cbo_time_intensity");
  cfg.schedules.sigma = Schedule::constant(1.0);
  cfg.schedules.lambda = Schedule::constant(10.0);
  cfg.schedules.gamma = Schedule::constant(5.0);
  const Trajectory a = integrate(cfg, f, 2);
  cfg.schedules.gamma = Schedule::constant(1.0);
  const Trajectory b = integrate(cfg, f, 2);
  CHECK(a.snapshots.back().positions == b.snapshots.back().positions);
}

TEST_CASE("common wiener applies one shared increment") {
  // With a shared dW the update is y + (-beta h + c sigma dW_l) D_l per
  // component, so every pairwise gap is multiplied by the same per-component
  // factor; with independent increments the factors would differ.
  const auto f = rastrigin(2);
  RunConfig cfg = base_config(2, 3, "cbo_common_wiener");
  cfg.schedules.sigma = Schedule::constant(2.0);
  const std::uint64_t seed = run_seed(cfg.master_seed, 0);
  ParticleEnsemble e(3, 2);
  e.positions = {0.5, -1.0, 1.5, 0.25, -0.75, 2.0};
  RunStreams streams(seed, 3);
  const auto fvals = evaluate_all(e, f);
  const auto next = euler_step(e, fvals, 0.0, 0, cfg, f, streams);
  for (int l = 0; l < 2; ++l) {
    const double r01 = (next.row(0)[l] - next.row(1)[l]) / (e.row(0)[l] - e.row(1)[l]);
    const double r02 = (next.row(0)[l] - next.row(2)[l]) / (e.row(0)[l] - e.row(2)[l]);
    CHECK(r01 == doctest::Approx(r02).epsilon(1e-12));
  }
}

TEST_CASE("decay exponent closed forms") {
  const auto gauss = JumpSizeDistribution::standard_gaussian();
  ScheduleSet s;
  s.beta = Schedule::constant(1.0);
  s.sigma = Schedule::constant(0.0);
  ModelVariant plain = ModelVariant::from_name("anisotropic_cbo");
  CHECK(decay_exponent(s, plain, 0.0, gauss) == doctest::Approx(-2.0));

  ScheduleSet s2;
  s2.beta = Schedule::constant(2.0);
  s2.sigma = Schedule::constant(1.0);
  s2.gamma = Schedule::constant(0.5);
  s2.lambda = Schedule::constant(4.0);
  ModelVariant jump = ModelVariant::from_name("jump_cbo");
  jump.sqrt2_in_diffusion = false;  // c = 1
  CHECK(decay_exponent(s2, jump, 0.0, gauss) == doctest::Approx(-2.0));

  // Balanced: -2*1 + 1*1 + 4*0.25*1 = 0
  ScheduleSet s3;
  s3.beta = Schedule::constant(1.0);
  s3.sigma = Schedule::constant(1.0);
  s3.gamma = Schedule::constant(0.5);
  s3.lambda = Schedule::constant(4.0);
  CHECK(decay_exponent(s3, jump, 0.0, gauss) == doctest::Approx(0.0));
}

TEST_CASE("zero horizon returns the initial ensemble") {
  const auto f = rastrigin(2);
  RunConfig cfg = base_config(2, 4);
  cfg.horizon = 0.0;
  const Trajectory traj = integrate(cfg, f, 0);
  CHECK(traj.snapshots.size() == 1);
  CHECK(traj.times == std::vector<double>{0.0});
  const auto bar = consensus_point(traj.snapshots[0], f, cfg.schedules.alpha);
  CHECK(traj.final_consensus == bar);
}

TEST_CASE("initialization lands in the init box and is run-seed reproducible") {
  const auto f = rastrigin(2);
  RunConfig cfg = base_config(2, 10);
  cfg.horizon = 0.0;
  const Trajectory a = integrate(cfg, f, 5);
  const Trajectory b = integrate(cfg, f, 5);
  const Trajectory c = integrate(cfg, f, 6);
  CHECK(a.snapshots[0].positions == b.snapshots[0].positions);
  CHECK(a.snapshots[0].positions != c.snapshots[0].positions);
  for (double v : a.snapshots[0].positions) {
    CHECK(v >= -2.0);
    CHECK(v <= 2.0);
  }
}

TEST_CASE("config validation") {
  const auto f = rastrigin(2);
  RunConfig cfg = base_config(2, 4);
  cfg.step = 0.0;
  CHECK_THROWS_AS(cfg.validate(f), std::invalid_argument);
  cfg = base_config(2, 4);
  cfg.init_lo = {1.0, 1.0};
  cfg.init_hi = {0.0, 2.0};
  CHECK_THROWS_AS(cfg.validate(f), std::invalid_argument);
  cfg = base_config(3, 4);  // dimension mismatch vs f
  CHECK_THROWS_AS(cfg.validate(f), std::invalid_argument);
}

TEST_CASE("moment sanity on a reduced benchmark preset") {
  const auto f = rastrigin(5);
  RunConfig cfg;
  cfg.variant = ModelVariant::from_name("jump_cbo");
  cfg.schedules = preset("rastrigin-exp1-a30");
  cfg.n_particles = 20;
  cfg.horizon = 10.0;
  cfg.step = 0.01;
  cfg.init_lo.assign(5, -6.0);
  cfg.init_hi.assign(5, 6.0);
  cfg.master_seed = 9;
  const Trajectory traj = integrate(cfg, f, 0);
  CHECK(traj.max_particle_norm < 1e6);
  CHECK(std::isfinite(traj.final_consensus_f));
  CHECK(traj.best_ever_f <= traj.final_consensus_f + 1e-12);
}
