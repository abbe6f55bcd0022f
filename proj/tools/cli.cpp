#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "jumpcbo/diagnostics.hpp"
#include "jumpcbo/harness.hpp"
#include "jumpcbo/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAcceptanceFailure = 1;
constexpr int kExitUsageError = 2;

std::string default_out_root() {
  if (const char* env = std::getenv("JUMPCBO_OUT")) return env;
  return "out";
}

void write_file(const fs::path& path, const std::string& content, bool force) {
  fs::create_directories(path.parent_path());
  if (fs::exists(path) && !force)
    throw std::runtime_error("refusing to overwrite " + path.string() + " (use --force)");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void write_report(const cbo::ExperimentReport& report, const fs::path& dir, bool force) {
  write_file(dir / "report.json", report.to_json(true).dump(2) + "\n", force);
  write_file(dir / "report.csv", report.to_csv(), force);
}

void print_cells(const cbo::ExperimentReport& report) {
  for (const auto& c : report.cells)
    std::cout << "  " << c.variant << " N=" << c.n_particles << ": " << c.success_count << "/"
              << c.runs.size() << " (" << c.success_rate << "%)"
              << (c.anomaly_count ? " anomalies=" + std::to_string(c.anomaly_count) : "") << "\n";
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed, int workers, const std::string& sqrt2,
            bool force, bool dry_run) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot open config " << config_path << "\n";
    return kExitUsageError;
  }
  json j;
  in >> j;
  cbo::ExperimentSpec spec = cbo::ExperimentSpec::from_json(j);
  if (seed) spec.base.master_seed = *seed;
  if (workers > 0) spec.workers = workers;
  if (!sqrt2.empty()) {
    const bool on = sqrt2 == "on";
    spec.base.variant.sqrt2_in_diffusion = on;
    for (auto& v : spec.variants) v.sqrt2_in_diffusion = on;
  }
  if (dry_run) {
    std::cout << spec.to_json().dump(2) << "\n"
              << "planned cells: " << spec.variants.size() * spec.n_particles_grid.size() << "\n";
    return kExitOk;
  }
  const cbo::ExperimentReport report = cbo::run_experiment(spec);
  print_cells(report);
  write_report(report, out_dir, force);
  return kExitOk;
}

int cmd_reproduce(const std::string& table_id, const std::string& out_dir, std::uint64_t seed,
                  int workers, const std::string& scale, const std::string& sqrt2,
                  double tolerance, bool force, bool dry_run) {
  cbo::ExperimentSpec spec =
      cbo::table_experiment_spec(table_id, seed, sqrt2 != "off", scale == "desk");
  if (workers > 0) spec.workers = workers;
  if (dry_run) {
    std::cout << spec.to_json().dump(2) << "\n"
              << "planned cells: " << spec.variants.size() * spec.n_particles_grid.size() << "\n";
    return kExitOk;
  }
  const cbo::ExperimentReport report = cbo::run_experiment(spec);
  print_cells(report);
  write_report(report, out_dir, force);

  const cbo::ReferenceTable reference = cbo::ReferenceTable::by_id(table_id);
  cbo::ReferenceTable trimmed = reference;
  if (scale == "desk") {
    // Reduced scale only runs the first two N levels; compare what exists.
    trimmed.n_grid = {reference.n_grid.begin(), reference.n_grid.begin() + 2};
    for (auto& [variant, rates] : trimmed.rates) rates.resize(2);
  }
  const cbo::ComparisonSummary summary = cbo::compare_table(report, trimmed, tolerance);
  json verdicts = json::array();
  for (const auto& v : summary.verdicts) {
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << v.variant << " N=" << v.n_particles
              << " observed=" << v.observed << " expected=" << v.expected << "\n";
    verdicts.push_back({{"variant", v.variant},
                        {"n_particles", v.n_particles},
                        {"observed", v.observed},
                        {"expected", v.expected},
                        {"pass", v.pass}});
  }
  json comparison{{"table", table_id},
                  {"tolerance", tolerance},
                  {"scale", scale},
                  {"failures", summary.failures},
                  {"verdicts", verdicts}};
  write_file(fs::path(out_dir) / "comparison.json", comparison.dump(2) + "\n", force);
  return summary.all_pass() ? kExitOk : kExitAcceptanceFailure;
}

cbo::RunConfig quadratic_config(int d, int n, double horizon, std::uint64_t seed) {
  cbo::RunConfig cfg;
  cfg.variant = cbo::ModelVariant::from_name("jump_cbo");
  cfg.schedules.beta = cbo::Schedule::constant(1.0);
  cfg.schedules.sigma = cbo::Schedule::constant(0.3);
  cfg.schedules.gamma = cbo::Schedule::constant(0.2);
  cfg.schedules.lambda = cbo::Schedule::constant(2.0);
  cfg.schedules.alpha = 10.0;
  cfg.n_particles = n;
  cfg.horizon = horizon;
  cfg.step = 0.01;
  cfg.init_lo.assign(static_cast<std::size_t>(d), -2.0);
  cfg.init_hi.assign(static_cast<std::size_t>(d), 2.0);
  cfg.master_seed = seed;
  return cfg;
}

int cmd_study(const std::string& kind, const std::string& out_dir, std::uint64_t seed,
              bool force, bool dry_run) {
  json out;
  if (dry_run) {
    std::cout << "study " << kind << " (seed " << seed << ")\n";
    return kExitOk;
  }
  if (kind == "meanfield") {
    const cbo::ObjectiveFunction f = cbo::quadratic_shifted(1);
    cbo::RunConfig cfg = quadratic_config(1, 25, 5.0, seed);
    const auto study = cbo::meanfield_gap_study(cfg, f, {25, 50, 100, 200, 800}, 20);
    out["reference_n"] = study.reference_n;
    out["strictly_decreasing"] = study.strictly_decreasing;
    for (const auto& row : study.rows)
      out["rows"].push_back({{"n", row.n_particles}, {"median_gap", row.median_gap}});
  } else if (kind == "euler") {
    const cbo::ObjectiveFunction f = cbo::quadratic_shifted(2);
    cbo::RunConfig cfg = quadratic_config(2, 20, 5.0, seed);
    const auto study = cbo::euler_refinement_study(cfg, f, {0.04, 0.02, 0.01, 0.005}, 100);
    out["h_reference"] = study.h_reference;
    out["strictly_decreasing"] = study.strictly_decreasing;
    for (const auto& row : study.rows)
      out["rows"].push_back({{"h", row.h}, {"ms_error", row.ms_error}, {"rms_ratio", row.rms_ratio}});
  } else if (kind == "alpha") {
    const cbo::ObjectiveFunction f = cbo::quadratic_shifted(2);
    cbo::RunConfig cfg = quadratic_config(2, 50, 10.0, seed);
    for (const auto& row : cbo::alpha_sweep(cfg, f, {1.0, 10.0, 100.0}, 20))
      out["rows"].push_back({{"alpha", row.alpha}, {"median_gap", row.median_gap}});
  } else if (kind == "pinned") {
    const cbo::ObjectiveFunction f = cbo::quadratic_shifted(1);
    cbo::RunConfig cfg = quadratic_config(1, 1, 1.0, seed);
    const double fitted = cbo::fitted_pinned_decay_rate(cfg, f, {0.0}, 1.0, 10000);
    const double predicted =
        cbo::decay_exponent(cfg.schedules, cfg.variant, 0.0, cfg.jump_dist);
    out = {{"fitted", fitted}, {"predicted", predicted}};
  } else {
    std::cerr << "error: unknown study kind " << kind << "\n";
    return kExitUsageError;
  }
  std::cout << out.dump(2) << "\n";
  write_file(fs::path(out_dir) / ("study-" + kind + ".json"), out.dump(2) + "\n", force);
  return kExitOk;
}

int check(bool ok, const std::string& name, int& failures) {
  std::cout << (ok ? "ok    " : "FAIL  ") << name << "\n";
  if (!ok) ++failures;
  return failures;
}

int cmd_validate(const std::string& level, std::uint64_t seed) {
  int failures = 0;

  {  // consensus shift/scale invariance and hull membership
    const cbo::ObjectiveFunction f = cbo::rastrigin(3);
    cbo::ParticleEnsemble e(5, 3);
    cbo::RngStream rng(seed, 1);
    for (auto& v : e.positions) v = rng.uniform(-3.0, 3.0);
    std::vector<double> fv = cbo::evaluate_all(e, f);
    // Quantize so the +1e6 shift is exact in floating point.
    for (auto& v : fv) v = std::round(v * 1024.0) / 1024.0;
    const auto bar = cbo::consensus_point(e, fv, 25.0);
    std::vector<double> shifted = fv;
    for (auto& v : shifted) v += 1e6;
    const auto bar2 = cbo::consensus_point(e, shifted, 25.0);
    check(bar == bar2, "consensus shift invariance at c=1e6", failures);
    bool in_hull = true;
    for (int l = 0; l < 3; ++l) {
      double lo = 1e300, hi = -1e300;
      for (int i = 0; i < 5; ++i) {
        lo = std::min(lo, e.row(i)[l]);
        hi = std::max(hi, e.row(i)[l]);
      }
      in_hull = in_hull && bar[static_cast<std::size_t>(l)] >= lo && bar[static_cast<std::size_t>(l)] <= hi;
    }
    check(in_hull, "consensus stays in the coordinate hull", failures);
  }

  {  // jump degeneracy: lambda = 0 jump model equals the plain model bit-for-bit
    const cbo::ObjectiveFunction f = cbo::quadratic_shifted(3);
    cbo::RunConfig cfg = quadratic_config(3, 10, 1.0, seed);
    cfg.schedules.lambda = cbo::Schedule::constant(0.0);
    const cbo::Trajectory a = cbo::integrate(cfg, f, 0);
    cfg.variant = cbo::ModelVariant::from_name("anisotropic_cbo");
    const cbo::Trajectory b = cbo::integrate(cfg, f, 0);
    check(a.snapshots.back().positions == b.snapshots.back().positions,
          "jump degeneracy bit-equality (lambda=0)", failures);
  }

  {  // moment checks
    cbo::RngStream rng(seed, 7);
    double mean = 0.0, m2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double z = rng.normal();
      mean += z;
      m2 += z * z;
    }
    mean /= n;
    m2 /= n;
    check(std::abs(mean) < 0.01 && std::abs(m2 - 1.0) < 0.02, "gaussian moments", failures);
    cbo::RngStream prng(seed, 8);
    double pm = 0.0;
    for (int i = 0; i < n; ++i) pm += static_cast<double>(prng.poisson(0.9));
    pm /= n;
    check(std::abs(pm - 0.9) < 0.02, "poisson mean", failures);
  }

  {  // determinism under worker-count changes
    cbo::ExperimentSpec spec;
    spec.objective_name = "quadratic";
    spec.dimension = 2;
    spec.base = quadratic_config(2, 10, 1.0, seed);
    spec.variants = {cbo::ModelVariant::from_name("jump_cbo")};
    spec.n_particles_grid = {10, 20};
    spec.repetitions = 5;
    spec.workers = 1;
    const auto r1 = cbo::run_experiment(spec);
    spec.workers = 4;
    const auto r2 = cbo::run_experiment(spec);
    check(r1.to_json(false).dump() == r2.to_json(false).dump(),
          "experiment determinism across worker counts", failures);
  }

  if (level == "full") {
    {  // pinned-consensus decay oracle
      const cbo::ObjectiveFunction f = cbo::quadratic_shifted(1);
      cbo::RunConfig cfg = quadratic_config(1, 1, 1.0, seed);
      cfg.init_lo = {1.0};
      cfg.init_hi = {3.0};
      const double fitted = cbo::fitted_pinned_decay_rate(cfg, f, {0.0}, 1.0, 10000);
      const double predicted = cbo::decay_exponent(cfg.schedules, cfg.variant, 0.0, cfg.jump_dist);
      check(std::abs(fitted - predicted) <= 0.05 * std::abs(predicted) + 0.02,
            "pinned decay exponent oracle (decay_exponent)", failures);
    }
    {  // mean-field gap trend
      const cbo::ObjectiveFunction f = cbo::quadratic_shifted(1);
      cbo::RunConfig cfg = quadratic_config(1, 25, 5.0, seed);
      const auto study = cbo::meanfield_gap_study(cfg, f, {25, 50, 100, 200, 800}, 20);
      check(study.strictly_decreasing, "mean-field gap strictly decreasing", failures);
    }
    {  // Euler refinement trend
      const cbo::ObjectiveFunction f = cbo::quadratic_shifted(2);
      cbo::RunConfig cfg = quadratic_config(2, 20, 5.0, seed);
      const auto study = cbo::euler_refinement_study(cfg, f, {0.04, 0.02, 0.01, 0.005}, 100);
      check(study.strictly_decreasing, "euler refinement ms_error strictly decreasing", failures);
    }
  }

  std::cout << (failures == 0 ? "validate: all checks passed\n"
                              : "validate: " + std::to_string(failures) + " check(s) failed\n");
  return failures == 0 ? kExitOk : kExitAcceptanceFailure;
}

int cmd_presets() {
  std::cout << "schedule presets:\n";
  for (const auto& name : cbo::preset_names()) std::cout << "  " << name << "\n";
  std::cout << "reference tables: table1 table2 table3 table4\n";
  std::cout << "model variants: heaviside_cbo isotropic_cbo anisotropic_cbo jump_cbo "
               "jump_cbo_common_poisson jump_cbo_time_intensity cbo_common_wiener\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jump-diffusion consensus-based optimization benchmark harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir = default_out_root();
  std::string table_id, study_kind, level = "fast";
  std::string scale = "full", sqrt2;
  std::uint64_t seed = 12345;
  bool seed_set = false;
  int workers = 0;
  double tolerance = 15.0;
  bool force = false, dry_run = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "master seed")->each([&](const std::string&) { seed_set = true; });
    cmd->add_option("--workers", workers, "worker thread count (0 = auto)");
    cmd->add_flag("--force", force, "overwrite existing outputs");
    cmd->add_flag("--dry-run", dry_run, "print the resolved config and exit");
  };

  CLI::App* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--sqrt2", sqrt2, "diffusion factor reading")->check(CLI::IsMember({"on", "off"}));
  add_common(run);

  CLI::App* reproduce = app.add_subcommand("reproduce", "reproduce a benchmark table");
  reproduce->add_option("table", table_id, "table1|table2|table3|table4")->required();
  reproduce->add_option("--scale", scale, "full or desk (reduced)")->check(CLI::IsMember({"full", "desk"}));
  reproduce->add_option("--sqrt2", sqrt2, "diffusion factor reading")->check(CLI::IsMember({"on", "off"}));
  reproduce->add_option("--tolerance", tolerance, "absolute points per cell");
  add_common(reproduce);

  CLI::App* study = app.add_subcommand("study", "run a convergence study");
  study->add_option("kind", study_kind, "meanfield|euler|alpha|pinned")->required();
  add_common(study);

  CLI::App* validate = app.add_subcommand("validate", "run the invariant suite");
  validate->add_option("level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  validate->add_option("--seed", seed, "master seed");

  app.add_subcommand("presets", "list presets and reference tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsageError;
  }

  try {
    if (run->parsed())
      return cmd_run(config_path, out_dir, seed_set ? std::optional(seed) : std::nullopt, workers,
                     sqrt2, force, dry_run);
    if (reproduce->parsed())
      return cmd_reproduce(table_id, out_dir, seed, workers, scale, sqrt2, tolerance, force, dry_run);
    if (study->parsed()) return cmd_study(study_kind, out_dir, seed, force, dry_run);
    if (validate->parsed()) return cmd_validate(level, seed);
    return cmd_presets();
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAcceptanceFailure;
  }
}
