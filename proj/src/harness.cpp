#include "jumpcbo/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "jumpcbo/parallel.hpp"

namespace cbo {

namespace {

nlohmann::json jump_dist_to_json(const JumpSizeDistribution& dist) {
  if (dist.kind() != JumpSizeDistribution::Kind::kStandardGaussian)
    throw std::invalid_argument("only standard_gaussian jump sizes serialize to config files");
  return {{"kind", "standard_gaussian"}};
}

JumpSizeDistribution jump_dist_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind");
  if (kind == "standard_gaussian") return JumpSizeDistribution::standard_gaussian();
  throw std::invalid_argument("unknown jump_dist kind: " + kind);
}

nlohmann::json run_config_to_json(const RunConfig& c) {
  nlohmann::json j{{"variant", c.variant.name()},
                   {"sqrt2_in_diffusion", c.variant.sqrt2_in_diffusion},
                   {"schedules", c.schedules.to_json()},
                   {"n_particles", c.n_particles},
                   {"horizon", c.horizon},
                   {"step", c.step},
                   {"init_lo", c.init_lo},
                   {"init_hi", c.init_hi},
                   {"master_seed", c.master_seed},
                   {"snapshot_stride", c.snapshot_stride},
                   {"jump_dist", jump_dist_to_json(c.jump_dist)}};
  if (c.variant.tag == VariantTag::kHeavisideCbo)
    j["heaviside_epsilon"] = c.variant.heaviside_epsilon;
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig c;
  c.variant = ModelVariant::from_name(j.at("variant"));
  c.variant.sqrt2_in_diffusion = j.value("sqrt2_in_diffusion", true);
  if (j.contains("heaviside_epsilon")) c.variant.heaviside_epsilon = j.at("heaviside_epsilon");
  c.schedules = ScheduleSet::from_json(j.at("schedules"));
  c.n_particles = j.at("n_particles");
  c.horizon = j.at("horizon");
  c.step = j.at("step");
  c.init_lo = j.at("init_lo").get<std::vector<double>>();
  c.init_hi = j.at("init_hi").get<std::vector<double>>();
  c.master_seed = j.at("master_seed").get<std::uint64_t>();
  c.snapshot_stride = j.value("snapshot_stride", 100);
  if (j.contains("jump_dist")) c.jump_dist = jump_dist_from_json(j.at("jump_dist"));
  return c;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    const double g = a[l] - b[l];
    s += g * g;
  }
  return std::sqrt(s);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

nlohmann::json ExperimentSpec::to_json() const {
  nlohmann::json overrides = nlohmann::json::object();
  for (const auto& [name, sched] : schedule_overrides) overrides[name] = sched.to_json();
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& v : variants) vars.push_back(v.name());
  return {{"objective", objective_name},
          {"dimension", dimension},
          {"base", run_config_to_json(base)},
          {"variants", vars},
          {"n_particles_grid", n_particles_grid},
          {"repetitions", repetitions},
          {"success_radius", success_radius},
          {"schedule_overrides", overrides}};
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
  ExperimentSpec s;
  s.objective_name = j.at("objective");
  s.dimension = j.at("dimension");
  s.base = run_config_from_json(j.at("base"));
  for (const auto& name : j.at("variants")) {
    ModelVariant v = ModelVariant::from_name(name.get<std::string>());
    v.sqrt2_in_diffusion = s.base.variant.sqrt2_in_diffusion;
    s.variants.push_back(v);
  }
  s.n_particles_grid = j.at("n_particles_grid").get<std::vector<int>>();
  s.repetitions = j.value("repetitions", 100);
  s.success_radius = j.value("success_radius", 0.25);
  // Worker count is an execution detail, not part of the experiment
  // definition, so it is never serialized.
  s.workers = 1;
  if (j.contains("schedule_overrides"))
    for (const auto& [name, sched] : j.at("schedule_overrides").items())
      s.schedule_overrides.emplace(name, ScheduleSet::from_json(sched));
  return s;
}

const CellReport* ExperimentReport::cell(const std::string& variant, int n) const {
  for (const auto& c : cells)
    if (c.variant == variant && c.n_particles == n) return &c;
  return nullptr;
}

nlohmann::json ExperimentReport::to_json(bool include_runs) const {
  nlohmann::json out{{"spec", spec.to_json()}, {"master_seed", master_seed}};
  // The default table tolerance (15 points) exceeds 3 binomial standard
  // errors at 100 repetitions for every true rate p.
  out["tolerance_note"] =
      "stderr of a 100-run success rate is sqrt(p(1-p)/100) <= 5 points";
  nlohmann::json cells_json = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json cj{{"variant", c.variant},
                      {"n_particles", c.n_particles},
                      {"success_count", c.success_count},
                      {"anomaly_count", c.anomaly_count},
                      {"success_rate", c.success_rate},
                      {"mean_terminal_f", c.mean_terminal_f},
                      {"median_terminal_f", c.median_terminal_f}};
    if (include_runs) {
      nlohmann::json runs = nlohmann::json::array();
      for (const auto& r : c.runs)
        runs.push_back({{"run_index", r.run_index},
                        {"success", r.success},
                        {"anomaly", r.anomaly},
                        {"terminal_f", r.terminal_f},
                        {"dist_to_min", r.dist_to_min},
                        {"best_ever_f", r.best_ever_f},
                        {"best_ever_dist", r.best_ever_dist}});
      cj["runs"] = std::move(runs);
    }
    cells_json.push_back(std::move(cj));
  }
  out["cells"] = std::move(cells_json);
  return out;
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream os;
  os << "variant,n_particles,run_index,success,anomaly,terminal_f,dist_to_min,"
        "best_ever_f,best_ever_dist,wall_ms\n";
  for (const auto& c : cells)
    for (const auto& r : c.runs)
      os << c.variant << ',' << c.n_particles << ',' << r.run_index << ',' << (r.success ? 1 : 0)
         << ',' << (r.anomaly ? 1 : 0) << ',' << r.terminal_f << ',' << r.dist_to_min << ','
         << r.best_ever_f << ',' << r.best_ever_dist << ',' << r.wall_ms << '\n';
  return os.str();
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  if (spec.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (spec.success_radius <= 0.0) throw std::invalid_argument("success_radius must be > 0");
  if (spec.variants.empty() || spec.n_particles_grid.empty())
    throw std::invalid_argument("experiment needs at least one variant and one particle count");
  const ObjectiveFunction f = objective_by_name(spec.objective_name, spec.dimension);
  if (!f.known_minimizer())
    throw std::invalid_argument("experiment objective needs a known minimizer");
  const std::vector<double>& x_min = *f.known_minimizer();

  struct Cell {
    ModelVariant variant;
    int n = 0;
    ScheduleSet schedules;
  };
  std::vector<Cell> cell_defs;
  for (const auto& variant : spec.variants)
    for (int n : spec.n_particles_grid) {
      Cell c{variant, n, spec.base.schedules};
      if (auto it = spec.schedule_overrides.find(variant.name()); it != spec.schedule_overrides.end())
        c.schedules = it->second;
      cell_defs.push_back(std::move(c));
    }

  const int reps = spec.repetitions;
  std::vector<RunResult> results(cell_defs.size() * static_cast<std::size_t>(reps));
  const int total = static_cast<int>(results.size());
  parallel_for(total, spec.workers, [&](int flat) {
    const std::size_t ci = static_cast<std::size_t>(flat) / reps;
    const int r = flat % reps;
    const Cell& cell = cell_defs[ci];
    RunConfig cfg = spec.base;
    cfg.variant = cell.variant;
    cfg.n_particles = cell.n;
    cfg.schedules = cell.schedules;
    RunResult& res = results[static_cast<std::size_t>(flat)];
    res.run_index = r;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Trajectory traj = integrate(cfg, f, static_cast<std::uint64_t>(r));
      res.terminal_f = traj.final_consensus_f;
      res.dist_to_min = distance(traj.final_consensus, x_min);
      res.best_ever_f = traj.best_ever_f;
      res.best_ever_dist = distance(traj.best_ever_point, x_min);
      res.success = res.dist_to_min <= spec.success_radius;
    } catch (const std::exception&) {
      res.anomaly = true;
      res.success = false;
      res.terminal_f = std::numeric_limits<double>::quiet_NaN();
      res.dist_to_min = std::numeric_limits<double>::quiet_NaN();
      res.best_ever_f = std::numeric_limits<double>::quiet_NaN();
      res.best_ever_dist = std::numeric_limits<double>::quiet_NaN();
    }
    res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  });

  ExperimentReport report;
  report.spec = spec;
  report.master_seed = spec.base.master_seed;
  for (std::size_t ci = 0; ci < cell_defs.size(); ++ci) {
    CellReport cell;
    cell.variant = cell_defs[ci].variant.name();
    cell.n_particles = cell_defs[ci].n;
    std::vector<double> terminal;
    double wall = 0.0;
    for (int r = 0; r < reps; ++r) {
      const RunResult& res = results[ci * static_cast<std::size_t>(reps) + static_cast<std::size_t>(r)];
      cell.runs.push_back(res);
      if (res.success) ++cell.success_count;
      if (res.anomaly) ++cell.anomaly_count;
      if (!res.anomaly) terminal.push_back(res.terminal_f);
      wall += res.wall_ms;
    }
    cell.success_rate = 100.0 * cell.success_count / reps;
    if (!terminal.empty()) {
      double s = 0.0;
      for (double v : terminal) s += v;
      cell.mean_terminal_f = s / static_cast<double>(terminal.size());
      cell.median_terminal_f = median_of(terminal);
    }
    cell.mean_wall_ms = wall / reps;
    report.cells.push_back(std::move(cell));
  }
  return report;
}

std::string data_dir() {
  if (const char* env = std::getenv("JUMPCBO_DATA")) return env;
#ifdef JUMPCBO_DATA_DIR
  return JUMPCBO_DATA_DIR;
#else
  return "data";
#endif
}

ReferenceTable ReferenceTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open reference table: " + path);
  nlohmann::json j;
  in >> j;
  ReferenceTable t;
  t.id = j.at("id");
  t.objective_name = j.at("objective");
  t.alpha = j.at("alpha");
  t.n_grid = j.at("n_grid").get<std::vector<int>>();
  for (const auto& [variant, rates] : j.at("rates").items()) {
    const auto values = rates.get<std::vector<double>>();
    if (values.size() != t.n_grid.size())
      throw std::runtime_error("reference table row length mismatch for " + variant);
    t.rates.emplace(variant, values);
  }
  return t;
}

ReferenceTable ReferenceTable::by_id(const std::string& table_id) {
  return load(data_dir() + "/" + table_id + ".json");
}

ComparisonSummary compare_table(const ExperimentReport& report, const ReferenceTable& reference,
                                double tolerance_points) {
  ComparisonSummary summary;
  for (const auto& [variant, expected] : reference.rates) {
    for (std::size_t k = 0; k < reference.n_grid.size(); ++k) {
      const int n = reference.n_grid[k];
      const CellReport* cell = report.cell(variant, n);
      if (!cell)
        throw std::invalid_argument("report has no cell (" + variant + ", N=" + std::to_string(n) + ")");
      CellVerdict v;
      v.variant = variant;
      v.n_particles = n;
      v.observed = cell->success_rate;
      v.expected = expected[k];
      v.pass = std::abs(v.observed - v.expected) <= tolerance_points;
      if (!v.pass) ++summary.failures;
      summary.verdicts.push_back(std::move(v));
    }
  }
  return summary;
}

std::vector<ExperimentReport> sweep(const ExperimentSpec& spec, const std::string& parameter,
                                    const std::vector<double>& values) {
  std::vector<ExperimentReport> reports;
  for (std::size_t k = 0; k < values.size(); ++k) {
    ExperimentSpec s = spec;
    s.base.master_seed = RngStream::derive(spec.base.master_seed, static_cast<std::uint64_t>(k));
    const double v = values[k];
    if (parameter == "alpha") {
      s.base.schedules.alpha = v;
      for (auto& [name, sched] : s.schedule_overrides) sched.alpha = v;
    } else if (parameter == "lambda") {
      s.base.schedules.lambda = Schedule::constant(v);
      for (auto& [name, sched] : s.schedule_overrides) sched.lambda = Schedule::constant(v);
    } else if (parameter == "n_particles") {
      s.n_particles_grid = {static_cast<int>(std::llround(v))};
    } else if (parameter == "success_radius") {
      s.success_radius = v;
    } else {
      throw std::invalid_argument("unknown sweep parameter: " + parameter);
    }
    reports.push_back(run_experiment(s));
  }
  return reports;
}

ExperimentSpec table_experiment_spec(const std::string& table_id, std::uint64_t seed,
                                     bool sqrt2_in_diffusion, bool desk_scale) {
  ExperimentSpec s;
  s.n_particles_grid = {20, 50, 80, 100};
  s.repetitions = 100;
  s.success_radius = 0.25;
  s.workers = default_workers();

  std::string preset_name, nojump_preset;
  if (table_id == "table1" || table_id == "table2") {
    s.objective_name = "rastrigin";
    s.dimension = 20;
    s.base.horizon = 100.0;
    s.base.init_lo.assign(20, -6.0);
    s.base.init_hi.assign(20, 6.0);
    preset_name = table_id == "table1" ? "rastrigin-exp1-a20" : "rastrigin-exp1-a30";
  } else if (table_id == "table3" || table_id == "table4") {
    s.objective_name = "rosenbrock";
    s.dimension = 5;
    s.base.horizon = 120.0;
    s.base.init_lo.assign(5, -1.0);
    s.base.init_hi.assign(5, 3.0);
    preset_name = table_id == "table3" ? "rosenbrock-exp2-a20" : "rosenbrock-exp2-a30";
    nojump_preset = table_id == "table3" ? "rosenbrock-exp2-a20-nojump" : "rosenbrock-exp2-a30-nojump";
  } else {
    throw std::invalid_argument("unknown table id: " + table_id);
  }

  s.base.schedules = preset(preset_name);
  s.base.step = 0.01;
  s.base.master_seed = seed;
  s.base.snapshot_stride = 100000;  // experiments only need the terminal state

  for (const char* name :
       {"anisotropic_cbo", "cbo_common_wiener", "jump_cbo", "jump_cbo_common_poisson"}) {
    ModelVariant v = ModelVariant::from_name(name);
    v.sqrt2_in_diffusion = sqrt2_in_diffusion;
    s.variants.push_back(v);
    if (!nojump_preset.empty() && !v.has_jumps())
      s.schedule_overrides.emplace(v.name(), preset(nojump_preset));
  }
  s.base.variant = s.variants.front();

  if (desk_scale) {
    s.repetitions = 25;
    s.n_particles_grid = {20, 50};
  }
  return s;
}

}  // namespace cbo
