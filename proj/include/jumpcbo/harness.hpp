#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jumpcbo/diagnostics.hpp"
#include "jumpcbo/dynamics.hpp"

namespace cbo {

// A (variant grid) x (particle-count grid) success-rate experiment.
struct ExperimentSpec {
  std::string objective_name;           // "rastrigin" | "rosenbrock" | "quadratic"
  int dimension = 0;
  RunConfig base;                       // template; n_particles/variant overridden per cell
  std::vector<ModelVariant> variants;
  std::vector<int> n_particles_grid;
  int repetitions = 100;
  double success_radius = 0.25;
  int workers = 1;
  // Per-variant schedule override (Experiment 2 uses constant coefficients
  // for the non-jump models); keyed by variant name.
  std::map<std::string, ScheduleSet> schedule_overrides;

  nlohmann::json to_json() const;
  static ExperimentSpec from_json(const nlohmann::json& j);
};

struct RunResult {
  int run_index = 0;
  bool success = false;
  bool anomaly = false;          // non-finite state; counted as failure
  double terminal_f = 0.0;
  double dist_to_min = 0.0;
  double best_ever_f = 0.0;
  double best_ever_dist = 0.0;
  double wall_ms = 0.0;
};

struct CellReport {
  std::string variant;
  int n_particles = 0;
  int success_count = 0;
  int anomaly_count = 0;
  double success_rate = 0.0;     // percent
  double mean_terminal_f = 0.0;
  double median_terminal_f = 0.0;
  double mean_wall_ms = 0.0;
  std::vector<RunResult> runs;
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::uint64_t master_seed = 0;
  std::vector<CellReport> cells;  // ordered by (variant, N)

  const CellReport* cell(const std::string& variant, int n) const;
  nlohmann::json to_json(bool include_runs = true) const;
  std::string to_csv() const;     // one row per run
};

// Executes repetitions independent runs per (variant, N) cell with derived
// seeds. A run that blows up is counted as unsuccessful and flagged, not
// fatal.
ExperimentReport run_experiment(const ExperimentSpec& spec);

// Reference success rates, as printed in the source tables.
struct ReferenceTable {
  std::string id;
  std::string objective_name;
  double alpha = 0.0;
  std::vector<int> n_grid;
  std::map<std::string, std::vector<double>> rates;  // variant -> per-N percent

  static ReferenceTable load(const std::string& path);
  static ReferenceTable by_id(const std::string& table_id);  // table1..table4 from the data dir
};

struct CellVerdict {
  std::string variant;
  int n_particles = 0;
  double observed = 0.0;
  double expected = 0.0;
  bool pass = false;
};

struct ComparisonSummary {
  std::vector<CellVerdict> verdicts;
  int failures = 0;
  bool all_pass() const { return failures == 0; }
};

// |observed - expected| <= tolerance per cell; throws on key mismatch.
ComparisonSummary compare_table(const ExperimentReport& report, const ReferenceTable& reference,
                                double tolerance_points);

// One report per value of the swept parameter ("alpha", "lambda",
// "n_particles", "success_radius"), with shared master-seed offsetting.
std::vector<ExperimentReport> sweep(const ExperimentSpec& spec, const std::string& parameter,
                                    const std::vector<double>& values);

// Builds the full experiment spec for one of table1..table4.
ExperimentSpec table_experiment_spec(const std::string& table_id, std::uint64_t seed,
                                     bool sqrt2_in_diffusion, bool desk_scale);

std::string data_dir();  // reference-table directory (env JUMPCBO_DATA overrides)

}  // namespace cbo
