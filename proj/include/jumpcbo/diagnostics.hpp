#pragma once

#include <optional>
#include <vector>

#include "jumpcbo/dynamics.hpp"

namespace cbo {

// Per-snapshot empirical quantities of one trajectory.
struct DiagnosticsRecord {
  std::vector<double> times;
  std::vector<double> variance;        // (1/N) sum_i |x_i - mean|^2
  std::vector<double> m_log;           // log of (1/N) sum_i e^{-alpha f(x_i)}, always finite
  std::vector<double> m_estimate;      // exp(m_log); may underflow for extreme alpha*f
  std::vector<std::vector<double>> consensus_path;
  std::vector<double> dist_to_min;     // empty when the minimizer is unknown
};

DiagnosticsRecord record(const Trajectory& trajectory, const ObjectiveFunction& f,
                         double alpha);

// Consensus-formation condition report: chi(t) sampled on the step grid and
// the eta smallness parameter. K1..K3 are analytic properties of f supplied
// by the caller (shipped only for the quadratic objective).
struct ConsensusConditionReport {
  double chi_min = 0.0;
  double eta = 0.0;
  bool condition_met = false;  // eta <= 3/4 and chi positive on the grid
};

ConsensusConditionReport consensus_conditions(const RunConfig& config,
                                              const ObjectiveFunction& f,
                                              double var0, double m0,
                                              double K1, double K2, double K3);

// W2 gap of the terminal empirical measure at each N against the largest N,
// medianed over repetitions.
struct MeanfieldGapRow {
  int n_particles = 0;
  double median_gap = 0.0;
};

struct MeanfieldGapStudy {
  std::vector<MeanfieldGapRow> rows;  // ascending N, largest N excluded
  int reference_n = 0;
  bool strictly_decreasing = false;
};

MeanfieldGapStudy meanfield_gap_study(const RunConfig& base, const ObjectiveFunction& f,
                                      std::vector<int> n_levels, int repetitions);

// Mean-square terminal deviation of each step size against the finest level
// under coupled noise (Brownian increments aggregated from the finest grid,
// Poisson jumps placed on the finest grid and assigned to coarse steps by
// containment).
struct EulerRefinementRow {
  double h = 0.0;
  double ms_error = 0.0;
  double rms_ratio = 0.0;  // rms_error(previous level) / rms_error(this level); 0 for the first row
};

struct EulerRefinementStudy {
  std::vector<EulerRefinementRow> rows;  // coarse to fine, finest level excluded
  double h_reference = 0.0;
  bool strictly_decreasing = false;
};

EulerRefinementStudy euler_refinement_study(const RunConfig& base, const ObjectiveFunction& f,
                                            std::vector<double> h_levels, int paths);

// Median over repetitions of f(terminal consensus) - f_m per alpha.
struct AlphaSweepRow {
  double alpha = 0.0;
  double median_gap = 0.0;
};

std::vector<AlphaSweepRow> alpha_sweep(const RunConfig& base, const ObjectiveFunction& f,
                                       std::vector<double> alphas, int repetitions);

// Monte Carlo fit of the pinned-consensus mean-square decay rate:
// runs `paths` independent particles with the consensus pinned at V and
// returns ln(m(T)/m(0)) / T of the mean-square distance to V.
double fitted_pinned_decay_rate(const RunConfig& base, const ObjectiveFunction& f,
                                std::vector<double> pin, double fit_horizon, int paths);

}  // namespace cbo
