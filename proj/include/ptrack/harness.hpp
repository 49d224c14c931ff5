#pragma once

#include "ptrack/config_io.hpp"
#include "ptrack/geometry.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ptrack {

struct StepResult {
  int step = 0;
  OspaResult ospa;
  double estimated_cardinality = 0.0;
  int true_cardinality = 0;
  std::vector<TargetState> estimates;
};

struct RunResult {
  int run_index = 0;
  std::vector<StepResult> steps;
  double wall_seconds = 0.0;
  double mean_newborn_mass = 0.0;  // per scan
};

/// Per-step medians across runs.
struct SummaryRow {
  int step = 0;
  double ospa_total = 0.0;
  double ospa_loc = 0.0;
  double ospa_card = 0.0;
  double est_cardinality = 0.0;
  int true_cardinality = 0;
  double n_estimates = 0.0;
};

struct MonteCarloResult {
  std::vector<SummaryRow> summary;
  std::vector<RunResult> runs;  // ordered by run index
};

/// Seeds of run i: the simulator and the filter draw from separate streams so
/// both filter kinds see identical measurements for the same run index.
std::uint64_t run_seed(std::uint64_t master_seed, int run_index);

/// generate -> filter -> extract -> OSPA for every step. Deterministic in
/// (master_seed, run_index).
RunResult run_single(const ExperimentConfig& config, int run_index);

/// Median of the values; mean of the middle two for even counts.
double median(std::vector<double> values);

/// Per-step medians over already completed runs.
std::vector<SummaryRow> aggregate(const std::vector<RunResult>& runs);

/// Runs `config.mc_runs` independent realizations on `threads` workers
/// (0 = hardware concurrency). Results do not depend on the thread count.
MonteCarloResult run_monte_carlo(const ExperimentConfig& config, unsigned threads = 0);

std::string run_csv(const RunResult& run);
std::string estimates_csv(const RunResult& run);
std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string truth_csv(const Scenario& scenario);

/// Writes summary.csv, truth.csv, runs/run_NNNN.csv, runs/run_NNNN_estimates.csv,
/// config.json (resolved configuration) and run_stats.json (timings).
void write_results(const MonteCarloResult& result, const ExperimentConfig& config,
                   const std::filesystem::path& out_dir);

/// Shortest round-trip decimal form.
std::string format_number(double value);

}  // namespace ptrack
