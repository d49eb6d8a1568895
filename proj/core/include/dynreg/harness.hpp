#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dynreg/config.hpp"
#include "dynreg/envgen.hpp"

namespace dynreg {

struct RegretRecord {
  std::string cell;  // "<algorithm>/n=<n>/seed=<seed>"
  std::string algorithm;
  long n = 0;
  int d = 1;
  std::uint64_t seed = 0;
  double budget = 0.0;
  double step = 0.0;  // tuned OGD step, 0 for other algorithms
  double learner_loss = 0.0;
  double comparator_loss = 0.0;
  double offline_loss = 0.0;       // NaN when the oracle is disabled
  double regret_comparator = 0.0;
  double regret_offline = 0.0;     // NaN when the oracle is disabled
  // regret_offline - regret_comparator; nonnegative up to solver tolerance.
  double dominance_slack = 0.0;
  double wall_seconds = 0.0;
  std::string status = "ok";       // error text when the cell failed
  std::vector<double> trace_comparator;  // cumulative regret, filled when traces are on
  std::vector<double> trace_offline;

  bool ok() const { return status == "ok"; }
};

// Worker count from DYNREG_WORKERS, else the hardware concurrency; at least 1.
int default_worker_count();

// Runs every (n, seed) environment against every configured algorithm. Each
// environment and its offline solution are built once and shared by the
// algorithms of that group. Records come back sorted by (n, seed, algorithm
// order) whatever the worker count. workers <= 0 uses default_worker_count().
std::vector<RegretRecord> run_cells(const ExperimentConfig& config, int workers = 0);

// Cell CSV without timing columns, so repeated runs produce identical bytes.
void write_records_csv(std::ostream& out, const std::vector<RegretRecord>& records);
void write_timings_csv(std::ostream& out, const std::vector<RegretRecord>& records);
// t, cumulative regret against the comparator and against the offline optimum.
void write_trace_csv(std::ostream& out, const RegretRecord& record);

struct ScalingFit {
  std::string algorithm;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<long> n_values;
  std::vector<double> medians;
  std::vector<std::string> warnings;  // excluded records
};

struct ScalingPoint {
  long n;
  double regret;
};

// OLS of log(median regret over seeds) on log n. Nonpositive regrets are
// dropped with a warning; fewer than 4 distinct n left is a DomainError.
ScalingFit fit_scaling_slope(const std::vector<ScalingPoint>& points);

// Uses regret against the offline optimum of the named algorithm's ok records.
ScalingFit fit_scaling_slope(const std::vector<RegretRecord>& records, const std::string& algorithm);

void write_fits_csv(std::ostream& out, const std::vector<ScalingFit>& fits);

}  // namespace dynreg
