#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fts/expansion.hpp"
#include "fts/operators.hpp"

// Monte Carlo orchestration: repeatable experiments over a grid of sample
// sizes, log-log rate fitting, and Kolmogorov-Smirnov distances against
// reference distributions.

namespace fts {

struct ExperimentConfig {
  ProcessSpec spec;
  std::vector<int> n_grid;
  int reps = 50;
  OperatorEstimate::Kind estimator = OperatorEstimate::Kind::Cov;
  int h = 1;                    // symlag lag
  int b = 0;                    // long-run bandwidth
  WeightScheme weights;
  int burnin = 0;
  int J_report = 0;             // 0 -> model order
  SeedSpec seed;
  std::string output_path;      // empty -> no file written

  void validate() const;
};

struct CellSummary {
  int n = 0;
  int reps_ok = 0;
  std::vector<std::string> errors;  // one entry per failed replication
  // mean / sd / median / 0.9-quantile over replications of max_j |R|
  double mean_maxR1 = 0, sd_maxR1 = 0, q50_maxR1 = 0, q90_maxR1 = 0;
  double mean_maxR2 = 0, sd_maxR2 = 0, q50_maxR2 = 0, q90_maxR2 = 0;
  double mean_maxR3 = 0, sd_maxR3 = 0, q50_maxR3 = 0, q90_maxR3 = 0;
  double mean_scaled_dev = 0;  // mean over j, reps of sqrt(m)|l_hat - l|/l
  double max_mean_scaled_dev = 0;  // max over j of the per-j replication mean
};

struct RateFitResult {
  double slope = 0, intercept = 0, se = 0;
};

struct MCReport {
  std::vector<CellSummary> cells;
  RateFitResult slope_R1, slope_R2, slope_R3;
  std::uint64_t master_seed = 0;
  std::uint64_t config_hash = 0;

  nlohmann::json to_json() const;
};

MCReport run_experiment(const ExperimentConfig& config);

RateFitResult rate_fit(const std::vector<double>& ns, const std::vector<double>& errors);

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);

// FNV-1a over a byte string; used for config provenance hashes.
std::uint64_t content_hash(const std::string& text);

// Population eigensystem on the model basis, ordered by the operator
// eigenvalues of pop (ties in the profile order are rejected downstream).
EigenSystem population_eigensystem(const ProcessSpec& spec, const PopulationOperator& pop);

}  // namespace fts
