#pragma once

#include <vector>

#include "fts/grid.hpp"
#include "fts/simulate.hpp"

// Empirical and population operator estimators: covariance, lag,
// symmetrized lag, lag-window long-run covariance, and the truncated
// plug-in estimator for the functional linear model.

namespace fts {

struct WeightScheme {
  enum class Kind { Flat, Bartlett };
  Kind kind = Kind::Flat;

  static WeightScheme flat() { return {Kind::Flat}; }
  static WeightScheme bartlett() { return {Kind::Bartlett}; }

  double weight(int h, int b) const {
    return kind == Kind::Flat ? 1.0 : 1.0 - static_cast<double>(h) / (b + 1);
  }
};

struct OperatorEstimate {
  enum class Kind { Cov, Lag, SymLag, LongRun };
  KernelOp op;
  Kind kind = Kind::Cov;
  int h = 0;
  int b = 0;
  WeightScheme weights;
  int n = 0;
  bool centered = true;
};

struct PopulationOperator {
  enum class Kind { Cov, Lag, LongRun };
  KernelOp op;
  Kind kind = Kind::Cov;
  std::vector<double> lambdas;  // operator eigenvalues in basis order
  std::vector<double> varphi;   // per-index sum of lag correlations (longrun)
};

OperatorEstimate cov_op(const SamplePath& sample, bool center);

// h may be negative; negative lags are the adjoint (kernel transpose).
OperatorEstimate lag_op(const SamplePath& sample, int h, bool center);

OperatorEstimate sym_lag_op(const SamplePath& sample, int h);

OperatorEstimate longrun_op(const SamplePath& sample, int b, WeightScheme w, bool center);

PopulationOperator population_operator(const ProcessSpec& spec, PopulationOperator::Kind kind,
                                       int h_or_b = 0);

// Population symmetrized lag operator C_h* C_h (diagonal in the model basis,
// eigenvalues lambda_tilde_j^2 r(h)^2 for cross-sectionally independent scores).
PopulationOperator population_sym_lag(const ProcessSpec& spec, int h);

KernelOp flr_estimate(const SamplePath& X, const SamplePath& Y, int b, bool center = false);

}  // namespace fts
