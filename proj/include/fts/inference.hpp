#pragma once

#include <string>
#include <vector>

#include "fts/operators.hpp"
#include "fts/rng.hpp"
#include "fts/spectral.hpp"

// Inference on empirical eigenvalues: score extraction, HAC long-run
// variances of squared scores, the studentized max-deviation statistic,
// Gaussian-comparison sampling, Gumbel normalization, simultaneous
// confidence bands, and block-coupled sums for dependence diagnostics.

namespace fts {

struct ScorePanel {
  int n = 0, J = 0;
  Matrix eta_hat;  // n x J, eta_hat(k,j) = <X_k, e_hat_j> / sqrt(lambda_hat_j)
  std::vector<double> lambdas_used;
};

struct LongRunVar {
  int bandwidth = 0;
  std::vector<Matrix> phi_hat;  // lag k -> J x J cross-covariances of eta^2 - mean
  Matrix gamma_hat;             // J x J long-run covariance
  std::vector<double> sigma_hat;
  Matrix rho_hat;
};

struct GumbelNorm {
  double a = 0.0, b = 0.0, u = 0.0;
};

enum class GumbelConstant { Paper, Classical };

struct MaxDevResult {
  double T = 0.0;
  int Jplus = 0;
  double a_m = 0.0, b_m = 0.0;
  double u = 0.0;  // threshold used for the band
  double pvalue = -1.0;  // -1 when no reference statistic was supplied
  std::vector<double> band_lower, band_upper;
  std::vector<bool> upper_infinite;
  std::string method;  // "gumbel" | "gaussian-mc"
  bool used_population_reference = false;
};

struct BlockScheme {
  int n = 0;
  int K = 0;  // block length
  int L = 0;  // block count, n = K * L

  void validate() const;
};

struct BlockCoupling {
  std::vector<double> S;      // per column: total sum of U
  std::vector<double> S_box;  // per column: sum of block-coupled V
  Matrix V;                   // L x d block sums
  Matrix V_box;               // L x d coupled block sums (independent across rows)
};

// Projections of the (optionally centered) curves onto the top-J estimated
// eigenfunctions, studentized by sqrt(lambda_hat_j).
ScorePanel empirical_scores(const SamplePath& sample, const EigenSystem& eig, int J,
                            bool center = true);

LongRunVar longrun_var(const ScorePanel& panel, int L_b, WeightScheme w);

double t_stat(const std::vector<double>& lambda_hat, const std::vector<double>& lambda_ref,
              const std::vector<double>& sigma, int n, int Jplus);

GumbelNorm gumbel_norm(int m, double x, GumbelConstant constant = GumbelConstant::Paper);

// Draws of max_j |Z_j| for a centered Gaussian vector with the given
// correlation matrix (square-root factorization with a 1e-10 ridge).
std::vector<double> gauss_max_sample(const Matrix& rho, int reps, const SeedSpec& seed);

MaxDevResult simultaneous_band(const std::vector<double>& lambda_hat,
                               const std::vector<double>& sigma_hat, int n, int Jplus,
                               double level, const std::string& method,
                               GumbelConstant constant = GumbelConstant::Paper,
                               const Matrix* rho = nullptr, int reps = 20000,
                               const SeedSpec& seed = SeedSpec{});

// Gumbel tail value of an observed statistic: P(a_m (T - b_m) > observed).
double gumbel_pvalue(double T, int m, GumbelConstant constant = GumbelConstant::Paper);

// Total and per-block sums of U_{k,h} = eta_{k,h}^2 - 1 for scores drawn
// from the model, together with the block-coupled version whose rows are
// independent by construction: block l's pre-history innovations are
// replaced by a fresh, independent history.
BlockCoupling block_coupled_sums(const BlockScheme& scheme, const ScoreModel& model, int d,
                                 const SeedSpec& seed);

}  // namespace fts
