#pragma once

#include <optional>
#include <vector>

#include "fts/common.hpp"
#include "fts/grid.hpp"
#include "fts/rng.hpp"

// Generators for stationary functional time series with controlled
// eigenvalue profiles and score dependence: Karhunen-Loeve draws with
// iid / linear (possibly long-memory) / MA(q) / GARCH-type scores, a
// diagonal ARH(1) recursion, the multiplicative martingale model, and the
// innovation-coupling dependence measure.

namespace fts {

struct EigenProfile {
  enum class Kind { Polynomial, Exponential, Explicit };
  Kind kind = Kind::Polynomial;
  double rate = 2.0;   // r for polynomial j^-r, rho for exponential rho^j
  std::vector<double> values;  // explicit list
  int count = 0;       // truncation J_model

  static EigenProfile polynomial(double r, int J);
  static EigenProfile exponential(double rho, int J);
  static EigenProfile explicit_list(std::vector<double> v);

  std::vector<double> lambdas() const;
  void validate() const;
};

struct ScoreModel {
  enum class Kind { IidGaussian, LinearGaussian, MaQ, MultiplicativeVol };
  Kind kind = Kind::IidGaussian;
  double alpha = 1.0;       // linear decay exponent, > 1/2
  int truncation = 0;       // linear M; 0 = auto max(n + 1000, 10^4)
  std::vector<double> ma_coeffs;
  double omega = 0.1, beta = 0.0, gamma = 0.0;  // volatility recursion

  static ScoreModel iid_gaussian();
  static ScoreModel linear_gaussian(double alpha, int M = 0);
  static ScoreModel ma_q(std::vector<double> coeffs);
  static ScoreModel multiplicative_vol(double omega, double beta, double gamma);

  void validate() const;
  bool is_linear_family() const { return kind != Kind::MultiplicativeVol; }

  // MA(inf) coefficients truncated at M, normalized to unit variance.
  std::vector<double> linear_coefficients(int M) const;
  int effective_truncation(int n) const;

  // Score autocorrelation r(h) of the (normalized) linear representation.
  double autocorrelation(int h, int n_hint = 10000) const;
};

struct ProcessSpec {
  enum class Kind { Kl, Arh1, Multiplicative };
  Kind kind = Kind::Kl;
  BasisSet basis;
  EigenProfile profile;   // KL eigenvalues (lambda tilde)
  ScoreModel scores;
  EigenProfile phi_profile;    // ARH(1) operator eigenvalues, sum < 1
  EigenProfile noise_profile;  // ARH(1) innovation covariance eigenvalues
  std::optional<GridFn> mean;

  int model_order() const { return profile.count; }
  Grid grid() const { return basis.grid; }
  void validate() const;
};

struct SamplePath {
  ProcessSpec spec;
  int n = 0;
  std::vector<GridFn> curves;
  std::optional<Matrix> true_scores;  // n x J_model
};

Matrix gen_scores(const ScoreModel& model, int n, int J, const SeedSpec& seed);

SamplePath gen_process(const ProcessSpec& spec, int n, int burnin, const SeedSpec& seed);

// Monte Carlo estimate of Omega_p(k): || eta_k - eta'_k ||_p where the
// coupled path replaces the time-0 innovation by an independent copy.
double coupling_distance(const ProcessSpec& spec, int k, int p, int reps, const SeedSpec& seed);

// Stationary ARH(1) score variances lambda_j = lambda^eps_j / (1 - (lambda^phi_j)^2).
std::vector<double> arh1_score_variances(const ProcessSpec& spec);

}  // namespace fts
