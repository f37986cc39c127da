#pragma once

#include <utility>
#include <vector>

#include "fts/spectral.hpp"

// First-order perturbation machinery for empirical eigenpairs: the
// coefficient matrix I_{i,j} = <(D_hat - D)e_i, e_j>, the exact algebraic
// decomposition of (lambda_j - lambda_k)<e_k, e_hat_j - e_j>, and the
// residuals of the eigenvalue / eigenfunction / squared-norm / SVD
// right-function expansions measured on their natural scales.

namespace fts {

struct ExpansionReport {
  int J = 0;        // indices reported
  double m = 0.0;   // effective sample size (n, or n/b for long-run input)
  std::vector<double> lambda_hat;
  std::vector<double> lambda_pop;
  std::vector<double> I_jj;
  std::vector<double> R1;  // (lambda_hat_j - lambda_j - I_jj) / lambda_j
  std::vector<double> R2;  // eigenfunction expansion residual / sqrt(Lambda_j)
  std::vector<double> R3;  // squared-norm expansion residual / Lambda_j
  std::vector<double> RF;  // SVD f residual (NaN when not applicable)
};

// I(i,j) = <(hatK - popK)(e_i), e_j> over the population eigenfunctions.
Matrix I_matrix(const KernelOp& hatK, const KernelOp& popK, const EigenSystem& pop);

struct PerturbationTerms {
  double lhs = 0.0;  // (lambda_j - lambda_k) <e_k, e_hat_j - e_j>
  double I = 0.0;
  double II = 0.0;   // <(hatK - popK)e_k, e_hat_j - e_j>
  double III = 0.0;  // -(lambda_hat_j - lambda_j) <e_k, e_hat_j - e_j>
  double residual = 0.0;  // lhs - (I + II + III); zero in exact arithmetic
};

// Indices are 1-based; hat must be sign-aligned against pop.
PerturbationTerms perturbation_identity(const EigenSystem& hat, const EigenSystem& pop,
                                        const KernelOp& hatK, const KernelOp& popK, int k, int j);

std::vector<double> eigval_residual(const EigenSystem& hat, const EigenSystem& pop,
                                    const Matrix& I);

// (R2_j, R3_j) for 1-based j; the correction sum runs over the full
// population spectrum held by pop.
std::pair<double, double> eigfun_residual(const EigenSystem& hat, const EigenSystem& pop,
                                          const Matrix& I, int j);

// RF_j for the right singular function f_hat_j of hatCh, defined through
// hatCh(e_hat_j) = sqrt(lambda_hat_j) f_hat_j, where hat/pop are the
// eigensystems of the symmetrized operators. 1-based j.
double svd_f_residual(const KernelOp& hatCh, const KernelOp& popCh, const EigenSystem& hat,
                      const EigenSystem& pop, int j);

// Gram eta^C_{i,j} = (1/n) sum_k s_{k,i}s_{k,j} and remainder
// eta^R_{i,j} = (column mean i)(column mean j).
std::pair<Matrix, Matrix> score_gram(const Matrix& scores);

// Full report: eigendecomposes hatK to J pairs, aligns signs against pop,
// and evaluates R1-R3. RF is filled with NaN (lag-specific, computed via
// svd_f_residual where a lag operator is in play).
ExpansionReport expansion_report(const KernelOp& hatK, const KernelOp& popK,
                                 const EigenSystem& pop, int J, double m);

}  // namespace fts
