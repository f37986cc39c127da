#pragma once

#include <vector>

#include "fts/grid.hpp"

// Symmetric eigensolver on discretized kernels plus the spectral-gap
// machinery: gap quantities psi_j / Lambda_j, sign alignment, pathwise
// perturbation bounds and the classical error-term diagnostic.

namespace fts {

struct EigenSystem {
  Grid grid;
  int count = 0;
  std::vector<double> lambdas;   // strictly descending
  std::vector<GridFn> efuns;     // unit discrete-L2 norm
  std::vector<double> gaps;      // psi_j
  std::vector<double> caps;      // Lambda_j

  // Recomputes gaps/caps from the stored lambdas.
  void refresh_gap_quantities();
};

struct GapQuantities {
  double psi;      // min neighbor gap
  double Lambda;   // sum_{k != j} lambda_j lambda_k / (lambda_j - lambda_k)^2
  double S1;       // sum_{k != j} lambda_k / |lambda_j - lambda_k|
  double S2;       // same as Lambda (kept as the raw sum for diagnostics)
};

struct DiagnosticBundle {
  std::vector<double> S1, S2;
  std::vector<double> xi;  // inf_{k<j} (1 - lambda_k/lambda_j), xi_1 = 0
  std::vector<double> s;   // sup-norms of eigenfunctions
  double ER = 0.0;
};

struct PathwiseBoundCheck {
  double delta_op_norm = 0.0;  // ||hatK - K|| operator norm
  std::vector<bool> value_ok;  // |hat lambda_j - lambda_j| <= ||Delta||
  std::vector<bool> fun_ok;    // ||hat e_j - e_j|| <= 2 sqrt(2) ||Delta|| / psi_j
  std::vector<double> value_slack;
  std::vector<double> fun_slack;
  bool all_ok() const;
};

// Full symmetric eigendecomposition of the quadrature-scaled kernel by
// cyclic Jacobi. Deterministic: fixed sweep order, sign-canonical
// eigenvectors (first coordinate with |v| > 1e-12 made positive), values
// sorted descending. Negative eigenvalues are allowed here; the public
// eig_sym contract rejects them.
void jacobi_eigendecomposition(const KernelOp& K, std::vector<double>& values,
                               Matrix& vectors_rowwise);

EigenSystem eig_sym(const KernelOp& K, int J);

// Largest |eigenvalue| of the symmetrized difference.
double operator_norm_diff(const KernelOp& A, const KernelOp& B);

EigenSystem align_signs(const EigenSystem& hat, const EigenSystem& reference);

GapQuantities gap_quantities(const std::vector<double>& lambdas, int j);  // j is 1-based

DiagnosticBundle hall_error_bound(const EigenSystem& eig, int n, int Jplus);

PathwiseBoundCheck pathwise_bound_check(const KernelOp& hatK, const KernelOp& K,
                                        const EigenSystem& hat, const EigenSystem& pop);

}  // namespace fts
