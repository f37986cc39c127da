#include "fts/expansion.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace fts {

namespace {

KernelOp kernel_difference(const KernelOp& hatK, const KernelOp& popK) {
  if (hatK.grid != popK.grid) throw validation_error("expansion: kernel grid mismatch");
  KernelOp D(hatK.grid);
  const int T = hatK.grid.size;
  for (int i = 0; i < T; ++i)
    for (int s = 0; s < T; ++s) D.matrix(i, s) = hatK.matrix(i, s) - popK.matrix(i, s);
  return D;
}

void check_gap(const EigenSystem& pop, int a, int b) {
  const double thresh = 1e-12 * std::abs(pop.lambdas[0]);
  if (std::abs(pop.lambdas[a] - pop.lambdas[b]) <= thresh)
    throw degeneracy_error("expansion: eigenvalue gap below degeneracy threshold");
}

}  // namespace

Matrix I_matrix(const KernelOp& hatK, const KernelOp& popK, const EigenSystem& pop) {
  const KernelOp D = kernel_difference(hatK, popK);
  const int J = pop.count;
  Matrix I(J, J);
  for (int i = 0; i < J; ++i) {
    const GridFn g = apply_kernel(D, pop.efuns[i]);
    for (int j = 0; j < J; ++j) I(i, j) = inner_product(g, pop.efuns[j]);
  }
  return I;
}

PerturbationTerms perturbation_identity(const EigenSystem& hat, const EigenSystem& pop,
                                        const KernelOp& hatK, const KernelOp& popK, int k, int j) {
  if (k == j) throw validation_error("perturbation_identity: need k != j");
  if (k < 1 || j < 1 || j > hat.count || k > pop.count || j > pop.count)
    throw validation_error("perturbation_identity: index out of range");
  check_gap(pop, k - 1, j - 1);

  const KernelOp D = kernel_difference(hatK, popK);
  GridFn diff = hat.efuns[j - 1];
  add_scaled(diff, -1.0, pop.efuns[j - 1]);

  PerturbationTerms out;
  const double proj = inner_product(pop.efuns[k - 1], diff);
  const GridFn Dek = apply_kernel(D, pop.efuns[k - 1]);
  out.lhs = (pop.lambdas[j - 1] - pop.lambdas[k - 1]) * proj;
  out.I = inner_product(Dek, pop.efuns[j - 1]);
  out.II = inner_product(Dek, diff);
  out.III = -(hat.lambdas[j - 1] - pop.lambdas[j - 1]) * proj;
  out.residual = out.lhs - (out.I + out.II + out.III);
  return out;
}

std::vector<double> eigval_residual(const EigenSystem& hat, const EigenSystem& pop,
                                    const Matrix& I) {
  const int J = hat.count;
  if (J > pop.count) throw validation_error("eigval_residual: hat system larger than population");
  std::vector<double> R1(J);
  for (int j = 0; j < J; ++j) {
    if (pop.lambdas[j] <= 0.0)
      throw validation_error("eigval_residual: population eigenvalue must be positive");
    R1[j] = (hat.lambdas[j] - pop.lambdas[j] - I(j, j)) / pop.lambdas[j];
  }
  return R1;
}

std::pair<double, double> eigfun_residual(const EigenSystem& hat, const EigenSystem& pop,
                                          const Matrix& I, int j) {
  if (j < 1 || j > hat.count) throw validation_error("eigfun_residual: index out of range");
  const int idx = j - 1;
  const GapQuantities gq = gap_quantities(pop.lambdas, j);  // throws on degeneracy

  GridFn diff = hat.efuns[idx];
  add_scaled(diff, -1.0, pop.efuns[idx]);
  const double norm2 = inner_product(diff, diff);

  GridFn res = diff;
  add_scaled(res, 0.5 * norm2, pop.efuns[idx]);
  double sum_sq = 0.0;
  for (int k = 0; k < pop.count; ++k) {
    if (k == idx) continue;
    const double gap = pop.lambdas[idx] - pop.lambdas[k];
    add_scaled(res, -I(k, idx) / gap, pop.efuns[k]);
    sum_sq += I(k, idx) * I(k, idx) / (gap * gap);
  }

  const double R2 = l2_norm(res) / std::sqrt(gq.Lambda);
  const double R3 = (norm2 - sum_sq) / gq.Lambda;
  return {R2, R3};
}

double svd_f_residual(const KernelOp& hatCh, const KernelOp& popCh, const EigenSystem& hat,
                      const EigenSystem& pop, int j) {
  if (j < 1 || j > hat.count || j > pop.count)
    throw validation_error("svd_f_residual: index out of range");
  const int idx = j - 1;
  const double floor = kRidgeFloor * hat.lambdas[0];
  if (!(hat.lambdas[idx] > floor))
    throw degeneracy_error("svd_f_residual: eigenvalue below ridge floor at j = " +
                           std::to_string(j));
  const double lam_hat = hat.lambdas[idx];
  const double lam = pop.lambdas[idx];
  if (lam <= 0.0) throw validation_error("svd_f_residual: population eigenvalue must be positive");
  const double root_lam = std::sqrt(lam);

  GridFn f_hat = apply_kernel(hatCh, hat.efuns[idx]);
  for (double& v : f_hat.values) v /= std::sqrt(lam_hat);
  GridFn f = apply_kernel(popCh, pop.efuns[idx]);
  for (double& v : f.values) v /= root_lam;
  if (inner_product(f_hat, f) < 0.0)
    for (double& v : f_hat.values) v = -v;

  // f_hat - f - (lam_hat - lam) f / (2 lam) - [C_h(e_hat - e) + (C_hat_h - C_h)e] / sqrt(lam)
  GridFn res = f_hat;
  add_scaled(res, -1.0, f);
  add_scaled(res, -(lam_hat - lam) / (2.0 * lam), f);
  GridFn ediff = hat.efuns[idx];
  add_scaled(ediff, -1.0, pop.efuns[idx]);
  add_scaled(res, -1.0 / root_lam, apply_kernel(popCh, ediff));
  const KernelOp Dh = kernel_difference(hatCh, popCh);
  add_scaled(res, -1.0 / root_lam, apply_kernel(Dh, pop.efuns[idx]));
  return l2_norm(res);
}

std::pair<Matrix, Matrix> score_gram(const Matrix& scores) {
  const int n = static_cast<int>(scores.rows());
  const int J = static_cast<int>(scores.cols());
  if (n < 1) throw validation_error("score_gram: need n >= 1");
  Matrix gram(J, J);
  Matrix rem(J, J);
  std::vector<double> mean(J, 0.0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < J; ++j) mean[j] += scores(k, j);
  for (double& m : mean) m /= n;
  for (int i = 0; i < J; ++i) {
    for (int j = i; j < J; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += scores(k, i) * scores(k, j);
      gram(i, j) = gram(j, i) = acc / n;
      rem(i, j) = rem(j, i) = mean[i] * mean[j];
    }
  }
  return {std::move(gram), std::move(rem)};
}

ExpansionReport expansion_report(const KernelOp& hatK, const KernelOp& popK,
                                 const EigenSystem& pop, int J, double m) {
  if (J < 1 || J > pop.count) throw validation_error("expansion_report: J out of range");
  EigenSystem hat = eig_sym(hatK, J);
  for (int j = 0; j < J; ++j) {
    const double ip = inner_product(hat.efuns[j], pop.efuns[j]);
    if (ip == 0.0) throw degeneracy_error("expansion_report: ambiguous eigenfunction sign");
    if (ip < 0.0)
      for (double& v : hat.efuns[j].values) v = -v;
  }

  const Matrix I = I_matrix(hatK, popK, pop);
  ExpansionReport rep;
  rep.J = J;
  rep.m = m;
  rep.lambda_hat.assign(hat.lambdas.begin(), hat.lambdas.end());
  rep.lambda_pop.assign(pop.lambdas.begin(), pop.lambdas.begin() + J);
  rep.R1 = eigval_residual(hat, pop, I);
  rep.I_jj.resize(J);
  rep.R2.resize(J);
  rep.R3.resize(J);
  rep.RF.assign(J, std::numeric_limits<double>::quiet_NaN());
  for (int j = 1; j <= J; ++j) {
    rep.I_jj[j - 1] = I(j - 1, j - 1);
    const auto [r2, r3] = eigfun_residual(hat, pop, I, j);
    rep.R2[j - 1] = r2;
    rep.R3[j - 1] = r3;
  }
  return rep;
}

}  // namespace fts
