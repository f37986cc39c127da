#include "fts/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fts/spectral.hpp"

namespace fts {

namespace {

GridFn sample_mean(const SamplePath& sample) {
  GridFn mean(sample.spec.grid());
  const double w = 1.0 / sample.n;
  for (const GridFn& x : sample.curves) add_scaled(mean, w, x);
  return mean;
}

// Curves with the sample mean removed (or copies, when centering is off).
std::vector<GridFn> prepared_curves(const SamplePath& sample, bool center) {
  std::vector<GridFn> out = sample.curves;
  if (center && sample.n > 0) {
    const GridFn mean = sample_mean(sample);
    for (GridFn& x : out) add_scaled(x, -1.0, mean);
  }
  return out;
}

KernelOp lag_kernel(const std::vector<GridFn>& xc, int h, Grid grid) {
  const int n = static_cast<int>(xc.size());
  KernelOp K(grid);
  const double w = 1.0 / (n - h);
  for (int k = h; k < n; ++k) add_outer(K, w, xc[k - h], xc[k]);
  return K;
}

}  // namespace

OperatorEstimate cov_op(const SamplePath& sample, bool center) {
  if (sample.n < 1) throw validation_error("cov_op: need n >= 1");
  const std::vector<GridFn> xc = prepared_curves(sample, center);
  OperatorEstimate est;
  est.op = lag_kernel(xc, 0, sample.spec.grid());
  mark_symmetric(est.op);
  est.kind = OperatorEstimate::Kind::Cov;
  est.n = sample.n;
  est.centered = center;
  return est;
}

OperatorEstimate lag_op(const SamplePath& sample, int h, bool center) {
  const int ah = h < 0 ? -h : h;
  if (ah > sample.n - 1) throw validation_error("lag_op: need |h| <= n - 1");
  const std::vector<GridFn> xc = prepared_curves(sample, center);
  OperatorEstimate est;
  KernelOp K = lag_kernel(xc, ah, sample.spec.grid());
  est.op = h < 0 ? transpose(K) : std::move(K);
  if (h == 0) mark_symmetric(est.op);
  est.kind = OperatorEstimate::Kind::Lag;
  est.h = h;
  est.n = sample.n;
  est.centered = center;
  return est;
}

OperatorEstimate sym_lag_op(const SamplePath& sample, int h) {
  if (h < 1 || h > sample.n - 1) throw validation_error("sym_lag_op: need 1 <= h <= n - 1");
  const Grid grid = sample.spec.grid();
  const int m = sample.n - h;
  const std::vector<GridFn> xc = prepared_curves(sample, true);

  // Kernel (1/m^2) sum_{k,l} <X_{l+h}c, X_{k+h}c> X_kc(r) X_lc(s), built via
  // the lead-curve Gram matrix: O(m^2 T + m T^2) instead of O(m^2 T^2).
  Matrix gram(m, m);
  for (int l = 0; l < m; ++l) {
    for (int k = 0; k <= l; ++k) {
      const double ip = inner_product(xc[l + h], xc[k + h]);
      gram(l, k) = ip;
      gram(k, l) = ip;
    }
  }
  KernelOp K(grid);
  const double w = 1.0 / (static_cast<double>(m) * m);
  GridFn acc(grid);
  for (int l = 0; l < m; ++l) {
    std::fill(acc.values.begin(), acc.values.end(), 0.0);
    for (int k = 0; k < m; ++k) add_scaled(acc, gram(l, k), xc[k]);
    add_outer(K, w, acc, xc[l]);
  }

  // PSD repair: quadrature round-off can leave eigenvalues slightly below
  // zero; anything beyond the tolerance band indicates a real defect.
  std::vector<double> values;
  Matrix vecs;
  jacobi_eigendecomposition(K, values, vecs);
  const double lam_max = values.empty() ? 0.0 : std::max(values.front(), 0.0);
  const int T = grid.size;
  const double root_T = std::sqrt(static_cast<double>(T));
  for (int j = T - 1; j >= 0; --j) {
    if (values[j] >= 0.0) break;
    if (values[j] < -kPsdClipTol * std::max(lam_max, 1e-300))
      throw degeneracy_error("sym_lag_op: eigenvalue " + std::to_string(values[j]) +
                             " below PSD tolerance");
    GridFn f(grid);
    for (int i = 0; i < T; ++i) f.values[i] = vecs(j, i) * root_T;
    add_outer(K, -values[j], f, f);
  }
  mark_symmetric(K);

  OperatorEstimate est;
  est.op = std::move(K);
  est.kind = OperatorEstimate::Kind::SymLag;
  est.h = h;
  est.n = sample.n;
  est.centered = true;
  return est;
}

OperatorEstimate longrun_op(const SamplePath& sample, int b, WeightScheme w, bool center) {
  if (b < 0 || b > sample.n - 2) throw validation_error("longrun_op: need 0 <= b <= n - 2");
  const Grid grid = sample.spec.grid();
  const int T = grid.size;
  const std::vector<GridFn> xc = prepared_curves(sample, center);
  KernelOp G = lag_kernel(xc, 0, grid);
  for (int h = 1; h <= b; ++h) {
    const double wh = w.weight(h, b);
    const KernelOp Kh = lag_kernel(xc, h, grid);
    for (int i = 0; i < T; ++i)
      for (int s = 0; s < T; ++s) G.matrix(i, s) += wh * (Kh.matrix(i, s) + Kh.matrix(s, i));
  }
  mark_symmetric(G);
  OperatorEstimate est;
  est.op = std::move(G);
  est.kind = OperatorEstimate::Kind::LongRun;
  est.b = b;
  est.weights = w;
  est.n = sample.n;
  est.centered = center;
  return est;
}

namespace {

// Stationary score variances and lag correlations for specs with a closed
// form: KL with linear-family scores, or the diagonal ARH(1) recursion.
void closed_form_scores(const ProcessSpec& spec, std::vector<double>& lambdas,
                        std::vector<std::vector<double>>* correlations, int max_lag) {
  if (spec.kind == ProcessSpec::Kind::Multiplicative || !spec.scores.is_linear_family())
    throw validation_error("population_operator: no closed form for multiplicative models");
  const int J = spec.model_order();
  if (spec.kind == ProcessSpec::Kind::Arh1) {
    lambdas = arh1_score_variances(spec);
    if (correlations) {
      const std::vector<double> phi = spec.phi_profile.lambdas();
      correlations->assign(J, std::vector<double>(max_lag + 1, 1.0));
      for (int j = 0; j < J; ++j)
        for (int h = 1; h <= max_lag; ++h) (*correlations)[j][h] = std::pow(phi[j], h);
    }
  } else {
    lambdas = spec.profile.lambdas();
    if (correlations) {
      std::vector<double> r(max_lag + 1);
      for (int h = 0; h <= max_lag; ++h) r[h] = spec.scores.autocorrelation(h);
      correlations->assign(J, r);
    }
  }
}

}  // namespace

PopulationOperator population_operator(const ProcessSpec& spec, PopulationOperator::Kind kind,
                                       int h_or_b) {
  spec.validate();
  const int J = spec.model_order();
  const int max_lag = kind == PopulationOperator::Kind::Cov ? 0 : std::abs(h_or_b);
  std::vector<double> lam;
  std::vector<std::vector<double>> r;
  closed_form_scores(spec, lam, &r, max_lag);

  PopulationOperator out;
  out.kind = kind;
  out.lambdas.resize(J);
  out.varphi.assign(J, 1.0);
  for (int j = 0; j < J; ++j) {
    switch (kind) {
      case PopulationOperator::Kind::Cov:
        out.varphi[j] = 1.0;
        break;
      case PopulationOperator::Kind::Lag:
        out.varphi[j] = r[j][max_lag];
        break;
      case PopulationOperator::Kind::LongRun: {
        double phi_b = 1.0;
        for (int h = 1; h <= max_lag; ++h) phi_b += 2.0 * r[j][h];
        out.varphi[j] = phi_b;
        break;
      }
    }
    out.lambdas[j] = lam[j] * out.varphi[j];
  }

  KernelOp K(spec.grid());
  for (int j = 0; j < J; ++j)
    add_outer(K, out.lambdas[j], spec.basis.functions[j], spec.basis.functions[j]);
  mark_symmetric(K);
  out.op = std::move(K);
  return out;
}

PopulationOperator population_sym_lag(const ProcessSpec& spec, int h) {
  if (h < 1) throw validation_error("population_sym_lag: need h >= 1");
  const int J = spec.model_order();
  std::vector<double> lam;
  std::vector<std::vector<double>> r;
  closed_form_scores(spec, lam, &r, h);

  PopulationOperator out;
  out.kind = PopulationOperator::Kind::Lag;
  out.lambdas.resize(J);
  out.varphi.resize(J);
  for (int j = 0; j < J; ++j) {
    out.varphi[j] = r[j][h] * r[j][h];
    out.lambdas[j] = lam[j] * lam[j] * out.varphi[j];
  }
  KernelOp K(spec.grid());
  for (int j = 0; j < J; ++j)
    add_outer(K, out.lambdas[j], spec.basis.functions[j], spec.basis.functions[j]);
  mark_symmetric(K);
  out.op = std::move(K);
  return out;
}

KernelOp flr_estimate(const SamplePath& X, const SamplePath& Y, int b, bool center) {
  if (X.spec.grid() != Y.spec.grid()) throw validation_error("flr_estimate: grid mismatch");
  if (X.n != Y.n) throw validation_error("flr_estimate: sample sizes differ");
  const int T = Y.spec.grid().size;
  if (b < 1 || b > T) throw validation_error("flr_estimate: need 1 <= b <= grid size");

  const OperatorEstimate covY = cov_op(Y, center);
  const EigenSystem eig = eig_sym(covY.op, b);
  const double floor = kRidgeFloor * eig.lambdas[0];
  for (int j = 0; j < b; ++j) {
    if (!(eig.lambdas[j] > floor)) {
      throw degeneracy_error("flr_estimate: eigenvalue " + std::to_string(j + 1) +
                             " below ridge floor; largest admissible b is " + std::to_string(j));
    }
  }

  const Grid grid = Y.spec.grid();
  const std::vector<GridFn> yc = prepared_curves(Y, center);
  const std::vector<GridFn> xc = prepared_curves(X, center);
  KernelOp Phi(grid);
  const double inv_n = 1.0 / Y.n;
  GridFn g(grid);
  for (int j = 0; j < b; ++j) {
    std::fill(g.values.begin(), g.values.end(), 0.0);
    for (int k = 0; k < Y.n; ++k) {
      const double score = inner_product(yc[k], eig.efuns[j]);
      add_scaled(g, inv_n * score / eig.lambdas[j], xc[k]);
    }
    add_outer(Phi, 1.0, g, eig.efuns[j]);
  }
  return Phi;
}

}  // namespace fts
