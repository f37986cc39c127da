#include "fts/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fts/simd.hpp"

namespace fts {

namespace {

constexpr double kDegenerateGapFactor = 1e-12;

bool spectrum_degenerate(const std::vector<double>& lambdas) {
  if (lambdas.size() < 2) return false;
  const double scale = std::abs(lambdas.front());
  for (std::size_t j = 0; j + 1 < lambdas.size(); ++j)
    if (lambdas[j] - lambdas[j + 1] <= kDegenerateGapFactor * scale) return true;
  return false;
}

}  // namespace

void jacobi_eigendecomposition(const KernelOp& K, std::vector<double>& values,
                               Matrix& vectors_rowwise) {
  const int T = K.grid.size;
  const double w = K.grid.weight();
  Matrix A(T, T);
  for (int i = 0; i < T; ++i)
    for (int j = 0; j < T; ++j) A(i, j) = 0.5 * w * (K.matrix(i, j) + K.matrix(j, i));

  Matrix V(T, T);
  for (int i = 0; i < T; ++i) V(i, i) = 1.0;

  double scale = 0.0;
  for (int i = 0; i < T; ++i) scale = std::max(scale, std::abs(A(i, i)));
  for (int i = 0; i < T; ++i)
    for (int j = i + 1; j < T; ++j) scale = std::max(scale, std::abs(A(i, j)));
  const double stop = std::max(scale * 1e-15, 1e-300);

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < T; ++i)
      for (int j = i + 1; j < T; ++j) off = std::max(off, std::abs(A(i, j)));
    if (off <= stop) break;

    for (int p = 0; p < T; ++p) {
      for (int q = p + 1; q < T; ++q) {
        const double apq = A(p, q);
        if (std::abs(apq) <= stop * 1e-2) continue;
        const double app = A(p, p), aqq = A(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        simd::rotate(c, s, A.row(p), A.row(q), T);
        for (int i = 0; i < T; ++i) {
          A(i, p) = A(p, i);
          A(i, q) = A(q, i);
        }
        A(p, p) = app - t * apq;
        A(q, q) = aqq + t * apq;
        A(p, q) = A(q, p) = 0.0;

        simd::rotate(c, s, V.row(p), V.row(q), T);
      }
    }
  }

  std::vector<int> order(T);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return A(a, a) > A(b, b); });

  values.resize(T);
  vectors_rowwise = Matrix(T, T);
  for (int r = 0; r < T; ++r) {
    const int src = order[r];
    values[r] = A(src, src);
    double sign = 1.0;
    for (int i = 0; i < T; ++i) {
      if (std::abs(V(src, i)) > 1e-12) {
        sign = V(src, i) > 0 ? 1.0 : -1.0;
        break;
      }
    }
    for (int i = 0; i < T; ++i) vectors_rowwise(r, i) = sign * V(src, i);
  }
}

EigenSystem eig_sym(const KernelOp& K, int J) {
  const int T = K.grid.size;
  if (J < 1 || J > T) throw validation_error("eig_sym: need 1 <= J <= T");
  if (!K.symmetric) {
    KernelOp copy = K;
    mark_symmetric(copy);  // throws if genuinely asymmetric
    return eig_sym(copy, J);
  }

  std::vector<double> values;
  Matrix vecs;
  jacobi_eigendecomposition(K, values, vecs);

  const double lam1 = std::abs(values.empty() ? 0.0 : values.front());
  if (!values.empty() && values.back() < -kPsdClipTol * std::max(lam1, 1.0))
    throw degeneracy_error("eig_sym: significantly negative eigenvalue " +
                           std::to_string(values.back()));

  EigenSystem sys;
  sys.grid = K.grid;
  sys.count = J;
  sys.lambdas.assign(values.begin(), values.begin() + J);
  const double root_T = std::sqrt(static_cast<double>(T));
  sys.efuns.reserve(J);
  for (int j = 0; j < J; ++j) {
    GridFn e(K.grid);
    for (int i = 0; i < T; ++i) e.values[i] = vecs(j, i) * root_T;
    sys.efuns.push_back(std::move(e));
  }
  sys.refresh_gap_quantities();
  return sys;
}

void EigenSystem::refresh_gap_quantities() {
  const int J = count;
  gaps.assign(J, std::numeric_limits<double>::quiet_NaN());
  caps.assign(J, std::numeric_limits<double>::quiet_NaN());
  if (J == 1) {
    gaps[0] = lambdas[0];
    caps[0] = 0.0;
    return;
  }
  const bool degenerate = spectrum_degenerate(lambdas);
  for (int j = 0; j < J; ++j) {
    double up = (j == 0) ? std::numeric_limits<double>::infinity() : lambdas[j - 1] - lambdas[j];
    double down = (j == J - 1) ? std::numeric_limits<double>::infinity() : lambdas[j] - lambdas[j + 1];
    gaps[j] = std::min(up, down);
    if (!degenerate) {
      double acc = 0.0;
      for (int k = 0; k < J; ++k) {
        if (k == j) continue;
        const double d = lambdas[j] - lambdas[k];
        acc += lambdas[j] * lambdas[k] / (d * d);
      }
      caps[j] = acc;
    }
  }
}

double operator_norm_diff(const KernelOp& A, const KernelOp& B) {
  if (A.grid != B.grid) throw validation_error("operator_norm_diff: grid mismatch");
  KernelOp D(A.grid);
  const int T = A.grid.size;
  for (int i = 0; i < T; ++i)
    for (int j = 0; j < T; ++j) D.matrix(i, j) = A.matrix(i, j) - B.matrix(i, j);
  std::vector<double> values;
  Matrix vecs;
  jacobi_eigendecomposition(D, values, vecs);
  double norm = 0.0;
  for (double v : values) norm = std::max(norm, std::abs(v));
  return norm;
}

EigenSystem align_signs(const EigenSystem& hat, const EigenSystem& reference) {
  if (hat.grid != reference.grid || hat.count != reference.count)
    throw validation_error("align_signs: systems not comparable");
  EigenSystem out = hat;
  for (int j = 0; j < hat.count; ++j) {
    const double ip = inner_product(hat.efuns[j], reference.efuns[j]);
    if (ip == 0.0)
      throw degeneracy_error("align_signs: <hat e_j, e_j> = 0 at j = " + std::to_string(j + 1));
    if (ip < 0.0)
      for (double& v : out.efuns[j].values) v = -v;
  }
  return out;
}

GapQuantities gap_quantities(const std::vector<double>& lambdas, int j) {
  const int J = static_cast<int>(lambdas.size());
  if (j < 1 || j > J) throw validation_error("gap_quantities: index out of range");
  for (int k = 0; k + 1 < J; ++k) {
    if (lambdas[k] <= lambdas[k + 1])
      throw validation_error("gap_quantities: sequence not strictly decreasing");
  }
  if (lambdas.back() <= 0.0) throw validation_error("gap_quantities: sequence must be positive");
  if (spectrum_degenerate(lambdas))
    throw degeneracy_error("gap_quantities: repeated eigenvalues (gap below threshold)");

  const int idx = j - 1;
  GapQuantities out{};
  double up = (idx == 0) ? std::numeric_limits<double>::infinity() : lambdas[idx - 1] - lambdas[idx];
  double down = (idx == J - 1) ? std::numeric_limits<double>::infinity()
                               : lambdas[idx] - lambdas[idx + 1];
  out.psi = (J == 1) ? lambdas[0] : std::min(up, down);
  double s1 = 0.0, s2 = 0.0;
  for (int k = 0; k < J; ++k) {
    if (k == idx) continue;
    const double d = lambdas[idx] - lambdas[k];
    s1 += lambdas[k] / std::abs(d);
    s2 += lambdas[idx] * lambdas[k] / (d * d);
  }
  out.S1 = s1;
  out.S2 = s2;
  out.Lambda = s2;
  return out;
}

DiagnosticBundle hall_error_bound(const EigenSystem& eig, int n, int Jplus) {
  if (Jplus < 1 || Jplus > eig.count)
    throw validation_error("hall_error_bound: Jplus out of range");
  if (n < 1) throw validation_error("hall_error_bound: need n >= 1");
  if (spectrum_degenerate(eig.lambdas))
    throw degeneracy_error("hall_error_bound: degenerate spectrum");

  DiagnosticBundle out;
  out.S1.resize(Jplus);
  out.S2.resize(Jplus);
  out.xi.resize(Jplus);
  out.s.resize(Jplus);
  double er = 0.0;
  for (int j = 1; j <= Jplus; ++j) {
    const GapQuantities gq = gap_quantities(eig.lambdas, j);
    out.S1[j - 1] = gq.S1;
    out.S2[j - 1] = gq.S2;
    // xi_j = inf_{k<j} (1 - lambda_k / lambda_j); empty inf at j = 1 is 0.
    double xi = 0.0;
    for (int k = 1; k < j; ++k)
      xi = std::min(xi, 1.0 - eig.lambdas[k - 1] / eig.lambdas[j - 1]);
    out.xi[j - 1] = xi;
    out.s[j - 1] = sup_norm(eig.efuns[j - 1]);
    const double term = std::pow(n, -1.5) / std::sqrt(1.0 - xi) /
                        (gq.psi * gq.psi * gq.psi) / std::sqrt(eig.lambdas[j - 1]) *
                        out.s[j - 1];
    er = std::max(er, term);
  }
  out.ER = er;
  return out;
}

bool PathwiseBoundCheck::all_ok() const {
  for (bool b : value_ok)
    if (!b) return false;
  for (bool b : fun_ok)
    if (!b) return false;
  return true;
}

PathwiseBoundCheck pathwise_bound_check(const KernelOp& hatK, const KernelOp& K,
                                        const EigenSystem& hat, const EigenSystem& pop) {
  if (hat.count != pop.count) throw validation_error("pathwise_bound_check: count mismatch");
  PathwiseBoundCheck out;
  out.delta_op_norm = operator_norm_diff(hatK, K);
  const int J = hat.count;
  out.value_ok.resize(J);
  out.fun_ok.resize(J);
  out.value_slack.resize(J);
  out.fun_slack.resize(J);
  const double two_sqrt2 = 2.0 * std::sqrt(2.0);
  // tiny additive slack absorbs quadrature round-off in the solver output
  const double eps = 1e-12 * std::max(1.0, std::abs(pop.lambdas.empty() ? 0.0 : pop.lambdas[0]));
  for (int j = 0; j < J; ++j) {
    const double dv = std::abs(hat.lambdas[j] - pop.lambdas[j]);
    out.value_slack[j] = out.delta_op_norm - dv;
    out.value_ok[j] = dv <= out.delta_op_norm + eps;
    GridFn diff = hat.efuns[j];
    add_scaled(diff, -1.0, pop.efuns[j]);
    const double dn = l2_norm(diff);
    const double bound = two_sqrt2 * out.delta_op_norm / pop.gaps[j];
    out.fun_slack[j] = bound - dn;
    out.fun_ok[j] = dn <= bound + eps;
  }
  return out;
}

}  // namespace fts
