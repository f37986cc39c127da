#include "fts/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fts/simd.hpp"

namespace fts {

ScorePanel empirical_scores(const SamplePath& sample, const EigenSystem& eig, int J,
                            bool center) {
  if (J < 1 || J > eig.count) throw validation_error("empirical_scores: J out of range");
  if (sample.spec.grid() != eig.grid) throw validation_error("empirical_scores: grid mismatch");
  const double lam1 = eig.lambdas[0];
  const double floor = kRidgeFloor * lam1;
  for (int j = 0; j < J; ++j) {
    if (!(eig.lambdas[j] > floor) || !(eig.lambdas[j] > 0.0))
      throw degeneracy_error("empirical_scores: eigenvalue below ridge floor; largest admissible J is " +
                             std::to_string(j));
  }

  GridFn mean(sample.spec.grid());
  if (center) {
    const double w = 1.0 / sample.n;
    for (const GridFn& x : sample.curves) add_scaled(mean, w, x);
  }

  ScorePanel panel;
  panel.n = sample.n;
  panel.J = J;
  panel.eta_hat = Matrix(sample.n, J);
  panel.lambdas_used.assign(eig.lambdas.begin(), eig.lambdas.begin() + J);
  std::vector<double> inv_root(J);
  for (int j = 0; j < J; ++j) inv_root[j] = 1.0 / std::sqrt(eig.lambdas[j]);
  GridFn xc(sample.spec.grid());
  for (int k = 0; k < sample.n; ++k) {
    xc = sample.curves[k];
    if (center) add_scaled(xc, -1.0, mean);
    for (int j = 0; j < J; ++j)
      panel.eta_hat(k, j) = inner_product(xc, eig.efuns[j]) * inv_root[j];
  }
  return panel;
}

LongRunVar longrun_var(const ScorePanel& panel, int L_b, WeightScheme w) {
  const int n = panel.n, J = panel.J;
  if (L_b < 0 || L_b > n - 2) throw validation_error("longrun_var: need 0 <= L_b <= n - 2");

  // u_{k,j} = eta_hat_{k,j}^2 - column mean
  Matrix u(n, J);
  std::vector<double> mean(J, 0.0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < J; ++j) {
      const double sq = panel.eta_hat(k, j) * panel.eta_hat(k, j);
      u(k, j) = sq;
      mean[j] += sq;
    }
  for (double& m : mean) m /= n;
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < J; ++j) u(k, j) -= mean[j];

  LongRunVar out;
  out.bandwidth = L_b;
  out.phi_hat.resize(L_b + 1);
  for (int lag = 0; lag <= L_b; ++lag) {
    Matrix phi(J, J);
    for (int i = 0; i < J; ++i)
      for (int j = 0; j < J; ++j) {
        double acc = 0.0;
        for (int k = 0; k + lag < n; ++k) acc += u(k, i) * u(k + lag, j);
        phi(i, j) = acc / n;
      }
    out.phi_hat[lag] = std::move(phi);
  }

  out.gamma_hat = Matrix(J, J);
  for (int i = 0; i < J; ++i)
    for (int j = 0; j < J; ++j) {
      double g = out.phi_hat[0](i, j);
      for (int lag = 1; lag <= L_b; ++lag)
        g += w.weight(lag, L_b) * (out.phi_hat[lag](i, j) + out.phi_hat[lag](j, i));
      out.gamma_hat(i, j) = g;
    }

  out.sigma_hat.resize(J);
  for (int j = 0; j < J; ++j) {
    const double v = out.gamma_hat(j, j);
    out.sigma_hat[j] = v > 0.0 ? std::sqrt(v) : 0.0;
    if (out.sigma_hat[j] < 1e-6)
      throw degeneracy_error("longrun_var: degenerate long-run variance at j = " +
                             std::to_string(j + 1));
  }
  out.rho_hat = Matrix(J, J);
  for (int i = 0; i < J; ++i)
    for (int j = 0; j < J; ++j)
      out.rho_hat(i, j) = out.gamma_hat(i, j) / (out.sigma_hat[i] * out.sigma_hat[j]);
  return out;
}

double t_stat(const std::vector<double>& lambda_hat, const std::vector<double>& lambda_ref,
              const std::vector<double>& sigma, int n, int Jplus) {
  if (Jplus < 2) throw validation_error("t_stat: need Jplus >= 2");
  if (static_cast<int>(lambda_hat.size()) < Jplus ||
      static_cast<int>(lambda_ref.size()) < Jplus || static_cast<int>(sigma.size()) < Jplus)
    throw validation_error("t_stat: sequences shorter than Jplus");
  for (int j = 0; j < Jplus; ++j) {
    if (!(lambda_ref[j] > 0.0)) throw validation_error("t_stat: reference eigenvalue <= 0");
    if (j > 0 && lambda_ref[j] >= lambda_ref[j - 1])
      throw validation_error("t_stat: reference eigenvalues must be strictly decreasing");
    if (!(sigma[j] > 0.0)) throw validation_error("t_stat: sigma <= 0");
  }
  double T = 0.0;
  for (int j = 0; j < Jplus; ++j)
    T = std::max(T, std::abs(lambda_hat[j] - lambda_ref[j]) / (sigma[j] * lambda_ref[j]));
  return std::sqrt(static_cast<double>(n)) * T;
}

GumbelNorm gumbel_norm(int m, double x, GumbelConstant constant) {
  if (m < 2) throw validation_error("gumbel_norm: need m >= 2");
  const double log_m = std::log(static_cast<double>(m));
  const double c = constant == GumbelConstant::Paper ? 4.0 * 3.14159265358979323846 - 4.0
                                                     : std::log(4.0 * 3.14159265358979323846);
  GumbelNorm g;
  g.a = std::sqrt(2.0 * log_m);
  g.b = g.a - (std::log(log_m) + c) / std::sqrt(8.0 * log_m);
  g.u = x / g.a + g.b;
  return g;
}

double gumbel_pvalue(double T, int m, GumbelConstant constant) {
  const GumbelNorm g = gumbel_norm(m, 0.0, constant);
  const double x = g.a * (T - g.b);
  return 1.0 - std::exp(-std::exp(-x));
}

namespace {

// Lower-triangular Cholesky factor; throws when a pivot is not positive.
Matrix cholesky(const Matrix& A) {
  const int J = static_cast<int>(A.rows());
  Matrix L(J, J);
  for (int i = 0; i < J; ++i) {
    for (int j = 0; j <= i; ++j) {
      double acc = A(i, j);
      for (int k = 0; k < j; ++k) acc -= L(i, k) * L(j, k);
      if (i == j) {
        if (!(acc > 0.0))
          throw degeneracy_error("gauss_max_sample: correlation matrix not positive definite");
        L(i, i) = std::sqrt(acc);
      } else {
        L(i, j) = acc / L(j, j);
      }
    }
  }
  return L;
}

}  // namespace

std::vector<double> gauss_max_sample(const Matrix& rho, int reps, const SeedSpec& seed) {
  const int J = static_cast<int>(rho.rows());
  if (J < 1 || rho.cols() != rho.rows()) throw validation_error("gauss_max_sample: bad matrix");
  if (reps < 1) throw validation_error("gauss_max_sample: need reps >= 1");
  Matrix A(J, J);
  for (int i = 0; i < J; ++i) {
    for (int j = 0; j < J; ++j) {
      if (std::abs(rho(i, j) - rho(j, i)) > kStructuralTol)
        throw validation_error("gauss_max_sample: correlation matrix not symmetric");
      A(i, j) = rho(i, j);
    }
    A(i, i) += kCorrRidge;
  }
  const Matrix L = cholesky(A);

  std::vector<double> out(reps);
  std::vector<double> g(J);
  for (int r = 0; r < reps; ++r) {
    Rng rng = seed.stream(stream_domain::kGaussMax, r);
    for (int j = 0; j < J; ++j) g[j] = rng.next_gaussian();
    double mx = 0.0;
    for (int i = 0; i < J; ++i) {
      double z = 0.0;
      for (int k = 0; k <= i; ++k) z += L(i, k) * g[k];
      mx = std::max(mx, std::abs(z));
    }
    out[r] = mx;
  }
  return out;
}

MaxDevResult simultaneous_band(const std::vector<double>& lambda_hat,
                               const std::vector<double>& sigma_hat, int n, int Jplus,
                               double level, const std::string& method, GumbelConstant constant,
                               const Matrix* rho, int reps, const SeedSpec& seed) {
  if (!(level > 0.0 && level < 1.0)) throw validation_error("simultaneous_band: level in (0,1)");
  if (Jplus < 2) throw validation_error("simultaneous_band: need Jplus >= 2");
  if (static_cast<int>(lambda_hat.size()) < Jplus || static_cast<int>(sigma_hat.size()) < Jplus)
    throw validation_error("simultaneous_band: sequences shorter than Jplus");
  for (int j = 0; j < Jplus; ++j)
    if (!(sigma_hat[j] > 0.0))
      throw degeneracy_error("simultaneous_band: degenerate sigma at j = " + std::to_string(j + 1));

  MaxDevResult res;
  res.Jplus = Jplus;
  res.method = method;
  if (method == "gumbel") {
    const double x_level = -std::log(-std::log(level));
    const GumbelNorm g = gumbel_norm(Jplus, x_level, constant);
    res.a_m = g.a;
    res.b_m = g.b;
    res.u = g.u;
  } else if (method == "gaussian-mc") {
    Matrix identity(Jplus, Jplus);
    for (int j = 0; j < Jplus; ++j) identity(j, j) = 1.0;
    const Matrix& corr = rho ? *rho : identity;
    if (static_cast<int>(corr.rows()) != Jplus)
      throw validation_error("simultaneous_band: correlation matrix size != Jplus");
    std::vector<double> sample = gauss_max_sample(corr, reps, seed);
    std::sort(sample.begin(), sample.end());
    const int idx = std::min(reps - 1, static_cast<int>(std::ceil(level * reps)) - 1);
    res.u = sample[std::max(idx, 0)];
    const GumbelNorm g = gumbel_norm(Jplus, 0.0, constant);
    res.a_m = g.a;
    res.b_m = g.b;
  } else {
    throw validation_error("simultaneous_band: unknown method " + method);
  }

  const double root_n = std::sqrt(static_cast<double>(n));
  res.band_lower.resize(Jplus);
  res.band_upper.resize(Jplus);
  res.upper_infinite.assign(Jplus, false);
  for (int j = 0; j < Jplus; ++j) {
    const double d = res.u * sigma_hat[j] / root_n;
    res.band_lower[j] = lambda_hat[j] / (1.0 + d);
    if (d >= 1.0) {
      res.upper_infinite[j] = true;
      res.band_upper[j] = std::numeric_limits<double>::infinity();
    } else {
      res.band_upper[j] = lambda_hat[j] / (1.0 - d);
    }
  }
  return res;
}

void BlockScheme::validate() const {
  if (K < 1 || L < 1 || K * L != n)
    throw validation_error("BlockScheme: need K, L >= 1 with K * L = n");
}

BlockCoupling block_coupled_sums(const BlockScheme& scheme, const ScoreModel& model, int d,
                                 const SeedSpec& seed) {
  scheme.validate();
  if (d < 1) throw validation_error("block_coupled_sums: need d >= 1");
  if (!model.is_linear_family())
    throw validation_error("block_coupled_sums: score model has no regenerable innovation history");
  const int n = scheme.n, K = scheme.K, L = scheme.L;

  const int M = model.effective_truncation(n);
  std::vector<double> a = model.linear_coefficients(M);
  std::reverse(a.begin(), a.end());  // reversed taps, matching gen_scores
  const int len = static_cast<int>(a.size());

  BlockCoupling out;
  out.S.assign(d, 0.0);
  out.S_box.assign(d, 0.0);
  out.V = Matrix(L, d);
  out.V_box = Matrix(L, d);

  std::vector<double> eps(n + len - 1);
  std::vector<double> eps_box(eps.size());
  for (int h = 0; h < d; ++h) {
    // identical stream layout to gen_scores, so S matches a panel generated
    // from the same seed
    Rng rng = seed.stream(stream_domain::kScores, h);
    for (double& e : eps) e = rng.next_gaussian();
    for (int l = 0; l < L; ++l) {
      double v = 0.0;
      for (int k = l * K; k < (l + 1) * K; ++k) {
        const double eta = simd::dot(a.data(), eps.data() + k, len);
        v += eta * eta - 1.0;
      }
      out.V(l, h) = v;
      out.S[h] += v;

      // innovation at time t lives at index t + len - 1; refresh everything
      // before the block start time l*K with a fresh independent history
      const int cut = l * K + len - 1;
      eps_box = eps;
      Rng fresh = seed.stream(stream_domain::kBlockRefresh,
                              static_cast<std::uint64_t>(l) * d + h);
      for (int i = 0; i < cut; ++i) eps_box[i] = fresh.next_gaussian();
      double vb = 0.0;
      for (int k = l * K; k < (l + 1) * K; ++k) {
        const double eta = simd::dot(a.data(), eps_box.data() + k, len);
        vb += eta * eta - 1.0;
      }
      out.V_box(l, h) = vb;
      out.S_box[h] += vb;
    }
  }
  return out;
}

}  // namespace fts
