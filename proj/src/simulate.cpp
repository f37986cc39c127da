#include "fts/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fts/simd.hpp"

namespace fts {

namespace {

constexpr std::uint64_t kDomScores = stream_domain::kScores;
constexpr std::uint64_t kDomArh1 = stream_domain::kArh1;
constexpr std::uint64_t kDomMult = stream_domain::kMult;
constexpr std::uint64_t kDomCoupling = stream_domain::kCoupling;

}  // namespace

EigenProfile EigenProfile::polynomial(double r, int J) {
  EigenProfile p;
  p.kind = Kind::Polynomial;
  p.rate = r;
  p.count = J;
  p.validate();
  return p;
}

EigenProfile EigenProfile::exponential(double rho, int J) {
  EigenProfile p;
  p.kind = Kind::Exponential;
  p.rate = rho;
  p.count = J;
  p.validate();
  return p;
}

EigenProfile EigenProfile::explicit_list(std::vector<double> v) {
  EigenProfile p;
  p.kind = Kind::Explicit;
  p.values = std::move(v);
  p.count = static_cast<int>(p.values.size());
  p.validate();
  return p;
}

void EigenProfile::validate() const {
  if (count < 1) throw validation_error("EigenProfile: empty profile");
  switch (kind) {
    case Kind::Polynomial:
      if (rate <= 1.0) throw validation_error("EigenProfile: polynomial needs r > 1");
      break;
    case Kind::Exponential:
      if (rate <= 0.0 || rate >= 1.0)
        throw validation_error("EigenProfile: exponential needs 0 < rho < 1");
      break;
    case Kind::Explicit: {
      if (values.empty()) throw validation_error("EigenProfile: empty explicit list");
      for (std::size_t j = 0; j < values.size(); ++j) {
        if (values[j] <= 0.0) throw validation_error("EigenProfile: values must be positive");
        if (j > 0 && values[j] >= values[j - 1])
          throw validation_error("EigenProfile: values must be strictly decreasing");
      }
      break;
    }
  }
}

std::vector<double> EigenProfile::lambdas() const {
  std::vector<double> out(count);
  for (int j = 1; j <= count; ++j) {
    switch (kind) {
      case Kind::Polynomial:
        out[j - 1] = std::pow(static_cast<double>(j), -rate);
        break;
      case Kind::Exponential:
        out[j - 1] = std::pow(rate, j);
        break;
      case Kind::Explicit:
        out[j - 1] = values[j - 1];
        break;
    }
  }
  return out;
}

ScoreModel ScoreModel::iid_gaussian() { return ScoreModel{}; }

ScoreModel ScoreModel::linear_gaussian(double alpha, int M) {
  ScoreModel m;
  m.kind = Kind::LinearGaussian;
  m.alpha = alpha;
  m.truncation = M;
  m.validate();
  return m;
}

ScoreModel ScoreModel::ma_q(std::vector<double> coeffs) {
  ScoreModel m;
  m.kind = Kind::MaQ;
  m.ma_coeffs = std::move(coeffs);
  m.validate();
  return m;
}

ScoreModel ScoreModel::multiplicative_vol(double omega, double beta, double gamma) {
  ScoreModel m;
  m.kind = Kind::MultiplicativeVol;
  m.omega = omega;
  m.beta = beta;
  m.gamma = gamma;
  m.validate();
  return m;
}

void ScoreModel::validate() const {
  switch (kind) {
    case Kind::IidGaussian:
      break;
    case Kind::LinearGaussian:
      if (alpha <= 0.5) throw validation_error("ScoreModel: linear needs alpha > 1/2");
      break;
    case Kind::MaQ: {
      if (ma_coeffs.empty()) throw validation_error("ScoreModel: empty MA coefficients");
      double s2 = 0.0;
      for (double a : ma_coeffs) s2 += a * a;
      if (s2 <= 0.0) throw validation_error("ScoreModel: MA coefficients all zero");
      break;
    }
    case Kind::MultiplicativeVol:
      if (omega <= 0.0) throw validation_error("ScoreModel: need omega > 0");
      if (beta < 0.0 || gamma < 0.0 || beta + gamma >= 1.0)
        throw validation_error("ScoreModel: volatility recursion not stationary (beta+gamma >= 1)");
      break;
  }
}

int ScoreModel::effective_truncation(int n) const {
  switch (kind) {
    case Kind::IidGaussian:
    case Kind::MultiplicativeVol:
      return 0;
    case Kind::MaQ:
      return static_cast<int>(ma_coeffs.size()) - 1;
    case Kind::LinearGaussian:
      return truncation > 0 ? truncation : std::max(n + 1000, 10000);
  }
  return 0;
}

std::vector<double> ScoreModel::linear_coefficients(int M) const {
  std::vector<double> a;
  switch (kind) {
    case Kind::IidGaussian:
    case Kind::MultiplicativeVol:
      a = {1.0};
      break;
    case Kind::MaQ:
      a = ma_coeffs;
      break;
    case Kind::LinearGaussian: {
      a.resize(M + 1);
      for (int i = 0; i <= M; ++i) a[i] = std::pow(static_cast<double>(i + 1), -alpha);
      break;
    }
  }
  double s2 = 0.0;
  for (double c : a) s2 += c * c;
  const double norm = 1.0 / std::sqrt(s2);
  for (double& c : a) c *= norm;
  return a;
}

double ScoreModel::autocorrelation(int h, int n_hint) const {
  if (h < 0) h = -h;
  const int M = effective_truncation(n_hint);
  const std::vector<double> a = linear_coefficients(M);
  if (h >= static_cast<int>(a.size())) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i + h < a.size(); ++i) acc += a[i] * a[i + h];
  return acc;  // coefficients are unit-variance normalized
}

void ProcessSpec::validate() const {
  profile.validate();
  scores.validate();
  if (profile.count > basis.count)
    throw validation_error("ProcessSpec: profile truncation exceeds basis size");
  if (mean && mean->grid != basis.grid)
    throw validation_error("ProcessSpec: mean on wrong grid");
  if (kind == Kind::Arh1) {
    phi_profile.validate();
    noise_profile.validate();
    const std::vector<double> phi = phi_profile.lambdas();
    double sum = 0.0;
    for (double p : phi) sum += p;
    if (sum >= 1.0) throw validation_error("ProcessSpec: ARH(1) operator not contractive");
    if (phi_profile.count != profile.count || noise_profile.count != profile.count)
      throw validation_error("ProcessSpec: ARH(1) profile sizes must match J_model");
  }
  if (kind == Kind::Multiplicative && scores.kind != ScoreModel::Kind::MultiplicativeVol)
    throw validation_error("ProcessSpec: multiplicative process needs multiplicative_vol scores");
}

Matrix gen_scores(const ScoreModel& model, int n, int J, const SeedSpec& seed) {
  if (n < 1 || J < 1) throw validation_error("gen_scores: need n, J >= 1");
  model.validate();
  Matrix scores(n, J);

  if (model.kind == ScoreModel::Kind::MultiplicativeVol) {
    const int burnin = 500;
    const double stat_var = model.omega / (1.0 - model.beta - model.gamma);
    for (int j = 0; j < J; ++j) {
      Rng rng = seed.stream(kDomScores, j);
      double sigma2 = stat_var;
      double eta_prev2 = stat_var;
      for (int k = -burnin; k < n; ++k) {
        sigma2 = model.omega + model.beta * sigma2 + model.gamma * eta_prev2;
        const double eta = std::sqrt(sigma2) * rng.next_gaussian();
        eta_prev2 = eta * eta;
        if (k >= 0) scores(k, j) = eta;
      }
    }
    return scores;
  }

  const int M = model.effective_truncation(n);
  std::vector<double> a = model.linear_coefficients(M);
  std::reverse(a.begin(), a.end());  // reversed taps for contiguous dot
  const std::size_t len = a.size();
  std::vector<double> eps(n + len - 1);
  for (int j = 0; j < J; ++j) {
    Rng rng = seed.stream(kDomScores, j);
    for (double& e : eps) e = rng.next_gaussian();
    for (int k = 0; k < n; ++k)
      scores(k, j) = simd::dot(a.data(), eps.data() + k, len);
  }
  return scores;
}

std::vector<double> arh1_score_variances(const ProcessSpec& spec) {
  const std::vector<double> phi = spec.phi_profile.lambdas();
  const std::vector<double> noise = spec.noise_profile.lambdas();
  std::vector<double> out(phi.size());
  for (std::size_t j = 0; j < phi.size(); ++j)
    out[j] = noise[j] / (1.0 - phi[j] * phi[j]);
  return out;
}

SamplePath gen_process(const ProcessSpec& spec, int n, int burnin, const SeedSpec& seed) {
  spec.validate();
  if (n < 1) throw validation_error("gen_process: need n >= 1");
  if (burnin < 0) throw validation_error("gen_process: need burnin >= 0");
  const int J = spec.model_order();
  const Grid grid = spec.grid();

  SamplePath path;
  path.spec = spec;
  path.n = n;
  path.curves.assign(n, GridFn(grid));

  auto add_mean = [&](GridFn& f) {
    if (spec.mean) add_scaled(f, 1.0, *spec.mean);
  };

  switch (spec.kind) {
    case ProcessSpec::Kind::Kl: {
      const std::vector<double> lam = spec.profile.lambdas();
      Matrix scores = gen_scores(spec.scores, n, J, seed);
      for (int k = 0; k < n; ++k) {
        GridFn& x = path.curves[k];
        for (int j = 0; j < J; ++j)
          add_scaled(x, std::sqrt(lam[j]) * scores(k, j), spec.basis.functions[j]);
        add_mean(x);
      }
      path.true_scores = std::move(scores);
      break;
    }
    case ProcessSpec::Kind::Arh1: {
      const std::vector<double> phi = spec.phi_profile.lambdas();
      const std::vector<double> noise = spec.noise_profile.lambdas();
      const int min_burn =
          phi[0] > 0.0
              ? static_cast<int>(std::ceil(std::log(1e-12) / std::log(phi[0])))
              : 0;
      if (burnin < min_burn)
        throw validation_error("gen_process: ARH(1) burnin too short, need >= " +
                               std::to_string(min_burn));
      std::vector<double> state(J, 0.0);
      std::vector<Rng> streams;
      streams.reserve(J);
      for (int j = 0; j < J; ++j) streams.push_back(seed.stream(kDomArh1, j));
      for (int k = -burnin; k < n; ++k) {
        for (int j = 0; j < J; ++j)
          state[j] = phi[j] * state[j] + std::sqrt(noise[j]) * streams[j].next_gaussian();
        if (k >= 0) {
          GridFn& x = path.curves[k];
          for (int j = 0; j < J; ++j)
            add_scaled(x, state[j], spec.basis.functions[j]);
          add_mean(x);
        }
      }
      break;
    }
    case ProcessSpec::Kind::Multiplicative: {
      const std::vector<double> lam = spec.profile.lambdas();
      const ScoreModel& m = spec.scores;
      Rng rng = seed.stream(kDomMult, 0);
      // stationary initialization of sigma^2: E<eps, e_1>^2 = lambda_1
      const double denom = 1.0 - m.beta - m.gamma * lam[0];
      double sigma2 = denom > 0.0 ? m.omega / denom : m.omega;
      std::vector<double> xi(J);
      for (int k = -burnin; k < n; ++k) {
        for (int j = 0; j < J; ++j) xi[j] = rng.next_gaussian();
        const double sigma_prev = std::sqrt(sigma2);
        const double score1 = std::sqrt(lam[0]) * xi[0];
        sigma2 = m.omega + m.beta * sigma2 + m.gamma * score1 * score1;
        if (k >= 0) {
          GridFn& x = path.curves[k];
          for (int j = 0; j < J; ++j)
            add_scaled(x, sigma_prev * std::sqrt(lam[j]) * xi[j], spec.basis.functions[j]);
          add_mean(x);
        }
      }
      break;
    }
  }
  return path;
}

double coupling_distance(const ProcessSpec& spec, int k, int p, int reps, const SeedSpec& seed) {
  if (k < 0) throw validation_error("coupling_distance: need k >= 0");
  if (p != 2 && p != 4) throw validation_error("coupling_distance: p must be 2 or 4");
  if (reps < 100) throw validation_error("coupling_distance: need reps >= 100");
  const ScoreModel& model = spec.scores;
  if (!model.is_linear_family())
    throw validation_error("coupling_distance: unsupported score model kind");

  const int M = model.effective_truncation(k + 1);
  std::vector<double> a = model.linear_coefficients(M);
  std::reverse(a.begin(), a.end());
  const std::size_t len = a.size();

  // eps window covers times k-M .. k; time 0 sits at offset M - k when
  // k <= M, otherwise eta_k does not depend on eps_0 at all.
  const int zero_idx = static_cast<int>(len) - 1 - k;
  std::vector<double> eps(len);
  double acc = 0.0;
  for (int r = 0; r < reps; ++r) {
    Rng rng = seed.stream(kDomCoupling, r);
    for (double& e : eps) e = rng.next_gaussian();
    const double eta = simd::dot(a.data(), eps.data(), len);
    double eta_c = eta;
    if (zero_idx >= 0) {
      const double eps0 = eps[zero_idx];
      const double eps0_prime = rng.next_gaussian();
      eps[zero_idx] = eps0_prime;
      eta_c = simd::dot(a.data(), eps.data(), len);
      eps[zero_idx] = eps0;
    }
    const double d = eta - eta_c;
    acc += (p == 2) ? d * d : d * d * d * d;
  }
  return std::pow(acc / reps, 1.0 / p);
}

}  // namespace fts
