#include <doctest.h>

#include <cmath>
#include <vector>

#include "fts/simulate.hpp"

using namespace fts;

namespace {

ProcessSpec kl_spec(int T, std::vector<double> lambdas, ScoreModel scores) {
  ProcessSpec spec;
  spec.kind = ProcessSpec::Kind::Kl;
  spec.profile = EigenProfile::explicit_list(std::move(lambdas));
  spec.basis = fourier_basis(make_grid(T), spec.profile.count);
  spec.scores = std::move(scores);
  return spec;
}

}  // namespace

TEST_CASE("profile validation") {
  CHECK_THROWS_AS(EigenProfile::polynomial(1.0, 5), validation_error);
  CHECK_THROWS_AS(EigenProfile::exponential(1.0, 5), validation_error);
  CHECK_THROWS_AS(EigenProfile::explicit_list({1.0, 1.5}), validation_error);
  CHECK_THROWS_AS(EigenProfile::explicit_list({1.0, -0.5}), validation_error);
  const EigenProfile p = EigenProfile::polynomial(2.0, 3);
  const std::vector<double> lam = p.lambdas();
  CHECK(lam[0] == doctest::Approx(1.0));
  CHECK(lam[1] == doctest::Approx(0.25));
  CHECK(lam[2] == doctest::Approx(1.0 / 9.0));
}

TEST_CASE("score model validation") {
  CHECK_THROWS_AS(ScoreModel::linear_gaussian(0.5), validation_error);
  CHECK_THROWS_AS(ScoreModel::ma_q({}), validation_error);
  CHECK_THROWS_AS(ScoreModel::multiplicative_vol(0.1, 0.6, 0.5), validation_error);
  CHECK_NOTHROW(ScoreModel::multiplicative_vol(0.1, 0.5, 0.3));
}

TEST_CASE("iid scores have unit variance") {
  const Matrix s = gen_scores(ScoreModel::iid_gaussian(), 100000, 1, SeedSpec{12});
  double mean = 0.0, var = 0.0;
  for (std::size_t k = 0; k < s.rows(); ++k) mean += s(k, 0);
  mean /= s.rows();
  for (std::size_t k = 0; k < s.rows(); ++k) var += (s(k, 0) - mean) * (s(k, 0) - mean);
  var /= s.rows() - 1;
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("linear score lag-1 autocorrelation matches the closed form") {
  const int M = 500;
  const ScoreModel model = ScoreModel::linear_gaussian(0.9, M);
  // independent oracle: c^2 sum (i+1)^{-a} (i+2)^{-a} with the same
  // normalization window
  long double s2 = 0.0L, s01 = 0.0L;
  for (int i = 0; i <= M; ++i) {
    const long double ai = std::pow((long double)(i + 1), -0.9L);
    s2 += ai * ai;
    if (i < M) s01 += ai * std::pow((long double)(i + 2), -0.9L);
  }
  const double r1_oracle = static_cast<double>(s01 / s2);
  CHECK(model.autocorrelation(1) == doctest::Approx(r1_oracle).epsilon(1e-12));

  const int n = 30000;
  const Matrix s = gen_scores(model, n, 1, SeedSpec{77});
  double m = 0.0;
  for (int k = 0; k < n; ++k) m += s(k, 0);
  m /= n;
  double c0 = 0.0, c1 = 0.0;
  for (int k = 0; k < n; ++k) c0 += (s(k, 0) - m) * (s(k, 0) - m);
  for (int k = 0; k + 1 < n; ++k) c1 += (s(k, 0) - m) * (s(k + 1, 0) - m);
  CHECK(std::abs(c1 / c0 - r1_oracle) < 0.05);
}

TEST_CASE("MA(0) equals the iid stream bit for bit") {
  const Matrix a = gen_scores(ScoreModel::iid_gaussian(), 50, 3, SeedSpec{5});
  const Matrix b = gen_scores(ScoreModel::ma_q({1.0}), 50, 3, SeedSpec{5});
  for (std::size_t k = 0; k < a.rows(); ++k)
    for (std::size_t j = 0; j < a.cols(); ++j) CHECK(a(k, j) == b(k, j));
}

TEST_CASE("KL sample satisfies the reconstruction identity") {
  const ProcessSpec spec = kl_spec(16, {1.0, 0.25}, ScoreModel::iid_gaussian());
  const SamplePath path = gen_process(spec, 2, 0, SeedSpec{42});
  REQUIRE(path.true_scores.has_value());
  const Matrix& sc = *path.true_scores;
  for (int k = 0; k < 2; ++k) {
    GridFn expect(spec.grid());
    add_scaled(expect, std::sqrt(1.0) * sc(k, 0), spec.basis.functions[0]);
    add_scaled(expect, std::sqrt(0.25) * sc(k, 1), spec.basis.functions[1]);
    for (int i = 0; i < 16; ++i)
      CHECK(std::abs(path.curves[k].values[i] - expect.values[i]) < 1e-10);
  }
}

TEST_CASE("generation is reproducible") {
  const ProcessSpec spec = kl_spec(16, {1.0, 0.5, 0.2}, ScoreModel::ma_q({1.0, 0.4}));
  const SamplePath a = gen_process(spec, 20, 0, SeedSpec{9});
  const SamplePath b = gen_process(spec, 20, 0, SeedSpec{9});
  for (int k = 0; k < 20; ++k)
    for (int i = 0; i < 16; ++i) CHECK(a.curves[k].values[i] == b.curves[k].values[i]);
}

TEST_CASE("ARH(1) stationary score variances match the recursion") {
  ProcessSpec spec;
  spec.kind = ProcessSpec::Kind::Arh1;
  spec.profile = EigenProfile::explicit_list({1.0, 0.5});
  spec.basis = fourier_basis(make_grid(8), 2);
  spec.phi_profile = EigenProfile::explicit_list({0.5, 0.2});
  spec.noise_profile = EigenProfile::explicit_list({1.0, 0.5});
  spec.scores = ScoreModel::iid_gaussian();
  const std::vector<double> lam = arh1_score_variances(spec);
  CHECK(lam[0] == doctest::Approx(1.0 / 0.75));
  CHECK(lam[1] == doctest::Approx(0.5 / 0.96));

  const int n = 20000;
  const SamplePath path = gen_process(spec, n, 100, SeedSpec{3});
  for (int j = 0; j < 2; ++j) {
    double var = 0.0;
    for (int k = 0; k < n; ++k) {
      const double score = inner_product(path.curves[k], spec.basis.functions[j]);
      var += score * score;
    }
    var /= n;
    CHECK(std::abs(var - lam[j]) / lam[j] < 0.1);
  }
}

TEST_CASE("ARH(1) burnin precondition is enforced") {
  ProcessSpec spec;
  spec.kind = ProcessSpec::Kind::Arh1;
  spec.profile = EigenProfile::explicit_list({1.0});
  spec.basis = fourier_basis(make_grid(8), 1);
  spec.phi_profile = EigenProfile::explicit_list({0.5});
  spec.noise_profile = EigenProfile::explicit_list({1.0});
  spec.scores = ScoreModel::iid_gaussian();
  CHECK_THROWS_AS(gen_process(spec, 10, 0, SeedSpec{1}), validation_error);
}

TEST_CASE("multiplicative model with constant volatility is iid scaled noise") {
  ProcessSpec spec;
  spec.kind = ProcessSpec::Kind::Multiplicative;
  spec.profile = EigenProfile::explicit_list({1.0, 0.25});
  spec.basis = fourier_basis(make_grid(8), 2);
  spec.scores = ScoreModel::multiplicative_vol(0.36, 0.0, 0.0);
  const int n = 50000;
  const SamplePath path = gen_process(spec, n, 10, SeedSpec{21});
  double var = 0.0;
  for (int k = 0; k < n; ++k) {
    const double s = inner_product(path.curves[k], spec.basis.functions[0]);
    var += s * s;
  }
  var /= n;
  CHECK(std::abs(var - 0.36) < 0.02);  // sigma^2 = omega, score variance 1
}

TEST_CASE("multiplicative model has martingale scores but dependent squares") {
  ProcessSpec spec;
  spec.kind = ProcessSpec::Kind::Multiplicative;
  spec.profile = EigenProfile::explicit_list({1.0, 0.25});
  spec.basis = fourier_basis(make_grid(8), 2);
  spec.scores = ScoreModel::multiplicative_vol(0.2, 0.45, 0.25);
  const int n = 100000;
  const SamplePath path = gen_process(spec, n, 200, SeedSpec{33});
  std::vector<double> s(n);
  for (int k = 0; k < n; ++k) s[k] = inner_product(path.curves[k], spec.basis.functions[0]);
  double mean = 0.0, mean_sq = 0.0;
  for (double x : s) {
    mean += x;
    mean_sq += x * x;
  }
  mean /= n;
  mean_sq /= n;
  double c1 = 0.0, c1_sq = 0.0, var = 0.0, var_sq = 0.0;
  for (int k = 0; k + 1 < n; ++k) {
    c1 += (s[k] - mean) * (s[k + 1] - mean);
    c1_sq += (s[k] * s[k] - mean_sq) * (s[k + 1] * s[k + 1] - mean_sq);
  }
  c1 /= n - 1;
  c1_sq /= n - 1;
  for (double x : s) {
    var += (x - mean) * (x - mean);
    var_sq += (x * x - mean_sq) * (x * x - mean_sq);
  }
  var /= n;
  var_sq /= n;
  // levels: lag-1 autocovariance within 4 standard errors of 0
  CHECK(std::abs(c1) <= 4.0 * var / std::sqrt(static_cast<double>(n)) * 3.0);
  // squares: clearly autocorrelated
  CHECK(c1_sq / var_sq > 0.1);
}

TEST_CASE("empirical mean curve is small for iid KL samples") {
  const ProcessSpec spec = kl_spec(8, {1.0, 0.25}, ScoreModel::iid_gaussian());
  int pass = 0;
  for (int s = 0; s < 10; ++s) {
    const int n = 10000;
    const SamplePath path = gen_process(spec, n, 0, SeedSpec{900 + static_cast<std::uint64_t>(s)});
    GridFn mean(spec.grid());
    for (const GridFn& x : path.curves) add_scaled(mean, 1.0 / n, x);
    if (sup_norm(mean) <= 5.0 * std::sqrt(1.0 / n)) ++pass;
  }
  CHECK(pass >= 9);
}

TEST_CASE("coupling distance: iid cases") {
  const ProcessSpec spec = kl_spec(8, {1.0}, ScoreModel::iid_gaussian());
  CHECK(coupling_distance(spec, 1, 2, 200, SeedSpec{7}) == 0.0);
  const double d0 = coupling_distance(spec, 0, 2, 5000, SeedSpec{7});
  CHECK(std::abs(d0 - std::sqrt(2.0)) < 0.1);
}

TEST_CASE("coupling distance for linear scores matches the coefficient") {
  const int M = 2000;
  const ScoreModel model = ScoreModel::linear_gaussian(1.5, M);
  ProcessSpec spec = kl_spec(8, {1.0}, model);
  const std::vector<double> a = model.linear_coefficients(M);
  for (int k : {1, 4}) {
    const double d = coupling_distance(spec, k, 2, 4000, SeedSpec{55});
    const double oracle = a[k] * std::sqrt(2.0);  // only tap k changes
    CHECK(std::abs(d - oracle) / oracle < 0.1);
  }
}

TEST_CASE("coupling distance validates inputs") {
  const ProcessSpec spec = kl_spec(8, {1.0}, ScoreModel::iid_gaussian());
  CHECK_THROWS_AS(coupling_distance(spec, 1, 3, 200, SeedSpec{1}), validation_error);
  CHECK_THROWS_AS(coupling_distance(spec, 1, 2, 10, SeedSpec{1}), validation_error);
  ProcessSpec bad = spec;
  bad.kind = ProcessSpec::Kind::Multiplicative;
  bad.scores = ScoreModel::multiplicative_vol(0.1, 0.2, 0.2);
  bad.profile = EigenProfile::explicit_list({1.0});
  CHECK_THROWS_AS(coupling_distance(bad, 1, 2, 200, SeedSpec{1}), validation_error);
}
