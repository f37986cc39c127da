#include <doctest.h>

#include <cmath>
#include <vector>

#include "fts/expansion.hpp"
#include "fts/operators.hpp"
#include "fts/simulate.hpp"

using namespace fts;

namespace {

// Two-mode model with an explicitly rotated perturbation: every quantity
// below has a closed form in (theta, mu, lambda).
struct RotatedPair {
  Grid grid;
  BasisSet basis;
  double lam1 = 2.0, lam2 = 1.0;
  double mu1 = 2.05, mu2 = 0.93;
  double theta = 0.05;
  KernelOp popK, hatK;
  EigenSystem pop, hat;
  GridFn v1, v2;

  RotatedPair() : grid(make_grid(16)), basis(fourier_basis(grid, 2)),
                  popK(grid), hatK(grid), v1(grid), v2(grid) {
    const GridFn& e1 = basis.functions[0];
    const GridFn& e2 = basis.functions[1];
    const double c = std::cos(theta), s = std::sin(theta);
    for (int i = 0; i < grid.size; ++i) {
      v1.values[i] = c * e1.values[i] + s * e2.values[i];
      v2.values[i] = -s * e1.values[i] + c * e2.values[i];
    }
    add_outer(popK, lam1, e1, e1);
    add_outer(popK, lam2, e2, e2);
    mark_symmetric(popK);
    add_outer(hatK, mu1, v1, v1);
    add_outer(hatK, mu2, v2, v2);
    mark_symmetric(hatK);

    pop.grid = grid;
    pop.count = 2;
    pop.lambdas = {lam1, lam2};
    pop.efuns = {e1, e2};
    pop.refresh_gap_quantities();
    hat.grid = grid;
    hat.count = 2;
    hat.lambdas = {mu1, mu2};
    hat.efuns = {v1, v2};
    hat.refresh_gap_quantities();
  }
};

}  // namespace

TEST_CASE("I_matrix matches the rotated-pair closed form") {
  const RotatedPair rp;
  const Matrix I = I_matrix(rp.hatK, rp.popK, rp.pop);
  const double c = std::cos(rp.theta), s = std::sin(rp.theta);
  CHECK(std::abs(I(0, 0) - (rp.mu1 * c * c + rp.mu2 * s * s - rp.lam1)) < 1e-12);
  CHECK(std::abs(I(1, 1) - (rp.mu1 * s * s + rp.mu2 * c * c - rp.lam2)) < 1e-12);
  const double off = (rp.mu1 - rp.mu2) * c * s;
  CHECK(std::abs(I(0, 1) - off) < 1e-12);
  CHECK(std::abs(I(1, 0) - off) < 1e-12);
}

TEST_CASE("perturbation identity is exact for the rotated pair") {
  const RotatedPair rp;
  const PerturbationTerms t = perturbation_identity(rp.hat, rp.pop, rp.hatK, rp.popK, 2, 1);
  const double s = std::sin(rp.theta);
  CHECK(std::abs(t.lhs - (rp.lam1 - rp.lam2) * s) < 1e-12);
  CHECK(std::abs(t.residual) < 1e-12);
  const PerturbationTerms t2 = perturbation_identity(rp.hat, rp.pop, rp.hatK, rp.popK, 1, 2);
  CHECK(std::abs(t2.residual) < 1e-12);

  CHECK_THROWS_AS(perturbation_identity(rp.hat, rp.pop, rp.hatK, rp.popK, 1, 1),
                  validation_error);
  CHECK_THROWS_AS(perturbation_identity(rp.hat, rp.pop, rp.hatK, rp.popK, 0, 1),
                  validation_error);
  EigenSystem flat = rp.pop;
  flat.lambdas = {2.0, 2.0};
  CHECK_THROWS_AS(perturbation_identity(rp.hat, flat, rp.hatK, rp.popK, 2, 1),
                  degeneracy_error);
}

TEST_CASE("eigenvalue and eigenfunction residuals match closed forms") {
  const RotatedPair rp;
  const Matrix I = I_matrix(rp.hatK, rp.popK, rp.pop);
  const double c = std::cos(rp.theta), s = std::sin(rp.theta);

  const std::vector<double> R1 = eigval_residual(rp.hat, rp.pop, I);
  const double I11 = rp.mu1 * c * c + rp.mu2 * s * s - rp.lam1;
  CHECK(std::abs(R1[0] - (rp.mu1 - rp.lam1 - I11) / rp.lam1) < 1e-12);

  // residual vector for j = 1 assembled by hand
  const double norm2 = 2.0 * (1.0 - c);  // ||v1 - e1||^2
  const double I21 = (rp.mu1 - rp.mu2) * c * s;
  const double gap = rp.lam1 - rp.lam2;
  // coefficients of the residual in the (e1, e2) coordinates
  const double coef1 = (c - 1.0) + 0.5 * norm2;
  const double coef2 = s - I21 / gap;
  const double Lambda1 = rp.lam1 * rp.lam2 / (gap * gap);
  const double R2_oracle = std::sqrt(coef1 * coef1 + coef2 * coef2) / std::sqrt(Lambda1);
  const double R3_oracle = (norm2 - I21 * I21 / (gap * gap)) / Lambda1;

  const auto [R2, R3] = eigfun_residual(rp.hat, rp.pop, I, 1);
  CHECK(std::abs(R2 - R2_oracle) < 1e-10);
  CHECK(std::abs(R3 - R3_oracle) < 1e-10);
}

TEST_CASE("expansion_report reproduces the closed forms through the eigensolver") {
  const RotatedPair rp;
  const ExpansionReport rep = expansion_report(rp.hatK, rp.popK, rp.pop, 2, 100.0);
  CHECK(rep.J == 2);
  CHECK(rep.m == 100.0);
  CHECK(rep.lambda_hat[0] == doctest::Approx(rp.mu1).epsilon(1e-9));
  CHECK(rep.lambda_hat[1] == doctest::Approx(rp.mu2).epsilon(1e-9));
  CHECK(rep.lambda_pop[0] == rp.lam1);

  const Matrix I = I_matrix(rp.hatK, rp.popK, rp.pop);
  const std::vector<double> R1 = eigval_residual(rp.hat, rp.pop, I);
  const auto [R2, R3] = eigfun_residual(rp.hat, rp.pop, I, 1);
  CHECK(rep.R1[0] == doctest::Approx(R1[0]).epsilon(1e-6));
  CHECK(rep.R2[0] == doctest::Approx(R2).epsilon(1e-6));
  CHECK(rep.R3[0] == doctest::Approx(R3).epsilon(1e-6));
  CHECK(std::isnan(rep.RF[0]));

  CHECK_THROWS_AS(expansion_report(rp.hatK, rp.popK, rp.pop, 3, 100.0), validation_error);
}

TEST_CASE("score_gram matches direct loops") {
  Matrix s(5, 2);
  double v = 0.3;
  for (std::size_t k = 0; k < 5; ++k)
    for (std::size_t j = 0; j < 2; ++j) {
      s(k, j) = std::sin(v);
      v += 0.7;
    }
  const auto [gram, rem] = score_gram(s);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double g = 0.0, mi = 0.0, mj = 0.0;
      for (int k = 0; k < 5; ++k) {
        g += s(k, i) * s(k, j);
        mi += s(k, i);
        mj += s(k, j);
      }
      CHECK(gram(i, j) == doctest::Approx(g / 5.0).epsilon(1e-14));
      CHECK(rem(i, j) == doctest::Approx(mi * mj / 25.0).epsilon(1e-14));
    }
}

TEST_CASE("I matrix of the centered covariance equals the score-gram identity") {
  ProcessSpec spec;
  spec.kind = ProcessSpec::Kind::Kl;
  spec.profile = EigenProfile::explicit_list({1.0, 0.4});
  spec.basis = fourier_basis(make_grid(16), 2);
  spec.scores = ScoreModel::iid_gaussian();
  const SamplePath path = gen_process(spec, 50, 0, SeedSpec{404});
  REQUIRE(path.true_scores.has_value());

  EigenSystem pop;
  pop.grid = spec.grid();
  pop.count = 2;
  pop.lambdas = {1.0, 0.4};
  pop.efuns = {spec.basis.functions[0], spec.basis.functions[1]};
  pop.refresh_gap_quantities();
  const PopulationOperator popC = population_operator(spec, PopulationOperator::Kind::Cov);
  const OperatorEstimate hatC = cov_op(path, true);
  const Matrix I = I_matrix(hatC.op, popC.op, pop);
  const auto [gram, rem] = score_gram(*path.true_scores);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double expect = std::sqrt(pop.lambdas[i] * pop.lambdas[j]) *
                                (gram(i, j) - rem(i, j)) -
                            (i == j ? pop.lambdas[j] : 0.0);
      CHECK(std::abs(I(i, j) - expect) < 1e-10);
    }
}

TEST_CASE("svd right-function residual has the scalar-perturbation closed form") {
  ProcessSpec spec;
  spec.kind = ProcessSpec::Kind::Kl;
  spec.profile = EigenProfile::explicit_list({1.0, 0.4});
  spec.basis = fourier_basis(make_grid(16), 2);
  spec.scores = ScoreModel::ma_q({1.0, 0.6});
  const double r1 = 0.6 / 1.36;

  // population lag operator (diagonal in the model basis)
  KernelOp popCh(spec.grid());
  add_outer(popCh, 1.0 * r1, spec.basis.functions[0], spec.basis.functions[0]);
  add_outer(popCh, 0.4 * r1, spec.basis.functions[1], spec.basis.functions[1]);

  const PopulationOperator popD = population_sym_lag(spec, 1);
  EigenSystem pop;
  pop.grid = spec.grid();
  pop.count = 2;
  pop.lambdas = popD.lambdas;
  pop.efuns = {spec.basis.functions[0], spec.basis.functions[1]};
  pop.refresh_gap_quantities();

  // hat == pop: the residual vanishes identically
  CHECK(svd_f_residual(popCh, popCh, pop, pop, 1) < 1e-13);

  // hatCh = (1 + eps) popCh: residual norm is exactly 2 eps + eps^2 / 2
  const double eps = 0.01;
  KernelOp hatCh = popCh;
  for (int i = 0; i < 16; ++i)
    for (int s = 0; s < 16; ++s) hatCh.matrix(i, s) *= 1.0 + eps;
  EigenSystem hat = pop;
  for (double& lam : hat.lambdas) lam *= (1.0 + eps) * (1.0 + eps);
  const double rf = svd_f_residual(hatCh, popCh, hat, pop, 1);
  CHECK(rf == doctest::Approx(2.0 * eps + 0.5 * eps * eps).epsilon(1e-8));

  EigenSystem dead = hat;
  dead.lambdas[1] = 0.0;
  CHECK_THROWS_AS(svd_f_residual(hatCh, popCh, dead, pop, 2), degeneracy_error);
}
