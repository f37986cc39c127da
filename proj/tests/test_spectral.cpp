#include <doctest.h>

#include <cmath>
#include <vector>

#include "fts/rng.hpp"
#include "fts/spectral.hpp"

using namespace fts;

namespace {

// Random positive semidefinite kernel built as a Gram kernel of random
// functions (so eig_sym's negativity guard never trips).
KernelOp random_psd_kernel(Grid g, int rank, Rng& rng) {
  KernelOp K(g);
  for (int r = 0; r < rank; ++r) {
    GridFn f(g);
    for (double& v : f.values) v = rng.next_gaussian();
    add_outer(K, 1.0 / rank, f, f);
  }
  mark_symmetric(K);
  return K;
}

}  // namespace

TEST_CASE("eig_sym recovers a diagonal spectral kernel") {
  const Grid g = make_grid(16);
  const BasisSet basis = fourier_basis(g, 2);
  KernelOp K(g);
  add_outer(K, 2.0, basis.functions[0], basis.functions[0]);
  add_outer(K, 1.0, basis.functions[1], basis.functions[1]);
  mark_symmetric(K);
  const EigenSystem sys = eig_sym(K, 2);
  CHECK(sys.lambdas[0] == doctest::Approx(2.0));
  CHECK(sys.lambdas[1] == doctest::Approx(1.0));
  CHECK(std::abs(inner_product(sys.efuns[0], basis.functions[0])) == doctest::Approx(1.0));
  CHECK(std::abs(inner_product(sys.efuns[1], basis.functions[1])) == doctest::Approx(1.0));
}

TEST_CASE("eig_sym on the zero kernel") {
  KernelOp K(make_grid(8), true);
  const EigenSystem sys = eig_sym(K, 4);
  for (double l : sys.lambdas) CHECK(l == 0.0);
}

TEST_CASE("full eigendecomposition reconstructs the kernel") {
  const Grid g = make_grid(12);
  Rng rng(31, 0);
  const KernelOp K = random_psd_kernel(g, 20, rng);
  const EigenSystem sys = eig_sym(K, g.size);
  KernelOp R(g);
  for (int j = 0; j < g.size; ++j) add_outer(R, sys.lambdas[j], sys.efuns[j], sys.efuns[j]);
  double max_abs = 0.0, max_diff = 0.0;
  for (int i = 0; i < g.size; ++i)
    for (int s = 0; s < g.size; ++s) {
      max_abs = std::max(max_abs, std::abs(K.matrix(i, s)));
      max_diff = std::max(max_diff, std::abs(K.matrix(i, s) - R.matrix(i, s)));
    }
  CHECK(max_diff <= 1e-8 * std::max(max_abs, 1.0));
}

TEST_CASE("eig_sym residual and orthonormality") {
  const Grid g = make_grid(16);
  Rng rng(41, 1);
  const KernelOp K = random_psd_kernel(g, 30, rng);
  const EigenSystem sys = eig_sym(K, 6);
  for (int j = 0; j < 6; ++j) {
    GridFn resid = apply_kernel(K, sys.efuns[j]);
    add_scaled(resid, -sys.lambdas[j], sys.efuns[j]);
    CHECK(l2_norm(resid) <= 1e-8 * sys.lambdas[0]);
    for (int i = 0; i < 6; ++i) {
      const double ip = inner_product(sys.efuns[i], sys.efuns[j]);
      CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) <= 1e-8);
    }
  }
}

TEST_CASE("eig_sym is deterministic and sign-canonical") {
  const Grid g = make_grid(12);
  Rng rng(51, 7);
  const KernelOp K = random_psd_kernel(g, 15, rng);
  const EigenSystem a = eig_sym(K, 5);
  const EigenSystem b = eig_sym(K, 5);
  for (int j = 0; j < 5; ++j) {
    CHECK(a.lambdas[j] == b.lambdas[j]);  // bit identical
    for (int i = 0; i < g.size; ++i) CHECK(a.efuns[j].values[i] == b.efuns[j].values[i]);
    // first coordinate of meaningful magnitude is positive
    for (double v : a.efuns[j].values) {
      if (std::abs(v) > 1e-12) {
        CHECK(v > 0.0);
        break;
      }
    }
  }
}

TEST_CASE("align_signs examples") {
  const Grid g = make_grid(16);
  Rng rng(61, 2);
  const KernelOp K = random_psd_kernel(g, 20, rng);
  const EigenSystem ref = eig_sym(K, 4);

  EigenSystem flipped = ref;
  for (double& v : flipped.efuns[0].values) v = -v;
  const EigenSystem fixed = align_signs(flipped, ref);
  for (int i = 0; i < g.size; ++i)
    CHECK(fixed.efuns[0].values[i] == doctest::Approx(ref.efuns[0].values[i]));

  const EigenSystem same = align_signs(ref, ref);
  for (int j = 0; j < 4; ++j)
    CHECK(inner_product(same.efuns[j], ref.efuns[j]) >= 0.0);
}

TEST_CASE("align_signs on randomly perturbed systems") {
  const Grid g = make_grid(16);
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(100 + trial, 3);
    const KernelOp K = random_psd_kernel(g, 25, rng);
    const EigenSystem ref = eig_sym(K, 4);
    KernelOp K2 = K;
    GridFn noise(g);
    for (double& v : noise.values) v = rng.next_gaussian();
    add_outer(K2, 0.01, noise, noise);
    mark_symmetric(K2);
    EigenSystem hat = eig_sym(K2, 4);
    // randomly corrupt the signs, then align
    for (int j = 0; j < 4; ++j)
      if (rng.next_uniform() < 0.5)
        for (double& v : hat.efuns[j].values) v = -v;
    const EigenSystem aligned = align_signs(hat, ref);
    for (int j = 0; j < 4; ++j) CHECK(inner_product(aligned.efuns[j], ref.efuns[j]) >= 0.0);
  }
}

TEST_CASE("gap quantities basic arithmetic") {
  const GapQuantities g2 = gap_quantities({5.0, 3.0, 2.0}, 2);
  CHECK(g2.psi == doctest::Approx(1.0));
  const GapQuantities g1 = gap_quantities({4.0, 1.0}, 1);
  CHECK(g1.Lambda == doctest::Approx(4.0 / 9.0));
  CHECK(g1.psi == doctest::Approx(3.0));
  CHECK(g1.S1 == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("gap quantities against brute-force sums on a polynomial profile") {
  const int J = 10000;
  std::vector<double> lam(J);
  for (int j = 1; j <= J; ++j) lam[j - 1] = 1.0 / (static_cast<double>(j) * j);
  const int j = 3;
  const GapQuantities gq = gap_quantities(lam, j);
  // independent brute-force oracle in long double
  long double s1 = 0.0L, s2 = 0.0L;
  for (int k = 1; k <= J; ++k) {
    if (k == j) continue;
    const long double lj = 1.0L / ((long double)j * j);
    const long double lk = 1.0L / ((long double)k * k);
    s1 += lk / std::abs((double)(lj - lk));
    s2 += lj * lk / ((lj - lk) * (lj - lk));
  }
  CHECK(gq.S1 == doctest::Approx((double)s1).epsilon(1e-10));
  CHECK(gq.S2 == doctest::Approx((double)s2).epsilon(1e-10));

  // growth bound calibrated once at j = 2
  const double C = gap_quantities(lam, 2).S2 / 4.0;
  CHECK(gq.S2 <= C * j * j * 1.0001);
}

TEST_CASE("convexity-style growth of the gap sums") {
  const int J = 2000;
  std::vector<double> lam(J);
  for (int j = 1; j <= J; ++j) lam[j - 1] = 1.0 / (static_cast<double>(j) * j);
  const double base_S2 = gap_quantities(lam, 2).S2 / 4.0;
  const double base_S1 = gap_quantities(lam, 2).S1 / (2.0 * std::log(2.0));
  for (int j = 2; j <= 200; ++j) {
    const GapQuantities gq = gap_quantities(lam, j);
    CHECK(gq.S2 / (static_cast<double>(j) * j) <= 2.0 * base_S2);
    CHECK(gq.S1 / (j * std::log(static_cast<double>(j))) <= 2.0 * base_S1);
  }
}

TEST_CASE("gap quantities reject degenerate spectra") {
  CHECK_THROWS_AS(gap_quantities({2.0, 2.0, 1.0}, 1), validation_error);
  CHECK_THROWS_AS(gap_quantities({2.0, 2.0 - 1e-15, 1.0}, 1), degeneracy_error);
  CHECK_THROWS_AS(gap_quantities({2.0, 1.0}, 3), validation_error);
}

TEST_CASE("hall bound on Fourier eigenfunctions") {
  const Grid g = make_grid(64);
  const BasisSet basis = fourier_basis(g, 10);
  KernelOp K(g);
  std::vector<double> lam(10);
  for (int j = 1; j <= 10; ++j) {
    lam[j - 1] = 1.0 / (static_cast<double>(j) * j);
    add_outer(K, lam[j - 1], basis.functions[j - 1], basis.functions[j - 1]);
  }
  mark_symmetric(K);
  const EigenSystem sys = eig_sym(K, 10);
  const DiagnosticBundle d = hall_error_bound(sys, 1000, 10);
  for (int j = 0; j < 10; ++j) {
    // recovered sup-norms equal those of the generating Fourier modes
    // (the midpoint grid does not hit the oscillating extrema exactly)
    CHECK(d.s[j] == doctest::Approx(sup_norm(basis.functions[j])).epsilon(1e-8));
  }
  CHECK(d.s[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(d.s[1] > 1.38);
  CHECK(d.s[1] < std::sqrt(2.0) + 1e-12);
  // direct-evaluation oracle for the max formula
  double er = 0.0;
  for (int j = 1; j <= 10; ++j) {
    const GapQuantities gq = gap_quantities(sys.lambdas, j);
    double xi = 0.0;
    for (int k = 1; k < j; ++k) xi = std::min(xi, 1.0 - sys.lambdas[k - 1] / sys.lambdas[j - 1]);
    er = std::max(er, std::pow(1000.0, -1.5) / std::sqrt(1.0 - xi) /
                          std::pow(gq.psi, 3) / std::sqrt(sys.lambdas[j - 1]) * d.s[j - 1]);
  }
  CHECK(d.ER == doctest::Approx(er).epsilon(1e-10));
  // dominates the paper-rate bound J^{1/p} n^{-1/2-a} at a=0.1, p=4
  CHECK(d.ER > std::pow(10.0, 0.25) * std::pow(1000.0, -0.6));
}

TEST_CASE("hall bound single-index formula") {
  const Grid g = make_grid(16);
  const BasisSet basis = fourier_basis(g, 2);
  KernelOp K(g);
  add_outer(K, 2.0, basis.functions[0], basis.functions[0]);
  add_outer(K, 1.0, basis.functions[1], basis.functions[1]);
  mark_symmetric(K);
  const EigenSystem sys = eig_sym(K, 2);
  const DiagnosticBundle d = hall_error_bound(sys, 100, 1);
  CHECK(d.ER == doctest::Approx(std::pow(100.0, -1.5) / std::sqrt(2.0) * d.s[0]).epsilon(1e-9));
}

TEST_CASE("pathwise bounds: zero and rank-one perturbations") {
  const Grid g = make_grid(16);
  const BasisSet basis = fourier_basis(g, 2);
  KernelOp K(g);
  add_outer(K, 2.0, basis.functions[0], basis.functions[0]);
  add_outer(K, 1.0, basis.functions[1], basis.functions[1]);
  mark_symmetric(K);
  const EigenSystem pop = eig_sym(K, 2);

  PathwiseBoundCheck same = pathwise_bound_check(K, K, pop, pop);
  CHECK(same.all_ok());
  CHECK(same.delta_op_norm <= 1e-12);

  const double delta = 0.05;
  KernelOp K2 = K;
  add_outer(K2, delta, basis.functions[0], basis.functions[0]);
  mark_symmetric(K2);
  const EigenSystem hat = align_signs(eig_sym(K2, 2), pop);
  PathwiseBoundCheck chk = pathwise_bound_check(K2, K, hat, pop);
  CHECK(chk.all_ok());
  CHECK(chk.delta_op_norm == doctest::Approx(delta));
  CHECK(std::abs(hat.lambdas[0] - pop.lambdas[0]) == doctest::Approx(delta));
}

TEST_CASE("pathwise bounds hold over random perturbations") {
  const Grid g = make_grid(16);
  const BasisSet basis = fourier_basis(g, 4);
  KernelOp K(g);
  for (int j = 1; j <= 4; ++j)
    add_outer(K, std::pow(static_cast<double>(j), -2.0), basis.functions[j - 1],
              basis.functions[j - 1]);
  mark_symmetric(K);
  const EigenSystem pop = eig_sym(K, 4);
  int ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(1000 + trial, 0);
    KernelOp K2 = K;
    GridFn noise(g);
    for (double& v : noise.values) v = rng.next_gaussian();
    add_outer(K2, 0.002, noise, noise);
    mark_symmetric(K2);
    const EigenSystem hat = align_signs(eig_sym(K2, 4), pop);
    if (pathwise_bound_check(K2, K, hat, pop).all_ok()) ++ok;
  }
  CHECK(ok == 100);
}

TEST_CASE("operator norm of a diagonal difference") {
  const Grid g = make_grid(16);
  const BasisSet basis = fourier_basis(g, 2);
  KernelOp A(g), B(g);
  add_outer(A, 3.0, basis.functions[0], basis.functions[0]);
  add_outer(B, 1.0, basis.functions[0], basis.functions[0]);
  add_outer(B, 0.5, basis.functions[1], basis.functions[1]);
  // difference has eigenvalues {2, -0.5}
  CHECK(operator_norm_diff(A, B) == doctest::Approx(2.0));
}
