#include "fts/grid.hpp"

#include <cmath>
#include <string>

#include "fts/simd.hpp"

namespace fts {

Grid make_grid(int T) {
  if (T < 4) throw validation_error("make_grid: need T >= 4, got " + std::to_string(T));
  return Grid{T};
}

GridFn::GridFn(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (static_cast<int>(values.size()) != grid.size)
    throw validation_error("GridFn: value count does not match grid");
  for (double x : values)
    if (!std::isfinite(x)) throw validation_error("GridFn: non-finite value");
}

void mark_symmetric(KernelOp& K) {
  const int T = K.grid.size;
  double max_abs = 0.0, max_asym = 0.0;
  for (int i = 0; i < T; ++i)
    for (int s = 0; s < T; ++s) {
      max_abs = std::max(max_abs, std::abs(K.matrix(i, s)));
      max_asym = std::max(max_asym, std::abs(K.matrix(i, s) - K.matrix(s, i)));
    }
  if (max_abs > 0.0 && max_asym > kStructuralTol * max_abs)
    throw validation_error("mark_symmetric: kernel asymmetry exceeds tolerance");
  K.symmetric = true;
}

BasisSet fourier_basis(Grid grid, int J) {
  const int T = grid.size;
  if (J < 1) throw validation_error("fourier_basis: need J >= 1");
  if (4 * J > T)
    throw validation_error("fourier_basis: J > T/4 would alias (J=" + std::to_string(J) +
                           ", T=" + std::to_string(T) + ")");
  BasisSet basis;
  basis.grid = grid;
  basis.count = J;
  basis.functions.reserve(J);
  const double sqrt2 = std::sqrt(2.0);
  const double two_pi = 6.283185307179586476925286766559;
  for (int j = 1; j <= J; ++j) {
    GridFn f(grid);
    if (j == 1) {
      for (int i = 0; i < T; ++i) f.values[i] = 1.0;
    } else {
      const int m = j / 2;
      const bool is_cos = (j % 2 == 0);
      for (int i = 0; i < T; ++i) {
        const double arg = two_pi * m * grid.point(i);
        f.values[i] = sqrt2 * (is_cos ? std::cos(arg) : std::sin(arg));
      }
    }
    basis.functions.push_back(std::move(f));
  }
  return basis;
}

double inner_product(const GridFn& f, const GridFn& g) {
  if (f.grid != g.grid) throw validation_error("inner_product: grid mismatch");
  return f.grid.weight() * simd::dot(f.values.data(), g.values.data(), f.values.size());
}

double l2_norm(const GridFn& f) {
  return std::sqrt(f.grid.weight() * simd::dot(f.values.data(), f.values.data(), f.values.size()));
}

double sup_norm(const GridFn& f) {
  double s = 0.0;
  for (double x : f.values) s = std::max(s, std::abs(x));
  return s;
}

GridFn apply_kernel(const KernelOp& K, const GridFn& f) {
  if (K.grid != f.grid) throw validation_error("apply_kernel: grid mismatch");
  const int T = K.grid.size;
  GridFn g(K.grid);
  const double w = K.grid.weight();
  for (int i = 0; i < T; ++i)
    g.values[i] = w * simd::dot(K.matrix.row(i), f.values.data(), T);
  return g;
}

void add_scaled(GridFn& f, double a, const GridFn& g) {
  if (f.grid != g.grid) throw validation_error("add_scaled: grid mismatch");
  simd::axpy(a, g.values.data(), f.values.data(), f.values.size());
}

void add_outer(KernelOp& K, double w, const GridFn& f, const GridFn& g) {
  if (K.grid != f.grid || K.grid != g.grid) throw validation_error("add_outer: grid mismatch");
  const int T = K.grid.size;
  for (int i = 0; i < T; ++i)
    simd::axpy(w * f.values[i], g.values.data(), K.matrix.row(i), T);
}

KernelOp compose(const KernelOp& A, const KernelOp& B) {
  if (A.grid != B.grid) throw validation_error("compose: grid mismatch");
  const int T = A.grid.size;
  const double w = A.grid.weight();
  // (A o B)(r,s) = (1/T) sum_u A(r,u) B(u,s)
  KernelOp C(A.grid);
  for (int r = 0; r < T; ++r)
    for (int u = 0; u < T; ++u)
      simd::axpy(w * A.matrix(r, u), B.matrix.row(u), C.matrix.row(r), T);
  return C;
}

KernelOp transpose(const KernelOp& K) {
  const int T = K.grid.size;
  KernelOp R(K.grid, K.symmetric);
  for (int i = 0; i < T; ++i)
    for (int s = 0; s < T; ++s) R.matrix(i, s) = K.matrix(s, i);
  return R;
}

double frobenius_distance(const KernelOp& A, const KernelOp& B) {
  if (A.grid != B.grid) throw validation_error("frobenius_distance: grid mismatch");
  const int T = A.grid.size;
  const double w = A.grid.weight();
  double acc = 0.0;
  for (int i = 0; i < T; ++i)
    for (int s = 0; s < T; ++s) {
      const double d = A.matrix(i, s) - B.matrix(i, s);
      acc += d * d;
    }
  return std::sqrt(acc) * w;  // discrete L2(T^2) norm
}

}  // namespace fts
