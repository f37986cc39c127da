#pragma once

#include <vector>

#include "fts/common.hpp"

// Discretized function space on [0,1]: midpoint grid, quadrature, Fourier
// basis and integral-operator kernels. With the midpoint rule the Fourier
// modes are discretely orthonormal for J <= T/4, so the basis itself never
// contributes error to statistical residuals computed downstream.

namespace fts {

struct Grid {
  int size = 0;  // number of midpoints T

  double weight() const { return 1.0 / size; }
  double point(int i) const { return (i + 0.5) / size; }  // i in [0, T)
  bool operator==(const Grid& o) const { return size == o.size; }
  bool operator!=(const Grid& o) const { return size != o.size; }
};

Grid make_grid(int T);

struct GridFn {
  Grid grid;
  std::vector<double> values;

  GridFn() = default;
  explicit GridFn(Grid g) : grid(g), values(g.size, 0.0) {}
  GridFn(Grid g, std::vector<double> v);
};

struct KernelOp {
  Grid grid;
  Matrix matrix;  // T x T kernel values K(t_i, t_s)
  bool symmetric = false;

  KernelOp() = default;
  explicit KernelOp(Grid g, bool sym = false)
      : grid(g), matrix(static_cast<std::size_t>(g.size), static_cast<std::size_t>(g.size)),
        symmetric(sym) {}
};

// Declares (and checks) the symmetry flag on an assembled kernel.
void mark_symmetric(KernelOp& K);

struct BasisSet {
  Grid grid;
  int count = 0;
  std::vector<GridFn> functions;
};

// e_1 = 1, e_{2m} = sqrt(2) cos(2 pi m t), e_{2m+1} = sqrt(2) sin(2 pi m t).
BasisSet fourier_basis(Grid grid, int J);

double inner_product(const GridFn& f, const GridFn& g);
double l2_norm(const GridFn& f);
double sup_norm(const GridFn& f);

GridFn apply_kernel(const KernelOp& K, const GridFn& f);

// f += a * g (same grid).
void add_scaled(GridFn& f, double a, const GridFn& g);

// K += w * f (x) g, i.e. K(r,s) += w f(r) g(s).
void add_outer(KernelOp& K, double w, const GridFn& f, const GridFn& g);

// Kernel of the quadrature composition A*B: (A o B)(f) computed pointwise.
KernelOp compose(const KernelOp& A, const KernelOp& B);

KernelOp transpose(const KernelOp& K);

double frobenius_distance(const KernelOp& A, const KernelOp& B);

}  // namespace fts
