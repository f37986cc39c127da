#pragma once

#include <cstddef>

// Vectorized inner loops behind everything that touches per-grid-point or
// per-coefficient data: quadrature sums, kernel assembly, score
// convolutions and Jacobi rotations. Scalar reference kernels live next to
// the AVX2/NEON variants; the active set is picked once at startup from
// CPU features and can be overridden for testing.

namespace fts::simd {

struct KernelTable {
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // a[i] += w * x[i] * y[i]  (weighted elementwise product accumulate)
  void (*rank1_row)(double w, const double* x, const double* y, double* a, std::size_t n);
  // (x[i], y[i]) <- (c*x[i] - s*y[i], s*x[i] + c*y[i])  (Givens rotation)
  void (*rotate)(double c, double s, double* x, double* y, std::size_t n);
};

namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void rank1_row(double w, const double* x, const double* y, double* a, std::size_t n);
void rotate(double c, double s, double* x, double* y, std::size_t n);
}  // namespace scalar

const KernelTable& scalar_table();
// Best table for the running CPU (AVX2+FMA or NEON when available).
const KernelTable& native_table();

// Active dispatch table. Defaults to native_table().
const KernelTable& active();
void set_active(const KernelTable& table);
const char* active_name();

inline double dot(const double* x, const double* y, std::size_t n) {
  return active().dot(x, y, n);
}
inline void axpy(double a, const double* x, double* y, std::size_t n) {
  active().axpy(a, x, y, n);
}
inline void rank1_row(double w, const double* x, const double* y, double* a, std::size_t n) {
  active().rank1_row(w, x, y, a, n);
}
inline void rotate(double c, double s, double* x, double* y, std::size_t n) {
  active().rotate(c, s, x, y, n);
}

}  // namespace fts::simd
