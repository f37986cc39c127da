#include "fts/simd.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define FTS_X86 1
#include <immintrin.h>
#elif defined(__ARM_NEON) || defined(__aarch64__)
#define FTS_NEON 1
#include <arm_neon.h>
#endif

namespace fts::simd {

namespace scalar {

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void rank1_row(double w, const double* x, const double* y, double* a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] += w * x[i] * y[i];
}

void rotate(double c, double s, double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i], yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

}  // namespace scalar

#ifdef FTS_X86
namespace avx2 {

__attribute__((target("avx2,fma"))) double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc0);
  double acc = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

__attribute__((target("avx2,fma"))) void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

__attribute__((target("avx2,fma"))) void rank1_row(double w, const double* x, const double* y,
                                                   double* a, std::size_t n) {
  const __m256d vw = _mm256_set1_pd(w);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(a + i, _mm256_fmadd_pd(vw, prod, _mm256_loadu_pd(a + i)));
  }
  for (; i < n; ++i) a[i] += w * x[i] * y[i];
}

__attribute__((target("avx2,fma"))) void rotate(double c, double s, double* x, double* y,
                                                std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(x + i, _mm256_fmsub_pd(vc, vx, _mm256_mul_pd(vs, vy)));
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vs, vx, _mm256_mul_pd(vc, vy)));
  }
  for (; i < n; ++i) {
    const double xi = x[i], yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

}  // namespace avx2
#endif  // FTS_X86

#ifdef FTS_NEON
namespace neon {

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
  double r = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) r += x[i] * y[i];
  return r;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

void rank1_row(double w, const double* x, const double* y, double* a, std::size_t n) {
  const float64x2_t vw = vdupq_n_f64(w);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t prod = vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i));
    vst1q_f64(a + i, vfmaq_f64(vld1q_f64(a + i), vw, prod));
  }
  for (; i < n; ++i) a[i] += w * x[i] * y[i];
}

void rotate(double c, double s, double* x, double* y, std::size_t n) {
  scalar::rotate(c, s, x, y, n);
}

}  // namespace neon
#endif  // FTS_NEON

namespace {

const KernelTable kScalarTable{scalar::dot, scalar::axpy, scalar::rank1_row, scalar::rotate};

#ifdef FTS_X86
const KernelTable kAvx2Table{avx2::dot, avx2::axpy, avx2::rank1_row, avx2::rotate};
#endif
#ifdef FTS_NEON
const KernelTable kNeonTable{neon::dot, neon::axpy, neon::rank1_row, neon::rotate};
#endif

const KernelTable* detect_native() {
#ifdef FTS_X86
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &kAvx2Table;
#endif
#ifdef FTS_NEON
  return &kNeonTable;
#endif
  return &kScalarTable;
}

const KernelTable* g_active = detect_native();

}  // namespace

const KernelTable& scalar_table() { return kScalarTable; }
const KernelTable& native_table() { return *detect_native(); }
const KernelTable& active() { return *g_active; }
void set_active(const KernelTable& table) { g_active = &table; }

const char* active_name() {
  if (g_active == &kScalarTable) return "scalar";
#ifdef FTS_X86
  if (g_active == &kAvx2Table) return "avx2";
#endif
#ifdef FTS_NEON
  if (g_active == &kNeonTable) return "neon";
#endif
  return "unknown";
}

}  // namespace fts::simd
