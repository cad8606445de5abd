// Compiled with -mavx2 -mfma. Only reached through the dispatcher after a CPU check.
#include "kernels_internal.hpp"

#include <immintrin.h>

#include <algorithm>
#include <vector>

namespace attrdesc::simd::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

// y[0..len) += s * x[0..len)
inline void axpy(double s, const double* x, double* y, std::size_t len) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t j = 0;
  for (; j + 8 <= len; j += 8) {
    __m256d y0 = _mm256_loadu_pd(y + j);
    __m256d y1 = _mm256_loadu_pd(y + j + 4);
    y0 = _mm256_fmadd_pd(vs, _mm256_loadu_pd(x + j), y0);
    y1 = _mm256_fmadd_pd(vs, _mm256_loadu_pd(x + j + 4), y1);
    _mm256_storeu_pd(y + j, y0);
    _mm256_storeu_pd(y + j + 4, y1);
  }
  for (; j + 4 <= len; j += 4) {
    _mm256_storeu_pd(y + j, _mm256_fmadd_pd(vs, _mm256_loadu_pd(x + j), _mm256_loadu_pd(y + j)));
  }
  for (; j < len; ++j) y[j] += s * x[j];
}

inline double dot(const double* a, const double* b, std::size_t len) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t p = 0;
  for (; p + 8 <= len; p += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + p), _mm256_loadu_pd(b + p), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + p + 4), _mm256_loadu_pd(b + p + 4), acc1);
  }
  for (; p + 4 <= len; p += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + p), _mm256_loadu_pd(b + p), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; p < len; ++p) acc += a[p] * b[p];
  return acc;
}

void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n) {
  std::fill(c, c + m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) axpy(a[i * k + p], b + p * n, crow, n);
  }
}

void gemm_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] = dot(a + i * k, b + j * k, k);
}

void column_sums(const double* x, std::size_t n, std::size_t d, double* out) {
  std::fill(out, out + d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = x + r * d;
    std::size_t j = 0;
    for (; j + 4 <= d; j += 4)
      _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(out + j), _mm256_loadu_pd(row + j)));
    for (; j < d; ++j) out[j] += row[j];
  }
}

void centered_gram(const double* x, std::size_t n, std::size_t d, const double* mean, double* g) {
  std::fill(g, g + d * d, 0.0);
  std::vector<double> y(d);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = x + r * d;
    std::size_t j = 0;
    for (; j + 4 <= d; j += 4)
      _mm256_storeu_pd(y.data() + j,
                       _mm256_sub_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(mean + j)));
    for (; j < d; ++j) y[j] = row[j] - mean[j];
    for (std::size_t i = 0; i < d; ++i) axpy(y[i], y.data() + i, g + i * d + i, d - i);
  }
  mirror_upper(g, d);
}

}  // namespace

const KernelTable kAvx2Table{Isa::avx2, "avx2", gemm_nn, gemm_nt, column_sums, centered_gram};

}  // namespace attrdesc::simd::detail
