#include "kernels_internal.hpp"

#include <algorithm>
#include <vector>

namespace attrdesc::simd::detail {
namespace {

void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n) {
  std::fill(c, c + m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

void gemm_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      c[i * n + j] = acc;
    }
  }
}

void column_sums(const double* x, std::size_t n, std::size_t d, double* out) {
  std::fill(out, out + d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = x + r * d;
    for (std::size_t j = 0; j < d; ++j) out[j] += row[j];
  }
}

void centered_gram(const double* x, std::size_t n, std::size_t d, const double* mean, double* g) {
  std::fill(g, g + d * d, 0.0);
  std::vector<double> y(d);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = x + r * d;
    for (std::size_t j = 0; j < d; ++j) y[j] = row[j] - mean[j];
    for (std::size_t i = 0; i < d; ++i) {
      const double yi = y[i];
      double* grow = g + i * d;
      for (std::size_t j = i; j < d; ++j) grow[j] += yi * y[j];
    }
  }
  mirror_upper(g, d);
}

}  // namespace

void mirror_upper(double* g, std::size_t d) {
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) g[j * d + i] = g[i * d + j];
}

const KernelTable kScalarTable{Isa::scalar, "scalar", gemm_nn, gemm_nt, column_sums, centered_gram};

}  // namespace attrdesc::simd::detail
