// AVX2 variants. Compiled with -mavx2 but never -mfma: products and sums are
// rounded separately, matching the scalar reference lane by lane.

#include <immintrin.h>

#include "graphfilter/kernels.hpp"

namespace graphfilter::kernels::detail {
namespace {

void spmm_avx2(const CsrView& a, const double* x, std::size_t cols, double* y) {
  const std::size_t vec_end = cols & ~std::size_t{3};
  for (std::size_t r = 0; r < a.rows; ++r) {
    double* out = y + r * cols;
    for (std::size_t j = 0; j < cols; ++j) out[j] = 0.0;
    for (std::size_t k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k) {
      const double v = a.values[k];
      const __m256d vv = _mm256_set1_pd(v);
      const double* in = x + static_cast<std::size_t>(a.col_indices[k]) * cols;
      std::size_t j = 0;
      for (; j < vec_end; j += 4) {
        const __m256d acc = _mm256_loadu_pd(out + j);
        const __m256d prod = _mm256_mul_pd(vv, _mm256_loadu_pd(in + j));
        _mm256_storeu_pd(out + j, _mm256_add_pd(acc, prod));
      }
      for (; j < cols; ++j) out[j] += v * in[j];
    }
  }
}

void axpy_avx2(std::size_t n, double a, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void axpby_avx2(std::size_t n, double a, const double* x, double b, double* y) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ax = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    const __m256d by = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(ax, by));
  }
  for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double dot_avx2(std::size_t n, const double* x, const double* y) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i),
                                           _mm256_loadu_pd(y + i)));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sq_dist_avx2(std::size_t n, const double* x, const double* y) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

void rotate_avx2(std::size_t n, double c, double s, double* x, double* y) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d yi = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(x + i, _mm256_sub_pd(_mm256_mul_pd(vc, xi), _mm256_mul_pd(vs, yi)));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_mul_pd(vs, xi), _mm256_mul_pd(vc, yi)));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable t{Backend::Avx2, spmm_avx2,    axpy_avx2, axpby_avx2,
                             dot_avx2,      sq_dist_avx2, rotate_avx2};
  return t;
}

}  // namespace graphfilter::kernels::detail
