// Reference kernels. Plain loops, one rounding per operation; every SIMD
// variant is checked against these.

#include "graphfilter/kernels.hpp"

namespace graphfilter::kernels::detail {
namespace {

void spmm_scalar(const CsrView& a, const double* x, std::size_t cols, double* y) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    double* out = y + r * cols;
    for (std::size_t j = 0; j < cols; ++j) out[j] = 0.0;
    for (std::size_t k = a.row_offsets[r]; k < a.row_offsets[r + 1]; ++k) {
      const double v = a.values[k];
      const double* in = x + static_cast<std::size_t>(a.col_indices[k]) * cols;
      for (std::size_t j = 0; j < cols; ++j) out[j] += v * in[j];
    }
  }
}

void axpy_scalar(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpby_scalar(std::size_t n, double a, const double* x, double b, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

double dot_scalar(std::size_t n, const double* x, const double* y) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sq_dist_scalar(std::size_t n, const double* x, const double* y) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

void rotate_scalar(std::size_t n, double c, double s, double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{Backend::Scalar, spmm_scalar,   axpy_scalar,
                             axpby_scalar,    dot_scalar,    sq_dist_scalar,
                             rotate_scalar};
  return t;
}

}  // namespace graphfilter::kernels::detail
