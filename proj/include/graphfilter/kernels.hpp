#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace graphfilter::kernels {

/// Instruction-set variants of the inner loops. Every backend computes the
/// elementwise kernels (spmm, axpy, axpby, rotate) with the same operation
/// order as the scalar reference, so their results are bit-identical.
/// Reductions (dot, sq_dist) use lane-split partial sums and agree with the
/// scalar reference to rounding.
enum class Backend { Scalar, Avx2 };

std::string_view backend_name(Backend b);

/// Read-only view of a compressed-sparse-row matrix.
struct CsrView {
  std::size_t rows = 0;
  const std::size_t* row_offsets = nullptr;  // rows + 1 entries
  const std::uint32_t* col_indices = nullptr;
  const double* values = nullptr;
};

struct KernelTable {
  Backend backend;
  // y[r, :] = sum_k a[r, k] * x[k, :] for row-major x, y with `cols` columns.
  void (*spmm)(const CsrView& a, const double* x, std::size_t cols, double* y);
  // y += a * x
  void (*axpy)(std::size_t n, double a, const double* x, double* y);
  // y = a * x + b * y
  void (*axpby)(std::size_t n, double a, const double* x, double b, double* y);
  double (*dot)(std::size_t n, const double* x, const double* y);
  // sum_i (x_i - y_i)^2
  double (*sq_dist)(std::size_t n, const double* x, const double* y);
  // (x, y) <- (c*x - s*y, s*x + c*y)
  void (*rotate)(std::size_t n, double c, double s, double* x, double* y);
};

/// Backends compiled in and supported by the running CPU. Scalar is always
/// first.
std::span<const Backend> available_backends();

bool is_available(Backend b);

/// Table for a specific backend; throws InvalidArgument if unavailable.
const KernelTable& table(Backend b);

/// The process-wide table. Chosen on first use: the widest available
/// backend, unless GRAPHFILTER_SIMD names another one ("scalar", "avx2").
const KernelTable& active();

/// Override the process-wide choice (tests and benchmarks).
void select(Backend b);

// Span-based conveniences over active().
void spmm(const CsrView& a, std::span<const double> x, std::size_t cols,
          std::span<double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void axpby(double a, std::span<const double> x, double b, std::span<double> y);
double dot(std::span<const double> x, std::span<const double> y);
double sq_dist(std::span<const double> x, std::span<const double> y);
void rotate(double c, double s, std::span<double> x, std::span<double> y);

namespace detail {
const KernelTable& scalar_table();
#if defined(GRAPHFILTER_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
}  // namespace detail

}  // namespace graphfilter::kernels
