#include "graphfilter/kernels.hpp"

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string>
#include <vector>

#include "graphfilter/error.hpp"

namespace graphfilter::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(GRAPHFILTER_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const std::vector<Backend>& backends() {
  static const std::vector<Backend> list = [] {
    std::vector<Backend> v{Backend::Scalar};
    if (cpu_has_avx2()) v.push_back(Backend::Avx2);
    return v;
  }();
  return list;
}

const KernelTable* initial_table() {
  const char* env = std::getenv("GRAPHFILTER_SIMD");
  if (env != nullptr) {
    const std::string want(env);
    if (want == "scalar") return &table(Backend::Scalar);
    if (want == "avx2" && is_available(Backend::Avx2)) return &table(Backend::Avx2);
  }
  return &table(backends().back());
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> ptr{initial_table()};
  return ptr;
}

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
  }
  return "unknown";
}

std::span<const Backend> available_backends() { return backends(); }

bool is_available(Backend b) {
  for (Backend x : backends())
    if (x == b) return true;
  return false;
}

const KernelTable& table(Backend b) {
  if (!is_available(b)) {
    throw Error(ErrorCode::InvalidArgument,
                "kernel backend not available: " + std::string(backend_name(b)));
  }
  switch (b) {
    case Backend::Scalar:
      return detail::scalar_table();
    case Backend::Avx2:
#if defined(GRAPHFILTER_HAVE_AVX2)
      return detail::avx2_table();
#else
      break;
#endif
  }
  return detail::scalar_table();
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void select(Backend b) { current().store(&table(b), std::memory_order_release); }

void spmm(const CsrView& a, std::span<const double> x, std::size_t cols,
          std::span<double> y) {
  assert(y.size() == a.rows * cols);
  active().spmm(a, x.data(), cols, y.data());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(y.size(), a, x.data(), y.data());
}

void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpby(y.size(), a, x.data(), b, y.data());
}

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return active().dot(x.size(), x.data(), y.data());
}

double sq_dist(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return active().sq_dist(x.size(), x.data(), y.data());
}

void rotate(double c, double s, std::span<double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().rotate(x.size(), c, s, x.data(), y.data());
}

}  // namespace graphfilter::kernels
