#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "graphfilter/analysis.hpp"
#include "graphfilter/filter.hpp"
#include "graphfilter/graph.hpp"
#include "graphfilter/kernels.hpp"

using namespace graphfilter;
namespace k = graphfilter::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = 2.0 * uniform01(rng()) - 1.0;
  return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Restores the process-wide backend after a test that switches it.
struct BackendGuard {
  k::Backend saved = k::active().backend;
  ~BackendGuard() { k::select(saved); }
};

}  // namespace

TEST_CASE("scalar backend is always available and listed first") {
  const auto b = k::available_backends();
  REQUIRE(!b.empty());
  CHECK(b[0] == k::Backend::Scalar);
  CHECK(k::is_available(k::Backend::Scalar));
  CHECK(k::table(k::Backend::Scalar).backend == k::Backend::Scalar);
}

TEST_CASE("scalar kernels match hand values") {
  const auto& t = k::table(k::Backend::Scalar);
  std::vector<double> x{1, 2, 3};
  std::vector<double> y{4, 5, 6};
  CHECK(t.dot(3, x.data(), y.data()) == 32.0);
  CHECK(t.sq_dist(3, x.data(), y.data()) == 27.0);
  t.axpy(3, 2.0, x.data(), y.data());
  CHECK(y == std::vector<double>{6, 9, 12});
  t.axpby(3, 1.0, x.data(), -1.0, y.data());
  CHECK(y == std::vector<double>{-5, -7, -9});
  std::vector<double> a{1, 0};
  std::vector<double> b{0, 1};
  t.rotate(2, 0.0, 1.0, a.data(), b.data());
  CHECK(a == std::vector<double>{0, -1});
  CHECK(b == std::vector<double>{1, 0});
}

TEST_CASE("every backend matches the scalar reference") {
  const auto& ref = k::table(k::Backend::Scalar);
  for (k::Backend be : k::available_backends()) {
    CAPTURE(k::backend_name(be));
    const auto& t = k::table(be);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 13u, 16u, 31u, 64u, 257u}) {
      CAPTURE(n);
      const auto x = random_vec(n, 11 + n);
      const auto y0 = random_vec(n, 97 + n);

      auto y_ref = y0;
      auto y_got = y0;
      ref.axpy(n, 0.37, x.data(), y_ref.data());
      t.axpy(n, 0.37, x.data(), y_got.data());
      CHECK(same_bits(y_ref, y_got));

      y_ref = y0;
      y_got = y0;
      ref.axpby(n, -1.25, x.data(), 0.5, y_ref.data());
      t.axpby(n, -1.25, x.data(), 0.5, y_got.data());
      CHECK(same_bits(y_ref, y_got));

      auto xr = x, yr = y0, xg = x, yg = y0;
      ref.rotate(n, 0.6, 0.8, xr.data(), yr.data());
      t.rotate(n, 0.6, 0.8, xg.data(), yg.data());
      CHECK(same_bits(xr, xg));
      CHECK(same_bits(yr, yg));

      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y0[i]);
      CHECK(std::abs(ref.dot(n, x.data(), y0.data()) - t.dot(n, x.data(), y0.data())) <=
            1e-14 * (mag + 1.0));
      const double sd = ref.sq_dist(n, x.data(), y0.data());
      CHECK(std::abs(sd - t.sq_dist(n, x.data(), y0.data())) <= 1e-14 * (sd + 1.0));
    }
  }
}

TEST_CASE("spmm is bit-identical across backends on random operators") {
  const auto& ref = k::table(k::Backend::Scalar);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Graph g = random_connected_graph(40, 60, seed, true);
    const SparseOperator op = normalized_adjacency(g, Scheme::AdjRenorm);
    for (std::size_t cols : {1u, 3u, 4u, 9u}) {
      const auto x = random_vec(40 * cols, seed * 100 + cols);
      std::vector<double> y_ref(40 * cols, 7.0);
      ref.spmm(op.view(), x.data(), cols, y_ref.data());
      for (k::Backend be : k::available_backends()) {
        std::vector<double> y(40 * cols, -3.0);
        k::table(be).spmm(op.view(), x.data(), cols, y.data());
        CHECK(same_bits(y_ref, y));
      }
    }
  }
}

TEST_CASE("filter output does not depend on the selected backend") {
  BackendGuard guard;
  const Graph g = random_connected_graph(30, 40, 3);
  const FeatureMatrix x = random_features(30, 5, 4);
  const FilterSpec f = make_preset("sgc", {{"K", 3}});
  k::select(k::Backend::Scalar);
  const FeatureMatrix z_ref = apply_filter(f, g, x);
  for (k::Backend be : k::available_backends()) {
    k::select(be);
    CHECK(apply_filter(f, g, x) == z_ref);
  }
}
