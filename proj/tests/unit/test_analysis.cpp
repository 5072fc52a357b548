#include <cmath>
#include <vector>

#include "doctest.h"
#include "graphfilter/analysis.hpp"
#include "graphfilter/error.hpp"
#include "graphfilter/spectral.hpp"
#include "oracle.hpp"

using namespace graphfilter;
using oracle::MatrixXd;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

const std::vector<Edge> kTriangle{{0, 1}, {1, 2}, {0, 2}};
const std::vector<Edge> kPair{{0, 1}};

}  // namespace

TEST_CASE("deepwalk operator coefficients") {
  const Graph k3 = build_graph(kTriangle);
  CHECK(std::get<PolynomialFilter>(deepwalk_operator(k3, 0).family).coeffs == std::vector<double>{1.0});
  const auto c = std::get<PolynomialFilter>(deepwalk_operator(k3, 2).family).coeffs;
  REQUIRE(c.size() == 3);
  for (double v : c) CHECK(v == doctest::Approx(1.0 / 3.0));
  const auto m = dense_filter_matrix(deepwalk_operator(build_graph(kPair), 1), build_graph(kPair));
  for (double v : m.values()) CHECK(v == doctest::Approx(0.5));
  CHECK(code_of([] { deepwalk_operator(build_graph(kPair, 3), 1); }) == ErrorCode::IsolatedNode);
}

TEST_CASE("deepwalk dense operator is row-stochastic") {
  const Graph g = random_connected_graph(20, 15, 8, true);
  for (std::size_t t : {1u, 3u, 6u}) {
    const auto m = dense_filter_matrix(deepwalk_operator(g, t), g);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      double s = 0.0;
      for (double v : m.row(i)) s += v;
      CHECK(std::abs(s - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("node2vec closed form") {
  const Graph g = random_connected_graph(12, 10, 5, true);
  const MatrixXd p = oracle::scheme(oracle::adjacency(12, g.edges()), Scheme::AdjRW);
  const MatrixXd id = MatrixXd::Identity(12, 12);
  CHECK(oracle::max_abs(oracle::to_eigen(node2vec_operator(g, 1, 1)) - (id + p * p)) <= 1e-12);
  CHECK(oracle::max_abs(oracle::to_eigen(node2vec_operator(g, INFINITY, 1)) - p * p) <= 1e-12);
  const Graph k3 = build_graph(kTriangle);
  const MatrixXd pk = oracle::scheme(oracle::adjacency(3, k3.edges()), Scheme::AdjRW);
  const MatrixXd want = 0.5 * MatrixXd::Identity(3, 3) + pk + 2.0 * (pk * pk - pk);
  CHECK(oracle::max_abs(oracle::to_eigen(node2vec_operator(k3, 2, 0.5)) - want) <= 1e-12);
  CHECK(code_of([&] { node2vec_operator(k3, 0, 1); }) == ErrorCode::InvalidParam);
}

TEST_CASE("walk check on K3 and on a single edge") {
  WalkConfig cfg;
  cfg.window = 1;
  cfg.num_walks = 50000;
  cfg.seed = 7;
  CHECK(monte_carlo_walk_check(build_graph(kTriangle), cfg).max_abs_dev <= 0.01);
  const auto pair = monte_carlo_walk_check(build_graph(kPair), cfg);
  CHECK(pair.max_abs_dev <= 0.01);
  for (double v : pair.empirical.values()) CHECK(std::abs(v - 0.5) <= 0.01);
}

TEST_CASE("walk check configuration errors") {
  const Graph k3 = build_graph(kTriangle);
  WalkConfig cfg;
  cfg.num_walks = 0;
  CHECK(code_of([&] { monte_carlo_walk_check(k3, cfg); }) == ErrorCode::InvalidConfig);
  cfg.num_walks = 10;
  cfg.walk_length = 1;
  CHECK(code_of([&] { monte_carlo_walk_check(k3, cfg); }) == ErrorCode::InvalidConfig);
  cfg.walk_length = 10;
  cfg.budget = 20;
  CHECK(code_of([&] { monte_carlo_walk_check(k3, cfg); }) == ErrorCode::BudgetExceeded);
}

TEST_CASE("walk check does not depend on the thread count") {
  const Graph g = random_connected_graph(10, 8, 2);
  WalkConfig cfg;
  cfg.num_walks = 500;
  cfg.window = 2;
  cfg.seed = 3;
  cfg.threads = 1;
  const auto one = monte_carlo_walk_check(g, cfg);
  cfg.threads = 4;
  CHECK(monte_carlo_walk_check(g, cfg).empirical == one.empirical);
}

TEST_CASE("Dirichlet energy") {
  const Graph pair = build_graph(kPair);
  Matrix z(2, 1);
  z(0, 0) = 1.0;
  CHECK(dirichlet_energy(pair, z) == 1.0);
  CHECK(dirichlet_energy(pair, Matrix(2, 3, 4.2)) == 0.0);
  const Graph g = random_connected_graph(3, 1, 4, true);
  const FeatureMatrix x = random_features(3, 4, 9);
  const MatrixXd l = oracle::scheme(oracle::adjacency(3, g.edges()), Scheme::LapUnnorm);
  const MatrixXd xe = oracle::to_eigen(x);
  CHECK(dirichlet_energy(g, x) == doctest::Approx((xe.transpose() * l * xe).trace()).epsilon(1e-13));
  CHECK(code_of([&] { dirichlet_energy(g, Matrix(2, 1)); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("energy is zero exactly for componentwise constant signals") {
  const Graph g = build_graph(std::vector<Edge>{{0, 1}, {1, 2}, {3, 4}});
  Matrix z(5, 1);
  z(0, 0) = z(1, 0) = z(2, 0) = 2.0;
  z(3, 0) = z(4, 0) = -1.0;
  CHECK(dirichlet_energy(g, z) == 0.0);
  z(4, 0) = 0.0;
  CHECK(dirichlet_energy(g, z) > 0.0);
}

TEST_CASE("profile at depth zero is the input energy") {
  const Graph g = random_connected_graph(16, 10, 3);
  const FeatureMatrix x = random_features(16, 4, 3);
  const auto p = oversmoothing_profile(g, x, make_preset("gcn"), {0});
  CHECK(p.energy[0] == dirichlet_energy(g, x));
  CHECK(p.pairwise_spread[0] == pairwise_spread(x));
}

TEST_CASE("ppnp fixed-point profile converges to the filter output") {
  const Graph g = random_connected_graph(16, 10, 5);
  const FeatureMatrix x = random_features(16, 2, 6);
  const FilterSpec f = make_preset("ppnp", {{"alpha", 0.5}});
  const auto p = oversmoothing_profile(g, x, f, {200});
  CHECK(p.energy[0] == doctest::Approx(dirichlet_energy(g, apply_filter(f, g, x))).epsilon(1e-10));
}

TEST_CASE("random graph generators") {
  const Graph r = random_regular_graph(100, 6, 1);
  for (NodeId i = 0; i < 100; ++i) CHECK(r.degree_count(i) == 6);
  CHECK(r.num_edges() == 300);
  const Graph c = random_connected_graph(30, 12, 2);
  CHECK(c.is_connected());
  CHECK(c.num_edges() == 41);
  CHECK(random_features(4, 3, 9) == random_features(4, 3, 9));
  CHECK_THROWS_AS(random_regular_graph(5, 3, 1), Error);
}

TEST_CASE("bench rows report structure") {
  const auto rows = bench_filter(make_preset("sgc", {{"K", 2}}), {64, 128}, 4, 3, 4, 1);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].nodes == 64);
  CHECK(rows[1].nnz > rows[0].nnz);
  CHECK(rows[0].order == 2);
  CHECK(rows[0].seconds > 0.0);
}
