#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "graphfilter/dense.hpp"
#include "graphfilter/filter.hpp"
#include "graphfilter/graph.hpp"

namespace graphfilter {

/// Polynomial{1/(t+1), ...} of length t+1 on AdjRW. Throws IsolatedNode.
FilterSpec deepwalk_operator(const Graph& g, std::size_t t);

/// (1/p) I + P + (1/q)(P^2 - P) with P = D^-1 A, dense. p may be +inf.
Matrix node2vec_operator(const Graph& g, double p, double q);

struct WalkConfig {
  std::size_t window = 1;
  std::size_t num_walks = 1000;  // per start node
  std::size_t walk_length = 40;  // nodes per walk, >= window + 1
  std::uint64_t seed = 0;
  std::size_t budget = 10'000'000;  // cap on num_walks * num_nodes
  std::size_t threads = 0;          // 0: hardware concurrency
};

struct WalkCheck {
  Matrix empirical;
  Matrix expected;
  double max_abs_dev = 0.0;
};

/// Simulates weighted random walks and compares window co-occurrence
/// frequencies with the dense deepwalk operator. Every position with a full
/// window of `window` steps ahead is a source; its own node and the next
/// `window` nodes are counted, and each row is normalised by its total.
/// Start node s uses its own generator seeded with seed + s, so the result
/// does not depend on the thread count.
WalkCheck monte_carlo_walk_check(const Graph& g, const WalkConfig& cfg);

/// Sum over undirected edges of w_ij * ||Z_i - Z_j||^2.
double dirichlet_energy(const Graph& g, const FeatureMatrix& z);

/// Mean Euclidean distance over unordered row pairs.
double pairwise_spread(const FeatureMatrix& z);

struct SmoothingProfile {
  std::vector<std::size_t> depths;
  std::vector<double> energy;
  std::vector<double> pairwise_spread;
  bool connected = true;
};

/// Depth K of a linear or polynomial filter is K stacked applications.
/// A rational filter P/Q is run as the fixed-point map
/// Z <- P(B) X - (Q(B) - I) Z from Z = X, K times.
SmoothingProfile oversmoothing_profile(const Graph& g, const FeatureMatrix& x, const FilterSpec& f,
                                       const std::vector<std::size_t>& depths);

struct BenchRow {
  std::size_t nodes = 0;
  std::size_t nnz = 0;
  std::size_t order = 0;  // highest power of the basis applied
  std::size_t features = 0;
  double seconds = 0.0;   // median over repetitions
};

std::size_t filter_order(const FilterSpec& f);

/// Median wall time of one filter evaluation with the basis operator
/// prebuilt.
BenchRow bench_once(const FilterSpec& f, const Graph& g, const FeatureMatrix& x,
                    std::size_t repetitions);

/// One row per size on seeded random `degree`-regular graphs.
std::vector<BenchRow> bench_filter(const FilterSpec& f, const std::vector<std::size_t>& sizes,
                                   std::size_t features, std::size_t repetitions,
                                   std::size_t degree = 16, std::uint64_t seed = 1);

/// Uniform in [0, 1) from the top 53 bits.
double uniform01(std::uint64_t bits);

Graph random_regular_graph(std::size_t n, std::size_t d, std::uint64_t seed);
/// Random spanning tree plus `extra_edges` distinct chords. Weights are 1,
/// or uniform in [0.5, 2) when `weighted`.
Graph random_connected_graph(std::size_t n, std::size_t extra_edges, std::uint64_t seed,
                             bool weighted = false);
/// Entries uniform in [-1, 1).
FeatureMatrix random_features(std::size_t n, std::size_t f, std::uint64_t seed);

}  // namespace graphfilter
