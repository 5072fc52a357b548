#include "graphfilter/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <utility>

#include "graphfilter/error.hpp"
#include "graphfilter/kernels.hpp"
#include "graphfilter/spectral.hpp"

namespace graphfilter {
namespace {

void require_no_isolated(const Graph& g, const char* what) {
  if (g.has_isolated_nodes())
    throw Error(ErrorCode::IsolatedNode, std::string(what) + " needs every node to have a neighbour");
}

// Counts for walks starting at nodes [begin, end).
void simulate_walks(const Graph& g, const std::vector<std::vector<double>>& cumulative,
                    const WalkConfig& cfg, std::size_t begin, std::size_t end,
                    std::vector<std::uint64_t>& counts) {
  const std::size_t n = g.num_nodes();
  std::vector<NodeId> walk(cfg.walk_length);
  for (std::size_t s = begin; s < end; ++s) {
    std::mt19937_64 rng(cfg.seed + s);
    for (std::size_t w = 0; w < cfg.num_walks; ++w) {
      walk[0] = static_cast<NodeId>(s);
      for (std::size_t i = 1; i < cfg.walk_length; ++i) {
        const NodeId cur = walk[i - 1];
        const auto& cum = cumulative[cur];
        const double r = uniform01(rng()) * cum.back();
        auto it = std::upper_bound(cum.begin(), cum.end(), r);
        if (it == cum.end()) --it;
        walk[i] = g.neighbors(cur)[static_cast<std::size_t>(it - cum.begin())];
      }
      for (std::size_t i = 0; i + cfg.window < cfg.walk_length; ++i) {
        std::uint64_t* row = counts.data() + static_cast<std::size_t>(walk[i]) * n;
        for (std::size_t j = i; j <= i + cfg.window; ++j) ++row[walk[j]];
      }
    }
  }
}

FeatureMatrix step_filter(const FilterSpec& f, const SparseOperator& basis, const Graph& g,
                          const FeatureMatrix& x) {
  if (const auto* lin = std::get_if<LinearFilter>(&f.family)) return apply_linear(*lin, basis, g, x);
  return apply_polynomial(std::get<PolynomialFilter>(f.family).coeffs, basis, x,
                          std::numeric_limits<std::size_t>::max());
}

}  // namespace

double uniform01(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

FilterSpec deepwalk_operator(const Graph& g, std::size_t t) {
  require_no_isolated(g, "deepwalk_operator");
  const double c = 1.0 / static_cast<double>(t + 1);
  return FilterSpec{PolynomialFilter{std::vector<double>(t + 1, c)}, Scheme::AdjRW, "deepwalk"};
}

Matrix node2vec_operator(const Graph& g, double p, double q) {
  if (!(p > 0.0) || !(q > 0.0))
    throw Error(ErrorCode::InvalidParam, "node2vec needs p > 0 and q > 0");
  require_no_isolated(g, "node2vec_operator");
  const Matrix pm = normalized_adjacency(g, Scheme::AdjRW).to_dense();
  const Matrix p2 = matmul(pm, pm);
  const double ip = 1.0 / p;
  const double iq = 1.0 / q;
  Matrix out(pm.rows(), pm.cols());
  for (std::size_t i = 0; i < pm.rows(); ++i) {
    for (std::size_t j = 0; j < pm.cols(); ++j)
      out(i, j) = pm(i, j) + iq * (p2(i, j) - pm(i, j));
    out(i, i) += ip;
  }
  return out;
}

WalkCheck monte_carlo_walk_check(const Graph& g, const WalkConfig& cfg) {
  if (cfg.window == 0 || cfg.num_walks == 0 || cfg.walk_length < cfg.window + 1) {
    throw Error(ErrorCode::InvalidConfig,
                "walk check needs window >= 1, num_walks >= 1 and walk_length >= window + 1");
  }
  const std::size_t n = g.num_nodes();
  if (cfg.num_walks > cfg.budget / std::max<std::size_t>(n, 1)) {
    throw Error(ErrorCode::BudgetExceeded, "num_walks * num_nodes exceeds the budget of " +
                                               std::to_string(cfg.budget));
  }
  require_no_isolated(g, "monte_carlo_walk_check");
  if (n > kDenseCap) throw Error(ErrorCode::TooLarge, "walk check limited to N <= 2048");

  std::vector<std::vector<double>> cumulative(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (double w : g.weights(static_cast<NodeId>(i))) cumulative[i].push_back(acc += w);
  }

  std::size_t threads = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, n);
  std::vector<std::vector<std::uint64_t>> shard_counts(threads,
                                                       std::vector<std::uint64_t>(n * n, 0));
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t begin = n * t / threads;
    const std::size_t end = n * (t + 1) / threads;
    pool.emplace_back(simulate_walks, std::cref(g), std::cref(cumulative), std::cref(cfg), begin,
                      end, std::ref(shard_counts[t]));
  }
  for (auto& th : pool) th.join();

  WalkCheck out;
  out.empirical = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t total = 0;
    for (std::size_t j = 0; j < n; ++j) {
      std::uint64_t c = 0;
      for (const auto& sc : shard_counts) c += sc[i * n + j];
      out.empirical(i, j) = static_cast<double>(c);
      total += c;
    }
    if (total > 0)
      for (double& v : out.empirical.row(i)) v /= static_cast<double>(total);
  }
  out.expected = dense_filter_matrix(deepwalk_operator(g, cfg.window), g);
  out.max_abs_dev = max_abs_diff(out.empirical, out.expected);
  return out;
}

double dirichlet_energy(const Graph& g, const FeatureMatrix& z) {
  if (z.rows() != g.num_nodes()) {
    throw Error(ErrorCode::DimensionMismatch,
                "graph has " + std::to_string(g.num_nodes()) + " nodes, Z has " +
                    std::to_string(z.rows()) + " rows");
  }
  double energy = 0.0;
  for (const Edge& e : g.edges()) energy += e.w * kernels::sq_dist(z.row(e.u), z.row(e.v));
  return energy;
}

double pairwise_spread(const FeatureMatrix& z) {
  const std::size_t n = z.rows();
  if (n < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) total += std::sqrt(kernels::sq_dist(z.row(i), z.row(j)));
  return total / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

SmoothingProfile oversmoothing_profile(const Graph& g, const FeatureMatrix& x, const FilterSpec& f,
                                       const std::vector<std::size_t>& depths) {
  validate(f);
  if (x.rows() != g.num_nodes())
    throw Error(ErrorCode::DimensionMismatch, "feature rows do not match the graph");
  if (depths.empty() || !std::is_sorted(depths.begin(), depths.end()))
    throw Error(ErrorCode::InvalidArgument, "depths must be non-empty and ascending");

  SmoothingProfile prof;
  prof.connected = g.is_connected();
  const SparseOperator basis = basis_operator(g, f.basis);

  const auto* rat = std::get_if<RationalFilter>(&f.family);
  FeatureMatrix px;
  std::vector<double> q_minus_i;
  if (rat != nullptr) {
    px = apply_polynomial(rat->num, basis, x, rat->num.size());
    q_minus_i.push_back(0.0);
    q_minus_i.insert(q_minus_i.end(), rat->den.begin(), rat->den.end());
  }

  FeatureMatrix z = x;
  std::size_t depth = 0;
  for (std::size_t target : depths) {
    for (; depth < target; ++depth) {
      if (rat != nullptr) {
        FeatureMatrix next = apply_polynomial(q_minus_i, basis, z, q_minus_i.size());
        axpby(1.0, px, -1.0, next);
        z = std::move(next);
      } else {
        z = step_filter(f, basis, g, z);
      }
    }
    prof.depths.push_back(target);
    prof.energy.push_back(dirichlet_energy(g, z));
    prof.pairwise_spread.push_back(pairwise_spread(z));
  }
  return prof;
}

std::size_t filter_order(const FilterSpec& f) {
  if (std::holds_alternative<LinearFilter>(f.family)) return 1;
  if (const auto* p = std::get_if<PolynomialFilter>(&f.family)) return p->coeffs.size() - 1;
  const auto& r = std::get<RationalFilter>(f.family);
  return std::max(r.num.size() - 1, r.den.size());
}

BenchRow bench_once(const FilterSpec& f, const Graph& g, const FeatureMatrix& x,
                    std::size_t repetitions) {
  validate(f);
  const SparseOperator basis = basis_operator(g, f.basis);
  std::vector<double> times;
  const std::size_t reps = std::max<std::size_t>(repetitions, 1);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    FeatureMatrix z;
    if (const auto* rat = std::get_if<RationalFilter>(&f.family)) {
      z = solve_rational(*rat, basis, x).z;
    } else {
      z = step_filter(f, basis, g, x);
    }
    const auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  std::sort(times.begin(), times.end());
  BenchRow row;
  row.nodes = g.num_nodes();
  row.nnz = basis.nnz();
  row.order = filter_order(f);
  row.features = x.cols();
  row.seconds = times[times.size() / 2];
  return row;
}

std::vector<BenchRow> bench_filter(const FilterSpec& f, const std::vector<std::size_t>& sizes,
                                   std::size_t features, std::size_t repetitions,
                                   std::size_t degree, std::uint64_t seed) {
  if (!std::is_sorted(sizes.begin(), sizes.end()))
    throw Error(ErrorCode::InvalidArgument, "bench sizes must be ascending");
  std::vector<BenchRow> rows;
  for (std::size_t n : sizes) {
    const Graph g = random_regular_graph(n, degree, seed + n);
    const FeatureMatrix x = random_features(n, features, seed + n + 1);
    rows.push_back(bench_once(f, g, x, repetitions));
  }
  return rows;
}

Graph random_regular_graph(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (d == 0 || d >= n || (n * d) % 2 != 0)
    throw Error(ErrorCode::InvalidArgument, "regular graph needs 0 < d < n and n*d even");
  std::mt19937_64 rng(seed);
  const auto pick = [&rng](std::size_t m) {
    return static_cast<std::size_t>(uniform01(rng()) * static_cast<double>(m));
  };
  constexpr std::size_t max_restarts = 1000;
  for (std::size_t attempt = 0; attempt < max_restarts; ++attempt) {
    std::vector<NodeId> stubs;
    stubs.reserve(n * d);
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t k = 0; k < d; ++k) stubs.push_back(static_cast<NodeId>(v));
    std::set<std::pair<NodeId, NodeId>> seen;
    std::vector<Edge> edges;
    std::size_t failures = 0;
    while (!stubs.empty() && failures < 100 * d + 1000) {
      const std::size_t i = pick(stubs.size());
      const std::size_t j = pick(stubs.size());
      const NodeId a = std::min(stubs[i], stubs[j]);
      const NodeId b = std::max(stubs[i], stubs[j]);
      if (i == j || a == b || seen.count({a, b}) != 0) {
        ++failures;
        continue;
      }
      failures = 0;
      seen.insert({a, b});
      edges.push_back({a, b, 1.0});
      const std::size_t hi = std::max(i, j);
      const std::size_t lo = std::min(i, j);
      stubs[hi] = stubs.back();
      stubs.pop_back();
      stubs[lo] = stubs.back();
      stubs.pop_back();
    }
    if (stubs.empty()) return build_graph(edges, n);
  }
  throw Error(ErrorCode::NotConverged, "could not pair stubs into a simple regular graph");
}

Graph random_connected_graph(std::size_t n, std::size_t extra_edges, std::uint64_t seed,
                             bool weighted) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "connected graph needs n >= 2");
  const std::size_t max_extra = n * (n - 1) / 2 - (n - 1);
  if (extra_edges > max_extra) throw Error(ErrorCode::InvalidArgument, "too many extra edges");
  std::mt19937_64 rng(seed);
  const auto pick = [&rng](std::size_t m) {
    return static_cast<std::size_t>(uniform01(rng()) * static_cast<double>(m));
  };
  const auto weight = [&]() { return weighted ? 0.5 + 1.5 * uniform01(rng()) : 1.0; };
  std::set<std::pair<NodeId, NodeId>> seen;
  std::vector<Edge> edges;
  for (std::size_t v = 1; v < n; ++v) {
    const auto u = static_cast<NodeId>(pick(v));
    seen.insert({u, static_cast<NodeId>(v)});
    edges.push_back({u, static_cast<NodeId>(v), weight()});
  }
  while (edges.size() < n - 1 + extra_edges) {
    auto a = static_cast<NodeId>(pick(n));
    auto b = static_cast<NodeId>(pick(n));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second) continue;
    edges.push_back({a, b, weight()});
  }
  return build_graph(edges, n);
}

FeatureMatrix random_features(std::size_t n, std::size_t f, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FeatureMatrix x(n, f);
  for (double& v : x.values()) v = 2.0 * uniform01(rng()) - 1.0;
  return x;
}

}  // namespace graphfilter
