#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "graphfilter/dense.hpp"
#include "graphfilter/kernels.hpp"

namespace graphfilter {

using NodeId = std::uint32_t;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double w = 1.0;
};

/// Immutable undirected weighted graph. Both directions of every edge are
/// stored (row-compressed, neighbours sorted), and the base graph never holds
/// self-loops.
class Graph {
 public:
  Graph() = default;

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  /// Undirected edge count.
  std::size_t num_edges() const noexcept { return neighbors_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId i) const {
    return {neighbors_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::span<const double> weights(NodeId i) const {
    return {weights_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::size_t degree_count(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }

  /// Each undirected edge once, u < v, ordered by (u, v).
  std::vector<Edge> edges() const;

  bool has_isolated_nodes() const;
  bool is_connected() const;
  bool is_bipartite() const;

 private:
  friend Graph build_graph(std::span<const Edge>, std::optional<std::size_t>);

  std::size_t num_nodes_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> neighbors_;
  std::vector<double> weights_;
};

/// Applies the symmetric closure. Rejects self-loops, repeated pairs (in
/// either orientation), out-of-range indices and negative or non-finite
/// weights. `num_nodes` defaults to the largest index + 1.
Graph build_graph(std::span<const Edge> edges,
                  std::optional<std::size_t> num_nodes = std::nullopt);

/// Weighted degree per node.
std::vector<double> degree_vector(const Graph& g);

enum class Scheme {
  AdjRaw,         // A
  AdjRW,          // D^-1 A
  AdjSym,         // D^-1/2 A D^-1/2
  AdjRenorm,      // (D+I)^-1/2 (A+I) (D+I)^-1/2
  AdjRWSelfLoop,  // (D+I)^-1 (A+I)
  LapUnnorm,      // D - A
  LapSym,         // I - AdjSym
  LapRW,          // I - AdjRW
  Identity,
  Derived,        // produced by operator arithmetic, not by a graph scheme
};

std::string_view scheme_name(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);

bool is_adjacency_scheme(Scheme s);
bool is_laplacian_scheme(Scheme s);
/// Schemes whose matrix is symmetric for every graph.
bool is_symmetric_scheme(Scheme s);

/// Row-compressed sparse operator tagged with the scheme that produced it.
class SparseOperator {
 public:
  SparseOperator() = default;
  SparseOperator(std::size_t n, std::vector<std::size_t> row_offsets,
                 std::vector<std::uint32_t> col_indices, std::vector<double> values,
                 Scheme scheme, bool symmetric);

  std::size_t num_nodes() const noexcept { return n_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  Scheme scheme() const noexcept { return scheme_; }
  bool symmetric() const noexcept { return symmetric_; }

  std::span<const std::size_t> row_offsets() const noexcept { return offsets_; }
  std::span<const std::uint32_t> col_indices() const noexcept { return cols_; }
  std::span<const double> values() const noexcept { return values_; }

  kernels::CsrView view() const noexcept {
    return {n_, offsets_.data(), cols_.data(), values_.data()};
  }

  /// Entry (r, c), zero when not stored.
  double at(std::size_t r, std::size_t c) const;
  Matrix to_dense() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> cols_;
  std::vector<double> values_;
  Scheme scheme_ = Scheme::Derived;
  bool symmetric_ = false;
};

/// AdjRW, AdjSym, AdjRenorm or AdjRWSelfLoop. Degree-zero nodes get zero
/// rows (and zero columns for AdjSym).
SparseOperator normalized_adjacency(const Graph& g, Scheme scheme);

/// LapUnnorm, LapSym or LapRW.
SparseOperator laplacian(const Graph& g, Scheme scheme);

/// The raw weighted adjacency A.
SparseOperator adjacency(const Graph& g);

SparseOperator identity_operator(std::size_t n);

/// Any scheme except Derived.
SparseOperator basis_operator(const Graph& g, Scheme scheme);

/// I - M, computed entrywise from M's stored values.
SparseOperator identity_minus(const SparseOperator& m);

/// Largest |entry| of M - M^T.
double symmetry_defect(const SparseOperator& m);

/// Exact sparse-dense product op * X.
FeatureMatrix apply(const SparseOperator& op, const FeatureMatrix& x);

/// Same as apply(), writing into a preallocated `y` (resized if needed).
/// `y` must not alias `x`.
void apply_into(const SparseOperator& op, const FeatureMatrix& x, FeatureMatrix& y);

}  // namespace graphfilter
