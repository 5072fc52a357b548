#include "graphfilter/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <utility>

#include "graphfilter/error.hpp"

namespace graphfilter {
namespace {

struct RowEntry {
  std::uint32_t col;
  double value;
};

SparseOperator from_rows(std::size_t n, const std::vector<std::vector<RowEntry>>& rows,
                         Scheme scheme, bool symmetric) {
  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;
  for (std::size_t r = 0; r < n; ++r) {
    for (const auto& e : rows[r]) {
      cols.push_back(e.col);
      vals.push_back(e.value);
    }
    offsets[r + 1] = cols.size();
  }
  return SparseOperator(n, std::move(offsets), std::move(cols), std::move(vals), scheme,
                        symmetric);
}

std::vector<double> inverse_or_zero(const std::vector<double>& d) {
  std::vector<double> out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i] > 0.0 ? 1.0 / d[i] : 0.0;
  return out;
}

std::vector<double> inverse_sqrt_or_zero(const std::vector<double>& d) {
  std::vector<double> out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    out[i] = d[i] > 0.0 ? 1.0 / std::sqrt(d[i]) : 0.0;
  return out;
}

// Builds the rows of A (or A + I when `self_loops`) scaled entrywise by
// left[i] * right[j]. A symmetric product left[i]*right[j] == left[j]*right[i]
// holds bitwise when left == right because multiplication commutes exactly.
std::vector<std::vector<RowEntry>> scaled_rows(const Graph& g, bool self_loops,
                                               const std::vector<double>& left,
                                               const std::vector<double>& right) {
  const std::size_t n = g.num_nodes();
  std::vector<std::vector<RowEntry>> rows(n);
  for (NodeId i = 0; i < n; ++i) {
    const auto nb = g.neighbors(i);
    const auto w = g.weights(i);
    auto& row = rows[i];
    row.reserve(nb.size() + (self_loops ? 1 : 0));
    bool diag_done = !self_loops;
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (!diag_done && nb[k] > i) {
        row.push_back({i, 1.0 * (left[i] * right[i])});
        diag_done = true;
      }
      row.push_back({nb[k], w[k] * (left[i] * right[nb[k]])});
    }
    if (!diag_done) row.push_back({i, 1.0 * (left[i] * right[i])});
  }
  return rows;
}

// I - M with the diagonal inserted in sorted position.
std::vector<std::vector<RowEntry>> identity_minus_rows(const SparseOperator& m) {
  const std::size_t n = m.num_nodes();
  const auto off = m.row_offsets();
  const auto cols = m.col_indices();
  const auto vals = m.values();
  std::vector<std::vector<RowEntry>> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = rows[i];
    bool diag_done = false;
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      const auto c = cols[k];
      if (!diag_done && c > i) {
        row.push_back({static_cast<std::uint32_t>(i), 1.0});
        diag_done = true;
      }
      if (c == i) {
        row.push_back({c, 1.0 - vals[k]});
        diag_done = true;
      } else {
        row.push_back({c, 0.0 - vals[k]});
      }
    }
    if (!diag_done) row.push_back({static_cast<std::uint32_t>(i), 1.0});
  }
  return rows;
}

std::string scheme_error(Scheme s, const char* what) {
  return std::string(what) + " does not accept scheme " + std::string(scheme_name(s));
}

}  // namespace

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId i = 0; i < num_nodes_; ++i) {
    const auto nb = neighbors(i);
    const auto w = weights(i);
    for (std::size_t k = 0; k < nb.size(); ++k)
      if (i < nb[k]) out.push_back({i, nb[k], w[k]});
  }
  return out;
}

bool Graph::has_isolated_nodes() const {
  for (NodeId i = 0; i < num_nodes_; ++i)
    if (degree_count(i) == 0) return true;
  return false;
}

bool Graph::is_connected() const {
  if (num_nodes_ == 0) return true;
  std::vector<char> seen(num_nodes_, 0);
  std::deque<NodeId> queue{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : neighbors(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        queue.push_back(v);
      }
    }
  }
  return count == num_nodes_;
}

bool Graph::is_bipartite() const {
  std::vector<int> color(num_nodes_, -1);
  for (NodeId s = 0; s < num_nodes_; ++s) {
    if (color[s] != -1) continue;
    color[s] = 0;
    std::deque<NodeId> queue{s};
    while (!queue.empty()) {
      const NodeId u = queue.front();
      queue.pop_front();
      for (NodeId v : neighbors(u)) {
        if (color[v] == -1) {
          color[v] = 1 - color[u];
          queue.push_back(v);
        } else if (color[v] == color[u]) {
          return false;
        }
      }
    }
  }
  return true;
}

Graph build_graph(std::span<const Edge> edges, std::optional<std::size_t> num_nodes) {
  std::size_t n = 0;
  if (num_nodes) {
    if (*num_nodes == 0) throw Error(ErrorCode::InvalidArgument, "num_nodes must be positive");
    n = *num_nodes;
  } else {
    if (edges.empty())
      throw Error(ErrorCode::InvalidArgument, "empty edge list needs an explicit node count");
    for (const auto& e : edges) n = std::max<std::size_t>(n, std::max(e.u, e.v) + std::size_t{1});
  }

  std::vector<std::vector<std::pair<NodeId, double>>> adj(n);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    if (e.u >= n || e.v >= n) {
      throw Error(ErrorCode::IndexOutOfRange,
                  "edge " + std::to_string(k) + " (" + std::to_string(e.u) + "," +
                      std::to_string(e.v) + ") outside [0," + std::to_string(n) + ")");
    }
    if (e.u == e.v) {
      throw Error(ErrorCode::SelfLoopInInput, "self-loop at node " + std::to_string(e.u));
    }
    if (!std::isfinite(e.w) || e.w < 0.0) {
      throw Error(ErrorCode::InvalidWeight, "edge " + std::to_string(k) + " has weight " +
                                                std::to_string(e.w));
    }
    adj[e.u].emplace_back(e.v, e.w);
    adj[e.v].emplace_back(e.u, e.w);
  }

  Graph g;
  g.num_nodes_ = n;
  g.offsets_.assign(n + 1, 0);
  for (NodeId i = 0; i < n; ++i) {
    auto& row = adj[i];
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 1; k < row.size(); ++k) {
      if (row[k].first == row[k - 1].first) {
        throw Error(ErrorCode::DuplicateEdge, "duplicate edge (" + std::to_string(i) + "," +
                                                  std::to_string(row[k].first) + ")");
      }
    }
    for (const auto& [v, w] : row) {
      g.neighbors_.push_back(v);
      g.weights_.push_back(w);
    }
    g.offsets_[i + 1] = g.neighbors_.size();
  }
  return g;
}

std::vector<double> degree_vector(const Graph& g) {
  std::vector<double> d(g.num_nodes(), 0.0);
  for (NodeId i = 0; i < g.num_nodes(); ++i)
    for (double w : g.weights(i)) d[i] += w;
  return d;
}

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::AdjRaw: return "AdjRaw";
    case Scheme::AdjRW: return "AdjRW";
    case Scheme::AdjSym: return "AdjSym";
    case Scheme::AdjRenorm: return "AdjRenorm";
    case Scheme::AdjRWSelfLoop: return "AdjRWSelfLoop";
    case Scheme::LapUnnorm: return "LapUnnorm";
    case Scheme::LapSym: return "LapSym";
    case Scheme::LapRW: return "LapRW";
    case Scheme::Identity: return "Identity";
    case Scheme::Derived: return "Derived";
  }
  return "Unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::AdjRaw, Scheme::AdjRW, Scheme::AdjSym, Scheme::AdjRenorm,
                   Scheme::AdjRWSelfLoop, Scheme::LapUnnorm, Scheme::LapSym, Scheme::LapRW,
                   Scheme::Identity}) {
    if (scheme_name(s) == name) return s;
  }
  return std::nullopt;
}

bool is_adjacency_scheme(Scheme s) {
  return s == Scheme::AdjRaw || s == Scheme::AdjRW || s == Scheme::AdjSym ||
         s == Scheme::AdjRenorm || s == Scheme::AdjRWSelfLoop;
}

bool is_laplacian_scheme(Scheme s) {
  return s == Scheme::LapUnnorm || s == Scheme::LapSym || s == Scheme::LapRW;
}

bool is_symmetric_scheme(Scheme s) {
  return s == Scheme::AdjRaw || s == Scheme::AdjSym || s == Scheme::AdjRenorm ||
         s == Scheme::LapUnnorm || s == Scheme::LapSym || s == Scheme::Identity;
}

SparseOperator::SparseOperator(std::size_t n, std::vector<std::size_t> row_offsets,
                               std::vector<std::uint32_t> col_indices,
                               std::vector<double> values, Scheme scheme, bool symmetric)
    : n_(n),
      offsets_(std::move(row_offsets)),
      cols_(std::move(col_indices)),
      values_(std::move(values)),
      scheme_(scheme),
      symmetric_(symmetric) {
  if (offsets_.size() != n_ + 1 || cols_.size() != values_.size() ||
      offsets_.back() != values_.size()) {
    throw Error(ErrorCode::InvalidArgument, "inconsistent CSR arrays");
  }
}

double SparseOperator::at(std::size_t r, std::size_t c) const {
  const auto begin = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[r]);
  const auto end = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[r + 1]);
  const auto it = std::lower_bound(begin, end, static_cast<std::uint32_t>(c));
  if (it == end || *it != c) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

Matrix SparseOperator::to_dense() const {
  Matrix m(n_, n_);
  for (std::size_t r = 0; r < n_; ++r)
    for (std::size_t k = offsets_[r]; k < offsets_[r + 1]; ++k) m(r, cols_[k]) = values_[k];
  return m;
}

SparseOperator normalized_adjacency(const Graph& g, Scheme scheme) {
  const auto deg = degree_vector(g);
  const std::size_t n = g.num_nodes();
  const std::vector<double> ones(n, 1.0);
  switch (scheme) {
    case Scheme::AdjRW:
      return from_rows(n, scaled_rows(g, false, inverse_or_zero(deg), ones), scheme, false);
    case Scheme::AdjSym: {
      const auto s = inverse_sqrt_or_zero(deg);
      return from_rows(n, scaled_rows(g, false, s, s), scheme, true);
    }
    case Scheme::AdjRenorm: {
      std::vector<double> dh(deg);
      for (double& d : dh) d += 1.0;
      const auto s = inverse_sqrt_or_zero(dh);
      return from_rows(n, scaled_rows(g, true, s, s), scheme, true);
    }
    case Scheme::AdjRWSelfLoop: {
      std::vector<double> dh(deg);
      for (double& d : dh) d += 1.0;
      return from_rows(n, scaled_rows(g, true, inverse_or_zero(dh), ones), scheme, false);
    }
    default:
      throw Error(ErrorCode::UnsupportedScheme, scheme_error(scheme, "normalized_adjacency"));
  }
}

SparseOperator adjacency(const Graph& g) {
  const std::vector<double> ones(g.num_nodes(), 1.0);
  return from_rows(g.num_nodes(), scaled_rows(g, false, ones, ones), Scheme::AdjRaw, true);
}

SparseOperator laplacian(const Graph& g, Scheme scheme) {
  const std::size_t n = g.num_nodes();
  switch (scheme) {
    case Scheme::LapUnnorm: {
      const auto deg = degree_vector(g);
      std::vector<std::vector<RowEntry>> rows(n);
      for (NodeId i = 0; i < n; ++i) {
        const auto nb = g.neighbors(i);
        const auto w = g.weights(i);
        bool diag_done = false;
        for (std::size_t k = 0; k < nb.size(); ++k) {
          if (!diag_done && nb[k] > i) {
            rows[i].push_back({i, deg[i]});
            diag_done = true;
          }
          rows[i].push_back({nb[k], -w[k]});
        }
        if (!diag_done) rows[i].push_back({i, deg[i]});
      }
      return from_rows(n, rows, scheme, true);
    }
    case Scheme::LapSym:
      return from_rows(n, identity_minus_rows(normalized_adjacency(g, Scheme::AdjSym)), scheme,
                       true);
    case Scheme::LapRW:
      return from_rows(n, identity_minus_rows(normalized_adjacency(g, Scheme::AdjRW)), scheme,
                       false);
    default:
      throw Error(ErrorCode::UnsupportedScheme, scheme_error(scheme, "laplacian"));
  }
}

SparseOperator identity_operator(std::size_t n) {
  std::vector<std::size_t> off(n + 1);
  std::vector<std::uint32_t> cols(n);
  for (std::size_t i = 0; i <= n; ++i) off[i] = i;
  for (std::size_t i = 0; i < n; ++i) cols[i] = static_cast<std::uint32_t>(i);
  return SparseOperator(n, std::move(off), std::move(cols), std::vector<double>(n, 1.0),
                        Scheme::Identity, true);
}

SparseOperator basis_operator(const Graph& g, Scheme scheme) {
  switch (scheme) {
    case Scheme::AdjRaw:
      return adjacency(g);
    case Scheme::AdjRW:
    case Scheme::AdjSym:
    case Scheme::AdjRenorm:
    case Scheme::AdjRWSelfLoop:
      return normalized_adjacency(g, scheme);
    case Scheme::LapUnnorm:
    case Scheme::LapSym:
    case Scheme::LapRW:
      return laplacian(g, scheme);
    case Scheme::Identity:
      return identity_operator(g.num_nodes());
    case Scheme::Derived:
      break;
  }
  throw Error(ErrorCode::UnsupportedScheme, scheme_error(scheme, "basis_operator"));
}

SparseOperator identity_minus(const SparseOperator& m) {
  return from_rows(m.num_nodes(), identity_minus_rows(m), Scheme::Derived, m.symmetric());
}

double symmetry_defect(const SparseOperator& m) {
  double worst = 0.0;
  const auto off = m.row_offsets();
  const auto cols = m.col_indices();
  const auto vals = m.values();
  for (std::size_t r = 0; r < m.num_nodes(); ++r)
    for (std::size_t k = off[r]; k < off[r + 1]; ++k)
      worst = std::max(worst, std::abs(vals[k] - m.at(cols[k], r)));
  return worst;
}

void apply_into(const SparseOperator& op, const FeatureMatrix& x, FeatureMatrix& y) {
  if (op.num_nodes() != x.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "operator has " + std::to_string(op.num_nodes()) + " nodes, features have " +
                    std::to_string(x.rows()) + " rows");
  }
  if (y.rows() != x.rows() || y.cols() != x.cols()) y = FeatureMatrix(x.rows(), x.cols());
  kernels::spmm(op.view(), x.values(), x.cols(), y.values());
}

FeatureMatrix apply(const SparseOperator& op, const FeatureMatrix& x) {
  FeatureMatrix y;
  apply_into(op, x, y);
  return y;
}

}  // namespace graphfilter
