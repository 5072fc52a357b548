#include "graphfilter/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "graphfilter/error.hpp"
#include "graphfilter/kernels.hpp"

namespace graphfilter {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

SpectralDecomposition jacobi(Matrix a) {
  const std::size_t n = a.rows();
  Matrix vt = Matrix::identity(n);  // row k holds eigenvector k
  const double scale = frobenius_norm(a);
  constexpr std::size_t max_sweeps = 100;

  std::size_t sweep = 0;
  double off = off_diagonal_norm(a);
  for (; sweep < max_sweeps && off > 1e-15 * scale; ++sweep) {
    std::size_t rotations = 0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300 || std::abs(apq) <= 1e-18 * scale) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double app = a(p, p) - t * apq;
        const double aqq = a(q, q) + t * apq;

        kernels::rotate(c, s, a.row(p), a.row(q));
        for (std::size_t r = 0; r < n; ++r) {
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        a(p, p) = app;
        a(q, q) = aqq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        kernels::rotate(c, s, vt.row(p), vt.row(q));
        ++rotations;
      }
    }
    off = off_diagonal_norm(a);
    if (rotations == 0) break;
  }
  if (off > 1e-10 * std::max(scale, 1e-300) && off > 0.0) {
    throw Error(ErrorCode::NotConverged, "Jacobi sweeps left off-diagonal norm " +
                                             std::to_string(off));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  SpectralDecomposition dec;
  dec.sweeps = sweep;
  dec.eigenvalues.resize(n);
  dec.eigenvectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    dec.eigenvalues[k] = a(order[k], order[k]);
    const auto v = vt.row(order[k]);
    for (std::size_t r = 0; r < n; ++r) dec.eigenvectors(r, k) = v[r];
  }
  return dec;
}

// The symmetric operator whose eigenvalues are the response axis for a
// basis, and the diagonal T with f(B) = T^-1 f(S) T when B is only similar
// to a symmetric operator.
struct SpectralSetup {
  SparseOperator op;
  std::optional<std::vector<double>> similarity;
};

std::optional<SpectralSetup> spectral_setup(Scheme basis, const Graph& g) {
  const auto sqrt_degrees = [&](double shift) -> std::optional<std::vector<double>> {
    auto d = degree_vector(g);
    for (double& v : d) {
      v += shift;
      if (!(v > 0.0)) return std::nullopt;
      v = std::sqrt(v);
    }
    return d;
  };
  switch (basis) {
    case Scheme::AdjSym:
    case Scheme::LapSym:
      return SpectralSetup{laplacian(g, Scheme::LapSym), std::nullopt};
    case Scheme::AdjRenorm:
      return SpectralSetup{identity_minus(normalized_adjacency(g, Scheme::AdjRenorm)),
                           std::nullopt};
    case Scheme::AdjRW:
    case Scheme::LapRW: {
      auto t = sqrt_degrees(0.0);
      if (!t) return std::nullopt;
      return SpectralSetup{laplacian(g, Scheme::LapSym), std::move(t)};
    }
    case Scheme::AdjRWSelfLoop:
      return SpectralSetup{identity_minus(normalized_adjacency(g, Scheme::AdjRenorm)),
                           sqrt_degrees(1.0)};
    case Scheme::AdjRaw:
      return SpectralSetup{adjacency(g), std::nullopt};
    case Scheme::LapUnnorm:
      return SpectralSetup{laplacian(g, Scheme::LapUnnorm), std::nullopt};
    case Scheme::Identity:
      return SpectralSetup{identity_minus(identity_operator(g.num_nodes())), std::nullopt};
    case Scheme::Derived:
      break;
  }
  return std::nullopt;
}

void scale_rows(FeatureMatrix& x, const std::vector<double>& s, bool invert) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double k = invert ? 1.0 / s[i] : s[i];
    for (double& v : x.row(i)) v *= k;
  }
}

// Dense polynomial in a dense matrix via Horner.
Eigen::MatrixXd dense_polynomial(std::span<const double> coeffs, const Eigen::MatrixXd& b) {
  const auto n = b.rows();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t j = coeffs.size(); j-- > 0;) {
    acc = (b * acc).eval();
    acc.diagonal().array() += coeffs[j];
  }
  return acc;
}

}  // namespace

SpectralDecomposition eigendecompose(const Matrix& m, std::size_t dense_cap) {
  if (m.rows() != m.cols())
    throw Error(ErrorCode::DimensionMismatch, "eigendecompose needs a square matrix");
  if (m.rows() > dense_cap) {
    throw Error(ErrorCode::TooLarge, "dense eigendecomposition limited to N <= " +
                                         std::to_string(dense_cap));
  }
  const double tol = 1e-12 * std::max(1.0, max_abs(m));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > tol)
        throw Error(ErrorCode::NotSymmetric, "matrix is not symmetric");
  return jacobi(m);
}

SpectralDecomposition eigendecompose(const SparseOperator& op, std::size_t dense_cap) {
  if (!op.symmetric()) {
    throw Error(ErrorCode::NotSymmetric,
                "operator " + std::string(scheme_name(op.scheme())) + " is not symmetric");
  }
  if (op.num_nodes() > dense_cap) {
    throw Error(ErrorCode::TooLarge, "dense eigendecomposition limited to N <= " +
                                         std::to_string(dense_cap));
  }
  return eigendecompose(op.to_dense(), dense_cap);
}

std::string_view axis_name(ResponseAxis a) {
  switch (a) {
    case ResponseAxis::Laplacian: return "laplacian";
    case ResponseAxis::RawAdjacency: return "raw_adjacency";
    case ResponseAxis::RawLaplacian: return "raw_laplacian";
  }
  return "unknown";
}

ResponseAxis response_axis(Scheme basis) {
  if (basis == Scheme::AdjRaw) return ResponseAxis::RawAdjacency;
  if (basis == Scheme::LapUnnorm) return ResponseAxis::RawLaplacian;
  return ResponseAxis::Laplacian;
}

double response_at(const FilterSpec& f, double lambda) {
  // Argument of the filter's polynomial(s) in its own basis.
  double x = lambda;
  if (is_adjacency_scheme(f.basis) && f.basis != Scheme::AdjRaw) x = 1.0 - lambda;
  if (f.basis == Scheme::Identity) x = 1.0 - lambda;

  const auto horner = [x](std::span<const double> c) {
    double acc = 0.0;
    for (std::size_t j = c.size(); j-- > 0;) acc = acc * x + c[j];
    return acc;
  };
  if (const auto* lin = std::get_if<LinearFilter>(&f.family)) {
    if (lin->self_term == SelfTerm::SelfLoopDegreeInverse) {
      if (lin->phi != lin->psi) {
        throw Error(ErrorCode::UnsupportedBasis,
                    "mean-aggregator filter with phi != psi has no frequency response");
      }
      return lin->psi * x;
    }
    return lin->phi + lin->psi * x;
  }
  if (const auto* poly = std::get_if<PolynomialFilter>(&f.family)) return horner(poly->coeffs);
  const auto& rat = std::get<RationalFilter>(f.family);
  const double q = 1.0 + x * horner(rat.den);
  return horner(rat.num) / q;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  if (n < 2 || !(hi > lo)) throw Error(ErrorCode::InvalidArgument, "grid needs n >= 2 and hi > lo");
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  grid.back() = hi;
  return grid;
}

ResponseCurve frequency_response(const FilterSpec& f, std::span<const double> grid) {
  validate(f);
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || (i > 0 && !(grid[i] > grid[i - 1])))
      throw Error(ErrorCode::InvalidArgument, "grid must be finite and strictly increasing");
  }
  ResponseCurve curve;
  curve.axis = response_axis(f.basis);
  if (curve.axis == ResponseAxis::Laplacian && (grid.front() < 0.0 || grid.back() > 2.0)) {
    throw Error(ErrorCode::InvalidArgument, "Laplacian-axis grid must lie in [0, 2]");
  }
  curve.closed_form_id = f.name;
  curve.grid.assign(grid.begin(), grid.end());
  curve.values.reserve(grid.size());
  for (double l : grid) {
    const double v = response_at(f, l);
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::PoleInDomain,
                  "response is not finite at lambda = " + std::to_string(l));
    }
    curve.values.push_back(v);
  }
  return curve;
}

double interpolate(const ResponseCurve& curve, double lambda) {
  const auto& g = curve.grid;
  // Eigenvalues computed in floating point can overshoot the grid ends by
  // rounding; accept that much and clamp.
  const double slack = g.empty() ? 0.0 : 1e-12 * std::max(1.0, g.back() - g.front());
  if (g.empty() || lambda < g.front() - slack || lambda > g.back() + slack) {
    throw Error(ErrorCode::InvalidArgument,
                "lambda " + std::to_string(lambda) + " outside the sampled grid");
  }
  auto it = std::upper_bound(g.begin(), g.end(), lambda);
  if (it == g.end()) return curve.values.back();
  const auto hi = static_cast<std::size_t>(it - g.begin());
  if (hi == 0) return curve.values.front();
  const std::size_t lo = hi - 1;
  const double w = (lambda - g[lo]) / (g[hi] - g[lo]);
  return (1.0 - w) * curve.values[lo] + w * curve.values[hi];
}

FeatureMatrix spectral_apply(const std::function<double(double)>& g,
                             const SpectralDecomposition& dec, const FeatureMatrix& x) {
  const Matrix& u = dec.eigenvectors;
  if (u.rows() != x.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "decomposition has " + std::to_string(u.rows()) + " nodes, features have " +
                    std::to_string(x.rows()) + " rows");
  }
  Matrix coeffs = matmul_transposed_left(u, x);  // U^T X
  for (std::size_t k = 0; k < coeffs.rows(); ++k) {
    const double gain = g(dec.eigenvalues[k]);
    for (double& v : coeffs.row(k)) v *= gain;
  }
  return matmul(u, coeffs);
}

FeatureMatrix spectral_apply(const ResponseCurve& curve, const SpectralDecomposition& dec,
                             const FeatureMatrix& x) {
  return spectral_apply([&](double l) { return interpolate(curve, l); }, dec, x);
}

Matrix dense_filter_matrix(const FilterSpec& f, const Graph& g, std::size_t dense_cap) {
  validate(f);
  const std::size_t n = g.num_nodes();
  if (n > dense_cap) throw Error(ErrorCode::TooLarge, "dense filter limited to N <= " +
                                                          std::to_string(dense_cap));
  const Matrix b_dense = basis_operator(g, f.basis).to_dense();
  const Eigen::MatrixXd b = Eigen::Map<const RowMajor>(b_dense.data(), static_cast<Eigen::Index>(n),
                                                       static_cast<Eigen::Index>(n));
  Eigen::MatrixXd out;
  if (const auto* lin = std::get_if<LinearFilter>(&f.family)) {
    out = lin->psi * b;
    if (lin->self_term == SelfTerm::Identity) {
      out.diagonal().array() += lin->phi;
    } else {
      const auto deg = degree_vector(g);
      const double extra = lin->phi - lin->psi;
      for (std::size_t i = 0; i < n; ++i)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += extra / (deg[i] + 1.0);
    }
  } else if (const auto* poly = std::get_if<PolynomialFilter>(&f.family)) {
    out = dense_polynomial(poly->coeffs, b);
  } else {
    const auto& rat = std::get<RationalFilter>(f.family);
    const Eigen::MatrixXd p = dense_polynomial(rat.num, b);
    std::vector<double> qc{1.0};
    qc.insert(qc.end(), rat.den.begin(), rat.den.end());
    const Eigen::MatrixXd q = dense_polynomial(qc, b);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(q);
    if (!(lu.rcond() > 1e-14))
      throw Error(ErrorCode::SingularDenominator, "Q(B) is singular to working precision");
    out = lu.solve(p);
  }
  Matrix result(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      result(i, j) = out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return result;
}

EquivalenceReport check_equivalence(const FilterSpec& f, const Graph& g, const FeatureMatrix& x,
                                    double tol, const SolverOptions& spatial_opts) {
  validate(f);
  if (g.num_nodes() != x.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "graph has " + std::to_string(g.num_nodes()) + " nodes, features have " +
                    std::to_string(x.rows()) + " rows");
  }
  if (g.num_nodes() > kDenseCap)
    throw Error(ErrorCode::TooLarge, "equivalence oracle limited to N <= 2048");
  if (const auto* lin = std::get_if<LinearFilter>(&f.family);
      lin != nullptr && lin->self_term == SelfTerm::SelfLoopDegreeInverse && lin->phi != lin->psi) {
    throw Error(ErrorCode::NotDiagonalizableByThisOracle,
                "mean-aggregator filter with phi != psi is not a spectral filter");
  }

  EquivalenceReport report;
  report.spatial = apply_filter(f, g, x, spatial_opts);

  auto setup = spectral_setup(f.basis, g);
  const bool rw_basis = f.basis == Scheme::AdjRW || f.basis == Scheme::LapRW ||
                        f.basis == Scheme::AdjRWSelfLoop;
  if (!setup || (rw_basis && !setup->similarity)) {
    if (!rw_basis) {
      throw Error(ErrorCode::NotDiagonalizableByThisOracle,
                  "no symmetric form for basis " + std::string(scheme_name(f.basis)));
    }
    report.route = "dense_direct";
    report.reference = matmul(dense_filter_matrix(f, g), x);
  } else {
    report.route = "spectral";
    const auto dec = eigendecompose(setup->op);
    FeatureMatrix xin = x;
    if (setup->similarity) scale_rows(xin, *setup->similarity, false);
    report.reference = spectral_apply([&](double l) { return response_at(f, l); }, dec, xin);
    if (setup->similarity) scale_rows(report.reference, *setup->similarity, true);
  }

  const double diff = max_abs_diff(report.spatial, report.reference);
  const double ref = max_abs(report.spatial);
  report.max_rel_error = ref > 0.0 ? diff / ref : diff;
  report.pass = report.max_rel_error <= tol;
  return report;
}

}  // namespace graphfilter
