#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "graphfilter/dense.hpp"
#include "graphfilter/filter.hpp"
#include "graphfilter/graph.hpp"

namespace graphfilter {

inline constexpr std::size_t kDenseCap = 2048;

/// Eigenpairs of a symmetric operator: eigenvalues ascending, eigenvectors
/// as orthonormal columns in the same order.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;
  std::size_t sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm is at most
/// 1e-10 relative to the matrix norm.
SpectralDecomposition eigendecompose(const SparseOperator& op, std::size_t dense_cap = kDenseCap);
SpectralDecomposition eigendecompose(const Matrix& symmetric, std::size_t dense_cap = kDenseCap);

/// Which eigenvalue axis a response is stated on.
enum class ResponseAxis {
  Laplacian,     // normalised Laplacian eigenvalues, nominally [0, 2]
  RawAdjacency,  // eigenvalues of the unnormalised adjacency
  RawLaplacian,  // eigenvalues of D - A
};

std::string_view axis_name(ResponseAxis a);
ResponseAxis response_axis(Scheme basis);

struct ResponseCurve {
  std::vector<double> grid;
  std::vector<double> values;
  std::string closed_form_id;
  ResponseAxis axis = ResponseAxis::Laplacian;
};

/// g(lambda) for a filter. Adjacency-basis filters are read through
/// lambda_adj = 1 - lambda; raw-axis filters take lambda as the raw
/// eigenvalue. Throws UnsupportedBasis for a mean-aggregator filter with
/// phi != psi, which is not a function of the spectrum.
double response_at(const FilterSpec& f, double lambda);

/// `n` evenly spaced points on [lo, hi] inclusive.
std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

/// Samples response_at over a strictly increasing grid. On the Laplacian
/// axis the grid must lie in [0, 2].
ResponseCurve frequency_response(const FilterSpec& f, std::span<const double> grid);

/// Piecewise-linear read of a sampled curve; throws outside the grid.
double interpolate(const ResponseCurve& curve, double lambda);

/// Z = U diag(g(lambda_i)) U^T X.
FeatureMatrix spectral_apply(const std::function<double(double)>& g,
                             const SpectralDecomposition& dec, const FeatureMatrix& x);
FeatureMatrix spectral_apply(const ResponseCurve& curve, const SpectralDecomposition& dec,
                             const FeatureMatrix& x);

/// Dense N x N matrix of the filter, evaluated directly from its matrix
/// expression (dense powers, dense LU for the denominator).
Matrix dense_filter_matrix(const FilterSpec& f, const Graph& g, std::size_t dense_cap = kDenseCap);

struct EquivalenceReport {
  double max_rel_error = 0.0;
  bool pass = false;
  /// "spectral", or "dense_direct" when the basis cannot be symmetrised
  /// (random-walk bases on graphs with isolated nodes).
  std::string route;
  FeatureMatrix spatial;
  FeatureMatrix reference;
};

/// Spatial evaluation against the spectral one,
/// error = max|Z_s - Z_f| / max|Z_s|. Random-walk bases are handled through
/// their symmetric similar operator.
EquivalenceReport check_equivalence(const FilterSpec& f, const Graph& g, const FeatureMatrix& x,
                                    double tol, const SolverOptions& spatial_opts = {1000, 1e-13});

}  // namespace graphfilter
