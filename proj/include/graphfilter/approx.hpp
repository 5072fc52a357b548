#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "graphfilter/filter.hpp"

namespace graphfilter {

/// Low-pass jump: `high` below the threshold, `low` at and above it.
struct StepTarget {
  double threshold = 1.0;
  double low = 0.0;
  double high = 1.0;
};

/// Tabulated response, read by linear interpolation.
struct SampledTarget {
  std::vector<double> grid;
  std::vector<double> values;
};

struct ClosedFormTarget {
  std::function<double(double)> g;
  std::string id;
};

struct TargetSignal {
  std::variant<StepTarget, SampledTarget, ClosedFormTarget> kind;
  double lo = 0.0;
  double hi = 2.0;

  double operator()(double lambda) const;
};

TargetSignal step_target(double threshold = 1.0, double lo = 0.0, double hi = 2.0);
/// Target equal to a filter's own frequency response on the Laplacian axis.
TargetSignal preset_target(const FilterSpec& f, double lo = 0.0, double hi = 2.0);

/// Throws InvalidArgument unless lo < hi and a step threshold is interior.
void validate(const TargetSignal& t);

inline constexpr std::size_t kEvalGridSize = 1024;

/// A fitted response. `coeffs` holds monomials in lambda on the LapSym
/// basis; the Chebyshev representation in `num_cheb` / `den_cheb` (variable
/// mapped from [lo, hi] to [-1, 1], den_cheb[0] == 1) is what the error
/// figures are computed from, since high-degree monomials lose accuracy.
struct FitResult {
  FilterSpec coeffs;
  std::vector<double> num_cheb;
  std::vector<double> den_cheb;
  double lo = 0.0;
  double hi = 2.0;
  double max_error = 0.0;     // on the 1024-point uniform grid
  double rms_error = 0.0;     // on the same grid
  double fit_residual = 0.0;  // rms on the fitting nodes
  double condition = 0.0;
  std::size_t iterations = 0;

  double evaluate(double lambda) const;
};

/// Least squares on `grid_size` Chebyshev nodes. Needs grid_size >= K + 1.
FitResult fit_polynomial(const TargetSignal& target, std::size_t degree, std::size_t grid_size);

/// Sanathanan-Koerner reweighted least squares. The polynomial fit of
/// degree `num_degree` seeds the iteration and the best pole-free iterate
/// by fitting residual is returned.
FitResult fit_rational(const TargetSignal& target, std::size_t num_degree, std::size_t den_degree,
                       std::size_t grid_size);

enum class FitFamily { Polynomial, Rational };

struct ConvergenceRow {
  std::size_t degree = 0;
  double max_error = 0.0;
  double rms_error = 0.0;
};

/// Rational rows use num_degree = den_degree = degree. `slope` is the least
/// squares slope of log(max_error) against log(K) for polynomials and
/// against sqrt(K) for rationals.
struct ConvergenceStudy {
  FitFamily family = FitFamily::Polynomial;
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;
};

ConvergenceStudy convergence_study(const TargetSignal& target, FitFamily family,
                                   const std::vector<std::size_t>& degrees,
                                   std::size_t grid_size);

/// Least squares slope of y against x.
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace graphfilter
