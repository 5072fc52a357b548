#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "graphfilter/dense.hpp"
#include "graphfilter/graph.hpp"

namespace graphfilter {

/// What multiplies `phi` in a linear filter.
enum class SelfTerm {
  Identity,               // phi * I
  SelfLoopDegreeInverse,  // phi * (D+I)^-1, the mean-aggregator form
};

/// Z = phi * S X + psi * B X, with S from `self_term` and B the basis.
struct LinearFilter {
  double phi = 0.0;
  double psi = 0.0;
  SelfTerm self_term = SelfTerm::Identity;
  bool operator==(const LinearFilter&) const = default;
};

/// Z = sum_j coeffs[j] B^j X.
struct PolynomialFilter {
  std::vector<double> coeffs;
  bool operator==(const PolynomialFilter&) const = default;
};

/// Z = Q(B)^-1 P(B) X with P(x) = sum_j num[j] x^j and
/// Q(x) = 1 + sum_m den[m-1] x^m. The denominator bias is always 1.
struct RationalFilter {
  std::vector<double> num;
  std::vector<double> den;
  bool operator==(const RationalFilter&) const = default;
};

enum class Family { Linear, Polynomial, Rational };

struct FilterSpec {
  std::variant<LinearFilter, PolynomialFilter, RationalFilter> family;
  Scheme basis = Scheme::AdjSym;
  /// Preset name when built by make_preset, "custom" otherwise.
  std::string name = "custom";

  Family kind() const { return static_cast<Family>(family.index()); }
  bool operator==(const FilterSpec&) const = default;
};

std::string_view family_name(Family f);

/// Checks the structural invariants (non-empty coefficient lists, finite
/// values, a self-term only on the AdjRWSelfLoop basis); throws InvalidParam.
void validate(const FilterSpec& f);

using ParamMap = std::map<std::string, double>;

/// Recognised preset names, in canonical order.
const std::vector<std::string>& preset_names();

/// Builds the named model's filter.
///   gcn                     Linear{0, 1} on AdjRenorm
///   sage                    mean aggregator (D+I)^-1 (I + A) on AdjRWSelfLoop
///   gin     eps             Linear{1 + eps, 1} on AdjRaw
///   chebnet theta0..        sum theta_k T_k(L~), L~ = LapSym - I, on AdjSym
///   dcnn    psi1..          Polynomial{0, psi1, ...} on AdjRW
///   sgc     K               Polynomial{0, ..., 0, 1} on AdjRenorm
///   ar_lp   alpha           ((1 + alpha) I - alpha B)^-1 on AdjRW
///   ppnp    alpha           alpha (I - (1 - alpha) B)^-1 on AdjRWSelfLoop
///   arma    a, b            b (I - a B)^-1 on AdjRWSelfLoop
/// Missing scalar parameters take defaults (eps 0, K 2, alpha 0.1 for ppnp
/// and 1 for ar_lp, a = b = 0.5); chebnet and dcnn need their coefficients.
FilterSpec make_preset(std::string_view name, const ParamMap& params = {});

/// Monomial coefficients c with sum_k theta_k T_k(-x) = sum_j c_j x^j.
std::vector<double> chebyshev_to_adjacency(const std::vector<double>& theta);

inline constexpr std::size_t kDefaultMaxOrder = 128;

enum class SolveMethod { Auto, FixedPoint, ConjugateGradient, DenseDirect };

std::string_view method_name(SolveMethod m);

struct SolverOptions {
  std::size_t max_iterations = 1000;
  double tolerance = 1e-10;  // relative residual ||Q Z - P X|| / ||P X||
  SolveMethod method = SolveMethod::Auto;
  std::size_t dense_cap = 2048;
};

struct RationalSolve {
  FeatureMatrix z;
  SolveMethod method = SolveMethod::Auto;
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

FeatureMatrix apply_linear(const LinearFilter& f, const SparseOperator& basis,
                           const Graph& g, const FeatureMatrix& x);
FeatureMatrix apply_linear(const FilterSpec& f, const Graph& g, const FeatureMatrix& x);

/// Accumulates Y_j = B Y_{j-1} and Z += c_j Y_j, so the cost is one sparse
/// product per degree. Never forms a matrix power.
FeatureMatrix apply_polynomial(std::span<const double> coeffs, const SparseOperator& basis,
                               const FeatureMatrix& x,
                               std::size_t max_order = kDefaultMaxOrder);
FeatureMatrix apply_polynomial(const FilterSpec& f, const Graph& g, const FeatureMatrix& x,
                               std::size_t max_order = kDefaultMaxOrder);

RationalSolve solve_rational(const RationalFilter& f, const SparseOperator& basis,
                             const FeatureMatrix& x, const SolverOptions& opts = {});
FeatureMatrix apply_rational(const FilterSpec& f, const Graph& g, const FeatureMatrix& x,
                             const SolverOptions& opts = {});

/// Dispatches on the family.
FeatureMatrix apply_filter(const FilterSpec& f, const Graph& g, const FeatureMatrix& x,
                           const SolverOptions& opts = {},
                           std::size_t max_order = kDefaultMaxOrder);

/// ||Q(B) Z - P(B) X||_F / ||P(B) X||_F.
double rational_residual(const RationalFilter& f, const SparseOperator& basis,
                         const FeatureMatrix& x, const FeatureMatrix& z);

/// Product of two linear/polynomial filters on the same basis: applying the
/// result equals applying `second` and then `first`.
FilterSpec compose(const FilterSpec& first, const FilterSpec& second);

/// Upper bound on the spectral radius of a basis operator.
double spectral_radius_bound(const SparseOperator& basis);

}  // namespace graphfilter
