#include "graphfilter/filter.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string>

#include "graphfilter/error.hpp"
#include "graphfilter/kernels.hpp"

namespace graphfilter {
namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x))
      throw Error(ErrorCode::InvalidParam, std::string(what) + " has a non-finite value");
}

double get_param(const ParamMap& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void reject_unknown(const ParamMap& params, std::string_view model,
                    const std::set<std::string>& allowed, const std::string& indexed_prefix = {}) {
  for (const auto& [key, value] : params) {
    if (allowed.count(key)) continue;
    if (!indexed_prefix.empty() && key.rfind(indexed_prefix, 0) == 0) continue;
    throw Error(ErrorCode::InvalidParam,
                "unknown parameter '" + key + "' for model " + std::string(model));
  }
}

// Reads prefix{first}, prefix{first+1}, ... until a gap; any other indexed
// key is an error.
std::vector<double> indexed_params(const ParamMap& params, std::string_view model,
                                   const std::string& prefix, int first) {
  std::vector<double> out;
  for (int k = first;; ++k) {
    const auto it = params.find(prefix + std::to_string(k));
    if (it == params.end()) break;
    out.push_back(it->second);
  }
  std::size_t seen = 0;
  for (const auto& entry : params)
    if (entry.first.rfind(prefix, 0) == 0) ++seen;
  if (seen != out.size()) {
    throw Error(ErrorCode::InvalidParam, std::string(model) + ": " + prefix +
                                             " indices must be consecutive from " +
                                             std::to_string(first));
  }
  if (out.empty()) {
    throw Error(ErrorCode::InvalidParam, std::string(model) + " needs " + prefix +
                                             std::to_string(first) + ", " + prefix +
                                             std::to_string(first + 1) + ", ...");
  }
  return out;
}

FilterSpec spec(LinearFilter f, Scheme basis, std::string name) {
  return FilterSpec{f, basis, std::move(name)};
}
FilterSpec spec(PolynomialFilter f, Scheme basis, std::string name) {
  return FilterSpec{std::move(f), basis, std::move(name)};
}
FilterSpec spec(RationalFilter f, Scheme basis, std::string name) {
  return FilterSpec{std::move(f), basis, std::move(name)};
}

// Polynomial product, coefficients ascending.
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

bool is_identity_filter(const FilterSpec& f) {
  const auto* lin = std::get_if<LinearFilter>(&f.family);
  return lin != nullptr && lin->self_term == SelfTerm::Identity && lin->phi == 1.0 &&
         lin->psi == 0.0;
}

std::vector<double> as_polynomial(const FilterSpec& f) {
  if (const auto* lin = std::get_if<LinearFilter>(&f.family)) {
    if (lin->self_term == SelfTerm::SelfLoopDegreeInverse) {
      // phi == psi collapses to psi * (D+I)^-1 (I + A), a multiple of the basis.
      if (lin->phi != lin->psi) {
        throw Error(ErrorCode::UnsupportedFamily,
                    "mean-aggregator filter with phi != psi is not a polynomial in its basis");
      }
      return {0.0, lin->psi};
    }
    return {lin->phi, lin->psi};
  }
  if (const auto* poly = std::get_if<PolynomialFilter>(&f.family)) return poly->coeffs;
  throw Error(ErrorCode::UnsupportedFamily, "compose does not support rational filters");
}

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Linear: return "linear";
    case Family::Polynomial: return "polynomial";
    case Family::Rational: return "rational";
  }
  return "unknown";
}

std::string_view method_name(SolveMethod m) {
  switch (m) {
    case SolveMethod::Auto: return "auto";
    case SolveMethod::FixedPoint: return "fixed_point";
    case SolveMethod::ConjugateGradient: return "conjugate_gradient";
    case SolveMethod::DenseDirect: return "dense_direct";
  }
  return "unknown";
}

void validate(const FilterSpec& f) {
  if (f.basis == Scheme::Derived)
    throw Error(ErrorCode::InvalidParam, "filter basis must be a graph scheme");
  std::visit(
      [&](const auto& fam) {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, LinearFilter>) {
          require_finite(std::array{fam.phi, fam.psi}, "linear filter");
          if (fam.self_term == SelfTerm::SelfLoopDegreeInverse &&
              f.basis != Scheme::AdjRWSelfLoop) {
            throw Error(ErrorCode::InvalidParam,
                        "the (D+I)^-1 self term requires the AdjRWSelfLoop basis");
          }
        } else if constexpr (std::is_same_v<T, PolynomialFilter>) {
          if (fam.coeffs.empty())
            throw Error(ErrorCode::InvalidParam, "polynomial filter needs coefficients");
          require_finite(fam.coeffs, "polynomial coefficients");
        } else {
          if (fam.num.empty())
            throw Error(ErrorCode::InvalidParam, "rational filter needs numerator coefficients");
          require_finite(fam.num, "numerator coefficients");
          require_finite(fam.den, "denominator coefficients");
        }
      },
      f.family);
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"gcn",  "sage", "gin",   "chebnet", "dcnn",
                                              "sgc",  "ar_lp", "ppnp", "arma"};
  return names;
}

std::vector<double> chebyshev_to_adjacency(const std::vector<double>& theta) {
  if (theta.empty()) return {};
  // T_0 = 1, T_1(y) = y, T_{k+1} = 2 y T_k - T_{k-1}, with y = -x.
  std::vector<double> out(theta.size(), 0.0);
  std::vector<double> prev{1.0};
  std::vector<double> cur{0.0, -1.0};
  out[0] += theta[0];
  for (std::size_t k = 1; k < theta.size(); ++k) {
    for (std::size_t j = 0; j < cur.size(); ++j) out[j] += theta[k] * cur[j];
    std::vector<double> next(cur.size() + 1, 0.0);
    for (std::size_t j = 0; j < cur.size(); ++j) next[j + 1] += -2.0 * cur[j];
    for (std::size_t j = 0; j < prev.size(); ++j) next[j] -= prev[j];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return out;
}

FilterSpec make_preset(std::string_view name, const ParamMap& params) {
  const std::string model(name);
  if (model == "gcn") {
    reject_unknown(params, name, {});
    return spec(LinearFilter{0.0, 1.0}, Scheme::AdjRenorm, model);
  }
  if (model == "sage") {
    reject_unknown(params, name, {});
    return spec(LinearFilter{1.0, 1.0, SelfTerm::SelfLoopDegreeInverse}, Scheme::AdjRWSelfLoop,
                model);
  }
  if (model == "gin") {
    reject_unknown(params, name, {"eps"});
    const double eps = get_param(params, "eps", 0.0);
    require_finite(std::array{eps}, "gin eps");
    return spec(LinearFilter{1.0 + eps, 1.0}, Scheme::AdjRaw, model);
  }
  if (model == "chebnet") {
    reject_unknown(params, name, {}, "theta");
    const auto theta = indexed_params(params, name, "theta", 0);
    require_finite(theta, "chebnet theta");
    return spec(PolynomialFilter{chebyshev_to_adjacency(theta)}, Scheme::AdjSym, model);
  }
  if (model == "dcnn") {
    reject_unknown(params, name, {}, "psi");
    auto psi = indexed_params(params, name, "psi", 1);
    require_finite(psi, "dcnn psi");
    psi.insert(psi.begin(), 0.0);
    return spec(PolynomialFilter{std::move(psi)}, Scheme::AdjRW, model);
  }
  if (model == "sgc") {
    reject_unknown(params, name, {"K"});
    const double k = get_param(params, "K", 2.0);
    if (!(k >= 0.0) || std::floor(k) != k || k > 1e6)
      throw Error(ErrorCode::InvalidParam, "sgc K must be a non-negative integer");
    std::vector<double> coeffs(static_cast<std::size_t>(k) + 1, 0.0);
    coeffs.back() = 1.0;
    return spec(PolynomialFilter{std::move(coeffs)}, Scheme::AdjRenorm, model);
  }
  if (model == "ar_lp") {
    reject_unknown(params, name, {"alpha"});
    const double alpha = get_param(params, "alpha", 1.0);
    if (!(alpha > 0.0) || !std::isfinite(alpha))
      throw Error(ErrorCode::InvalidParam, "ar_lp alpha must be > 0");
    // ((1+alpha) I - alpha B)^-1 rescaled so the denominator bias is 1.
    return spec(RationalFilter{{1.0 / (1.0 + alpha)}, {-alpha / (1.0 + alpha)}}, Scheme::AdjRW,
                model);
  }
  if (model == "ppnp") {
    reject_unknown(params, name, {"alpha"});
    const double alpha = get_param(params, "alpha", 0.1);
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw Error(ErrorCode::InvalidParam, "ppnp alpha must lie in (0, 1]");
    return spec(RationalFilter{{alpha}, {-(1.0 - alpha)}}, Scheme::AdjRWSelfLoop, model);
  }
  if (model == "arma") {
    reject_unknown(params, name, {"a", "b"});
    const double a = get_param(params, "a", 0.5);
    const double b = get_param(params, "b", 0.5);
    if (!(std::abs(a) < 1.0)) throw Error(ErrorCode::InvalidParam, "arma needs |a| < 1");
    require_finite(std::array{b}, "arma b");
    return spec(RationalFilter{{b}, {-a}}, Scheme::AdjRWSelfLoop, model);
  }
  throw Error(ErrorCode::UnknownModel, "unknown model '" + model + "'");
}

FeatureMatrix apply_linear(const LinearFilter& f, const SparseOperator& basis, const Graph& g,
                           const FeatureMatrix& x) {
  FeatureMatrix z = apply(basis, x);
  if (f.self_term == SelfTerm::Identity) {
    axpby(f.phi, x, f.psi, z);
    return z;
  }
  // phi (D+I)^-1 X + psi (D+I)^-1 A X = psi B X + (phi - psi) (D+I)^-1 X
  if (g.num_nodes() != x.rows())
    throw Error(ErrorCode::DimensionMismatch, "graph and features disagree on node count");
  if (f.psi != 1.0) kernels::axpby(0.0, x.values(), f.psi, z.values());
  const double extra = f.phi - f.psi;
  if (extra != 0.0) {
    const auto deg = degree_vector(g);
    for (std::size_t i = 0; i < x.rows(); ++i)
      kernels::axpy(extra / (deg[i] + 1.0), x.row(i), z.row(i));
  }
  return z;
}

FeatureMatrix apply_linear(const FilterSpec& f, const Graph& g, const FeatureMatrix& x) {
  const auto* lin = std::get_if<LinearFilter>(&f.family);
  if (lin == nullptr) throw Error(ErrorCode::UnsupportedFamily, "apply_linear needs a linear filter");
  validate(f);
  return apply_linear(*lin, basis_operator(g, f.basis), g, x);
}

FeatureMatrix apply_polynomial(std::span<const double> coeffs, const SparseOperator& basis,
                               const FeatureMatrix& x, std::size_t max_order) {
  if (coeffs.empty()) throw Error(ErrorCode::InvalidParam, "polynomial filter needs coefficients");
  if (coeffs.size() - 1 > max_order) {
    throw Error(ErrorCode::OrderTooLarge, "polynomial degree " + std::to_string(coeffs.size() - 1) +
                                              " exceeds the limit " + std::to_string(max_order));
  }
  if (basis.num_nodes() != x.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "operator has " + std::to_string(basis.num_nodes()) + " nodes, features have " +
                    std::to_string(x.rows()) + " rows");
  }
  FeatureMatrix z(x.rows(), x.cols());
  kernels::axpy(coeffs[0], x.values(), z.values());
  if (coeffs.size() == 1) return z;
  FeatureMatrix cur = x;
  FeatureMatrix next(x.rows(), x.cols());
  for (std::size_t j = 1; j < coeffs.size(); ++j) {
    apply_into(basis, cur, next);
    std::swap(cur, next);
    if (coeffs[j] != 0.0) kernels::axpy(coeffs[j], cur.values(), z.values());
  }
  return z;
}

FeatureMatrix apply_polynomial(const FilterSpec& f, const Graph& g, const FeatureMatrix& x,
                               std::size_t max_order) {
  const auto* poly = std::get_if<PolynomialFilter>(&f.family);
  if (poly == nullptr)
    throw Error(ErrorCode::UnsupportedFamily, "apply_polynomial needs a polynomial filter");
  validate(f);
  return apply_polynomial(poly->coeffs, basis_operator(g, f.basis), x, max_order);
}

FeatureMatrix apply_rational(const FilterSpec& f, const Graph& g, const FeatureMatrix& x,
                             const SolverOptions& opts) {
  const auto* rat = std::get_if<RationalFilter>(&f.family);
  if (rat == nullptr)
    throw Error(ErrorCode::UnsupportedFamily, "apply_rational needs a rational filter");
  validate(f);
  return solve_rational(*rat, basis_operator(g, f.basis), x, opts).z;
}

FeatureMatrix apply_filter(const FilterSpec& f, const Graph& g, const FeatureMatrix& x,
                           const SolverOptions& opts, std::size_t max_order) {
  switch (f.kind()) {
    case Family::Linear:
      return apply_linear(f, g, x);
    case Family::Polynomial:
      return apply_polynomial(f, g, x, max_order);
    case Family::Rational:
      return apply_rational(f, g, x, opts);
  }
  throw Error(ErrorCode::UnsupportedFamily, "unknown filter family");
}

FilterSpec compose(const FilterSpec& first, const FilterSpec& second) {
  if (is_identity_filter(first)) return second;
  if (is_identity_filter(second)) return first;
  if (first.basis != second.basis) {
    throw Error(ErrorCode::BasisMismatch, "cannot compose filters on " +
                                              std::string(scheme_name(first.basis)) + " and " +
                                              std::string(scheme_name(second.basis)));
  }
  return FilterSpec{PolynomialFilter{convolve(as_polynomial(first), as_polynomial(second))},
                    first.basis, "composed"};
}

double spectral_radius_bound(const SparseOperator& basis) {
  switch (basis.scheme()) {
    case Scheme::AdjRW:
    case Scheme::AdjSym:
    case Scheme::AdjRenorm:
    case Scheme::AdjRWSelfLoop:
    case Scheme::Identity:
      return 1.0;
    case Scheme::LapSym:
    case Scheme::LapRW:
      return 2.0;
    default:
      break;
  }
  double worst = 0.0;
  const auto off = basis.row_offsets();
  const auto vals = basis.values();
  for (std::size_t r = 0; r < basis.num_nodes(); ++r) {
    double s = 0.0;
    for (std::size_t k = off[r]; k < off[r + 1]; ++k) s += std::abs(vals[k]);
    worst = std::max(worst, s);
  }
  return worst;
}

}  // namespace graphfilter
