#include "graphfilter/approx.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "graphfilter/error.hpp"
#include "graphfilter/spectral.hpp"

namespace graphfilter {
namespace {

constexpr double kMaxCondition = 1e12;
constexpr std::size_t kMaxSkIterations = 50;
constexpr double kWeightStagnation = 1e-8;
constexpr std::size_t kPoleSamples = 4097;

double to_unit(double lambda, double lo, double hi) {
  return (2.0 * lambda - lo - hi) / (hi - lo);
}

// Clenshaw summation of sum c_k T_k(u).
double clenshaw(const std::vector<double>& c, double u) {
  double b1 = 0.0;
  double b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    const double b0 = 2.0 * u * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return u * b1 - b2 + (c.empty() ? 0.0 : c[0]);
}

// T_0..T_{deg}(u) into out.
void chebyshev_row(double u, std::size_t deg, double* out) {
  out[0] = 1.0;
  if (deg >= 1) out[1] = u;
  for (std::size_t k = 2; k <= deg; ++k) out[k] = 2.0 * u * out[k - 1] - out[k - 2];
}

std::vector<double> chebyshev_nodes(double lo, double hi, std::size_t m) {
  std::vector<double> nodes(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double u = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.5) /
                              static_cast<double>(m));
    nodes[i] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * u;
  }
  return nodes;
}

// Monomial coefficients in lambda of sum c_k T_k(a lambda + b).
std::vector<double> chebyshev_to_monomial(const std::vector<double>& c, double lo, double hi) {
  const double a = 2.0 / (hi - lo);
  const double b = -(lo + hi) / (hi - lo);
  const std::size_t n = c.size();
  std::vector<double> out(n, 0.0);
  std::vector<double> prev(n, 0.0);  // T_{k-1} in lambda
  std::vector<double> cur(n, 0.0);   // T_k in lambda
  prev[0] = 1.0;
  if (n >= 1) out[0] += c[0];
  if (n >= 2) {
    cur[0] = b;
    cur[1] = a;
    for (std::size_t j = 0; j < n; ++j) out[j] += c[1] * cur[j];
  }
  for (std::size_t k = 2; k < n; ++k) {
    std::vector<double> next(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double v = 2.0 * b * cur[j] - prev[j];
      if (j > 0) v += 2.0 * a * cur[j - 1];
      next[j] = v;
    }
    for (std::size_t j = 0; j < n; ++j) out[j] += c[k] * next[j];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return out;
}

double condition_number(const Eigen::MatrixXd& a) {
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& rhs) {
  return Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(a).solve(rhs);
}

// Returns false when Q changes sign or nearly vanishes on [lo, hi].
bool denominator_pole_free(const std::vector<double>& den, double lo, double hi,
                           const std::vector<double>& extra_points) {
  double qmax = 0.0;
  double qmin_abs = std::numeric_limits<double>::infinity();
  int sign = 0;
  const auto visit = [&](double lambda) {
    const double q = clenshaw(den, to_unit(lambda, lo, hi));
    if (!std::isfinite(q)) return false;
    const int s = q > 0.0 ? 1 : (q < 0.0 ? -1 : 0);
    if (s == 0 || (sign != 0 && s != sign)) return false;
    sign = s;
    qmax = std::max(qmax, std::abs(q));
    qmin_abs = std::min(qmin_abs, std::abs(q));
    return true;
  };
  for (std::size_t i = 0; i < kPoleSamples; ++i) {
    const double lambda =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(kPoleSamples - 1);
    if (!visit(lambda)) return false;
  }
  for (double lambda : extra_points)
    if (!visit(lambda)) return false;
  return qmin_abs > 1e-12 * qmax;
}

double fit_grid_rms(const FitResult& r, const std::vector<double>& nodes,
                    const std::vector<double>& values) {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double e = r.evaluate(nodes[i]) - values[i];
    s += e * e;
  }
  return std::sqrt(s / static_cast<double>(nodes.size()));
}

void fill_errors(FitResult& r, const TargetSignal& target) {
  const auto grid = uniform_grid(target.lo, target.hi, kEvalGridSize);
  double max_err = 0.0;
  double sq = 0.0;
  for (double l : grid) {
    const double e = std::abs(r.evaluate(l) - target(l));
    max_err = std::max(max_err, e);
    sq += e * e;
  }
  r.max_error = max_err;
  r.rms_error = std::sqrt(sq / static_cast<double>(grid.size()));
}

void finalize_spec(FitResult& r, const std::string& name) {
  auto num = chebyshev_to_monomial(r.num_cheb, r.lo, r.hi);
  if (r.den_cheb.size() <= 1) {
    r.coeffs = FilterSpec{PolynomialFilter{std::move(num)}, Scheme::LapSym, name};
    return;
  }
  auto den = chebyshev_to_monomial(r.den_cheb, r.lo, r.hi);
  const double bias = den[0];
  if (!(std::abs(bias) > 1e-14 * std::abs(den.back())) || !std::isfinite(bias)) {
    throw Error(ErrorCode::IllConditioned,
                "fitted denominator vanishes at lambda = 0; cannot normalise its bias");
  }
  for (double& v : num) v /= bias;
  std::vector<double> tail(den.begin() + 1, den.end());
  for (double& v : tail) v /= bias;
  r.coeffs = FilterSpec{RationalFilter{std::move(num), std::move(tail)}, Scheme::LapSym, name};
}

void check_target(const TargetSignal& target, std::size_t grid_size, std::size_t unknowns) {
  validate(target);
  if (grid_size < unknowns) {
    throw Error(ErrorCode::InvalidArgument, "grid_size " + std::to_string(grid_size) +
                                                " is below the " + std::to_string(unknowns) +
                                                " unknowns of the fit");
  }
}

}  // namespace

double TargetSignal::operator()(double lambda) const {
  if (const auto* s = std::get_if<StepTarget>(&kind))
    return lambda < s->threshold ? s->high : s->low;
  if (const auto* c = std::get_if<ClosedFormTarget>(&kind)) return c->g(lambda);
  const auto& t = std::get<SampledTarget>(kind);
  ResponseCurve curve;
  curve.grid = t.grid;
  curve.values = t.values;
  return interpolate(curve, lambda);
}

TargetSignal step_target(double threshold, double lo, double hi) {
  TargetSignal t{StepTarget{threshold, 0.0, 1.0}, lo, hi};
  validate(t);
  return t;
}

TargetSignal preset_target(const FilterSpec& f, double lo, double hi) {
  validate(f);
  return TargetSignal{ClosedFormTarget{[f](double l) { return response_at(f, l); }, f.name}, lo,
                      hi};
}

void validate(const TargetSignal& t) {
  if (!(t.lo < t.hi) || !std::isfinite(t.lo) || !std::isfinite(t.hi))
    throw Error(ErrorCode::InvalidArgument, "target domain needs lo < hi");
  if (const auto* s = std::get_if<StepTarget>(&t.kind)) {
    if (!(s->threshold > t.lo && s->threshold < t.hi))
      throw Error(ErrorCode::InvalidArgument, "step threshold must lie strictly inside the domain");
  }
  if (const auto* s = std::get_if<SampledTarget>(&t.kind)) {
    if (s->grid.size() != s->values.size() || s->grid.size() < 2)
      throw Error(ErrorCode::InvalidArgument, "sampled target needs matching grid and values");
    if (s->grid.front() > t.lo || s->grid.back() < t.hi)
      throw Error(ErrorCode::InvalidArgument, "sampled target must cover the domain");
  }
  if (const auto* c = std::get_if<ClosedFormTarget>(&t.kind); c != nullptr && !c->g)
    throw Error(ErrorCode::InvalidArgument, "closed-form target has no function");
}

double FitResult::evaluate(double lambda) const {
  const double u = to_unit(lambda, lo, hi);
  const double p = clenshaw(num_cheb, u);
  return den_cheb.size() <= 1 ? p : p / clenshaw(den_cheb, u);
}

FitResult fit_polynomial(const TargetSignal& target, std::size_t degree, std::size_t grid_size) {
  check_target(target, grid_size, degree + 1);
  const auto nodes = chebyshev_nodes(target.lo, target.hi, grid_size);
  const auto m = static_cast<Eigen::Index>(grid_size);
  const auto cols = static_cast<Eigen::Index>(degree + 1);

  Eigen::MatrixXd a(m, cols);
  Eigen::VectorXd rhs(m);
  std::vector<double> values(grid_size);
  std::vector<double> row(degree + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    chebyshev_row(to_unit(nodes[ui], target.lo, target.hi), degree, row.data());
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = row[static_cast<std::size_t>(j)];
    values[ui] = target(nodes[ui]);
    rhs(i) = values[ui];
  }

  FitResult r;
  r.lo = target.lo;
  r.hi = target.hi;
  r.condition = condition_number(a);
  if (r.condition > kMaxCondition) {
    throw Error(ErrorCode::IllConditioned,
                "polynomial fit condition estimate " + std::to_string(r.condition));
  }
  const Eigen::VectorXd c = min_norm_solve(a, rhs);
  r.num_cheb.assign(c.data(), c.data() + c.size());
  r.den_cheb = {1.0};
  r.iterations = 1;
  r.fit_residual = fit_grid_rms(r, nodes, values);
  fill_errors(r, target);
  finalize_spec(r, "fit_polynomial");
  return r;
}

FitResult fit_rational(const TargetSignal& target, std::size_t num_degree, std::size_t den_degree,
                       std::size_t grid_size) {
  if (den_degree < 1) throw Error(ErrorCode::InvalidArgument, "den_degree must be >= 1");
  check_target(target, grid_size, num_degree + 1 + den_degree);

  // The polynomial (Q == 1) candidate is a member of the family and the
  // starting point for the reweighting.
  FitResult best = fit_polynomial(target, num_degree, grid_size);
  best.den_cheb.assign(den_degree + 1, 0.0);
  best.den_cheb[0] = 1.0;
  best.iterations = 0;

  const auto nodes = chebyshev_nodes(target.lo, target.hi, grid_size);
  const auto m = static_cast<Eigen::Index>(grid_size);
  const auto np = static_cast<Eigen::Index>(num_degree + 1);
  const auto nq = static_cast<Eigen::Index>(den_degree);
  const std::size_t max_deg = std::max(num_degree, den_degree);

  Eigen::MatrixXd basis(m, static_cast<Eigen::Index>(max_deg + 1));
  std::vector<double> values(grid_size);
  std::vector<double> row(max_deg + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    chebyshev_row(to_unit(nodes[ui], target.lo, target.hi), max_deg, row.data());
    for (std::size_t j = 0; j <= max_deg; ++j) basis(i, static_cast<Eigen::Index>(j)) = row[j];
    values[ui] = target(nodes[ui]);
  }

  Eigen::VectorXd weights = Eigen::VectorXd::Ones(m);
  std::size_t iteration = 0;
  for (; iteration < kMaxSkIterations; ++iteration) {
    Eigen::MatrixXd a(m, np + nq);
    Eigen::VectorXd rhs(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double inv_w = 1.0 / weights(i);
      const double gi = values[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < np; ++j) a(i, j) = basis(i, j) * inv_w;
      for (Eigen::Index j = 0; j < nq; ++j) a(i, np + j) = -gi * basis(i, j + 1) * inv_w;
      rhs(i) = gi * inv_w;
    }
    const double cond = condition_number(a);
    if (cond > kMaxCondition) {
      if (iteration == 0) {
        throw Error(ErrorCode::IllConditioned,
                    "rational fit condition estimate " + std::to_string(cond));
      }
      break;
    }
    const Eigen::VectorXd sol = min_norm_solve(a, rhs);

    FitResult cand;
    cand.lo = target.lo;
    cand.hi = target.hi;
    cand.condition = cond;
    cand.num_cheb.assign(sol.data(), sol.data() + np);
    cand.den_cheb.assign(1, 1.0);
    cand.den_cheb.insert(cand.den_cheb.end(), sol.data() + np, sol.data() + np + nq);
    cand.iterations = iteration + 1;

    if (denominator_pole_free(cand.den_cheb, target.lo, target.hi, nodes)) {
      cand.fit_residual = fit_grid_rms(cand, nodes, values);
      if (cand.fit_residual < best.fit_residual) best = cand;
    }

    Eigen::VectorXd next(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      double q = 1.0;
      for (Eigen::Index j = 0; j < nq; ++j) q += sol(np + j) * basis(i, j + 1);
      next(i) = q;
    }
    const double scale = std::max(weights.cwiseAbs().maxCoeff(), 1e-300);
    const double change = (next - weights).cwiseAbs().maxCoeff() / scale;
    // Weights through a root of Q would blow up the next system.
    if (next.cwiseAbs().minCoeff() <= 1e-12 * next.cwiseAbs().maxCoeff()) {
      ++iteration;
      break;
    }
    weights = next;
    if (change <= kWeightStagnation) {
      ++iteration;
      break;
    }
  }

  if (!denominator_pole_free(best.den_cheb, target.lo, target.hi, nodes)) {
    throw Error(ErrorCode::PoleInDomain, "fitted denominator has a root inside the domain");
  }
  best.iterations = std::max<std::size_t>(iteration, 1);
  fill_errors(best, target);
  finalize_spec(best, "fit_rational");
  return best;
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "slope needs at least two matched points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw Error(ErrorCode::InvalidArgument, "slope needs distinct x values");
  return sxy / sxx;
}

ConvergenceStudy convergence_study(const TargetSignal& target, FitFamily family,
                                   const std::vector<std::size_t>& degrees,
                                   std::size_t grid_size) {
  if (degrees.size() < 2 || !std::is_sorted(degrees.begin(), degrees.end()) ||
      std::adjacent_find(degrees.begin(), degrees.end()) != degrees.end()) {
    throw Error(ErrorCode::InvalidArgument, "degrees must be strictly ascending with >= 2 entries");
  }
  if (family == FitFamily::Polynomial && degrees.front() == 0)
    throw Error(ErrorCode::InvalidArgument, "log-log slope needs degrees >= 1");
  ConvergenceStudy study;
  study.family = family;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t k : degrees) {
    const FitResult r = family == FitFamily::Polynomial ? fit_polynomial(target, k, grid_size)
                                                        : fit_rational(target, k, k, grid_size);
    study.rows.push_back({k, r.max_error, r.rms_error});
    const double kd = static_cast<double>(k);
    xs.push_back(family == FitFamily::Polynomial ? std::log(kd) : std::sqrt(kd));
    ys.push_back(std::log(std::max(r.max_error, 1e-300)));
  }
  study.slope = fitted_slope(xs, ys);
  return study;
}

}  // namespace graphfilter
