// Evaluation of Z = Q(B)^-1 P(B) X for the rational filter family.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "graphfilter/error.hpp"
#include "graphfilter/filter.hpp"
#include "graphfilter/kernels.hpp"

namespace graphfilter {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// out = Q(B) z = z + sum_m den[m-1] B^m z
void apply_denominator(std::span<const double> den, const SparseOperator& basis,
                       const FeatureMatrix& z, FeatureMatrix& out, FeatureMatrix& scratch_a,
                       FeatureMatrix& scratch_b) {
  out = z;
  if (den.empty()) return;
  scratch_a = z;
  for (double coeff : den) {
    apply_into(basis, scratch_a, scratch_b);
    std::swap(scratch_a, scratch_b);
    if (coeff != 0.0) kernels::axpy(coeff, scratch_a.values(), out.values());
  }
}

struct DenominatorOp {
  std::span<const double> den;
  const SparseOperator& basis;
  FeatureMatrix a, b;

  void operator()(const FeatureMatrix& z, FeatureMatrix& out) {
    apply_denominator(den, basis, z, out, a, b);
  }
};

bool zero_denominator(std::span<const double> den) {
  return std::all_of(den.begin(), den.end(), [](double v) { return v == 0.0; });
}

// Bound on the spectral radius of the iteration map Z -> P X - (Q(B) - I) Z.
double contraction_bound(std::span<const double> den, const SparseOperator& basis) {
  const double r = spectral_radius_bound(basis);
  double c = 0.0;
  double rp = 1.0;
  for (double v : den) {
    rp *= r;
    c += std::abs(v) * rp;
  }
  return c;
}

bool fixed_point_allowed(const SparseOperator& basis) {
  // Unnormalised operators have unbounded spectra; only direct methods apply.
  return basis.scheme() != Scheme::AdjRaw && basis.scheme() != Scheme::LapUnnorm;
}

// Interval containing the spectrum of a symmetric basis.
std::pair<double, double> spectral_interval(const SparseOperator& basis) {
  switch (basis.scheme()) {
    case Scheme::AdjSym:
    case Scheme::AdjRenorm:
      return {-1.0, 1.0};
    case Scheme::LapSym:
      return {0.0, 2.0};
    case Scheme::LapUnnorm:
      return {0.0, spectral_radius_bound(basis)};
    case Scheme::Identity:
      return {1.0, 1.0};
    default: {
      const double r = spectral_radius_bound(basis);
      return {-r, r};
    }
  }
}

double eval_denominator(std::span<const double> den, double x) {
  double acc = 0.0;
  for (std::size_t m = den.size(); m-- > 0;) acc = (acc + den[m]) * x;
  return 1.0 + acc;
}

bool denominator_positive(std::span<const double> den, const SparseOperator& basis) {
  const auto [lo, hi] = spectral_interval(basis);
  constexpr int samples = 4096;
  for (int i = 0; i <= samples; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / samples;
    if (!(eval_denominator(den, x) > 0.0)) return false;
  }
  return true;
}

bool cg_applicable(std::span<const double> den, const SparseOperator& basis) {
  return basis.symmetric() && denominator_positive(den, basis);
}

RationalSolve fixed_point(std::span<const double> den, const SparseOperator& basis,
                          const FeatureMatrix& rhs, double rhs_norm, const SolverOptions& opts) {
  DenominatorOp q{den, basis, {}, {}};
  RationalSolve out;
  out.method = SolveMethod::FixedPoint;
  out.z = rhs;
  FeatureMatrix qz;
  FeatureMatrix residual(rhs.rows(), rhs.cols());
  for (std::size_t it = 0; it <= opts.max_iterations; ++it) {
    q(out.z, qz);
    residual = rhs;
    kernels::axpy(-1.0, qz.values(), residual.values());
    out.relative_residual = frobenius_norm(residual) / rhs_norm;
    out.iterations = it;
    if (out.relative_residual <= opts.tolerance) return out;
    if (!std::isfinite(out.relative_residual)) break;
    // Z <- Z + (PX - Q Z) == PX - (Q - I) Z
    kernels::axpy(1.0, residual.values(), out.z.values());
  }
  throw Error(ErrorCode::SolverDiverged,
              "fixed-point iteration reached relative residual " +
                  std::to_string(out.relative_residual) + " after " +
                  std::to_string(out.iterations) + " iterations");
}

// Column-independent conjugate gradients run in lockstep so every sparse
// product covers all feature columns at once. Each column keeps its own
// scalars, so results do not depend on how many columns are present.
RationalSolve conjugate_gradient(std::span<const double> den, const SparseOperator& basis,
                                 const FeatureMatrix& rhs, double rhs_norm,
                                 const SolverOptions& opts) {
  const std::size_t n = rhs.rows();
  const std::size_t f = rhs.cols();
  DenominatorOp q{den, basis, {}, {}};
  RationalSolve out;
  out.method = SolveMethod::ConjugateGradient;
  out.z = FeatureMatrix(n, f);

  auto column_dots = [&](const FeatureMatrix& a, const FeatureMatrix& b) {
    std::vector<double> d(f, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto ar = a.row(i);
      const auto br = b.row(i);
      for (std::size_t j = 0; j < f; ++j) d[j] += ar[j] * br[j];
    }
    return d;
  };

  const auto b_sq = column_dots(rhs, rhs);
  FeatureMatrix r = rhs;
  FeatureMatrix p = r;
  FeatureMatrix qp;
  auto rs = column_dots(r, r);
  std::vector<char> done(f, 0);
  std::size_t it = 0;
  for (; it < opts.max_iterations; ++it) {
    bool all_done = true;
    for (std::size_t j = 0; j < f; ++j) {
      if (!done[j] && rs[j] <= opts.tolerance * opts.tolerance * b_sq[j]) done[j] = 1;
      all_done = all_done && done[j];
    }
    if (all_done) break;
    q(p, qp);
    const auto pqp = column_dots(p, qp);
    std::vector<double> alpha(f, 0.0);
    for (std::size_t j = 0; j < f; ++j) {
      if (done[j]) continue;
      if (!(pqp[j] > 0.0)) {
        throw Error(ErrorCode::SolverDiverged,
                    "conjugate gradients met a non-positive curvature direction");
      }
      alpha[j] = rs[j] / pqp[j];
    }
    for (std::size_t i = 0; i < n; ++i) {
      auto zr = out.z.row(i);
      auto rr = r.row(i);
      const auto pr = p.row(i);
      const auto qr = qp.row(i);
      for (std::size_t j = 0; j < f; ++j) {
        zr[j] += alpha[j] * pr[j];
        rr[j] -= alpha[j] * qr[j];
      }
    }
    const auto rs_new = column_dots(r, r);
    for (std::size_t i = 0; i < n; ++i) {
      auto pr = p.row(i);
      const auto rr = r.row(i);
      for (std::size_t j = 0; j < f; ++j) {
        if (done[j]) continue;
        pr[j] = rr[j] + (rs_new[j] / rs[j]) * pr[j];
      }
    }
    rs = rs_new;
  }
  out.iterations = it;
  out.relative_residual = 0.0;
  FeatureMatrix qz;
  q(out.z, qz);
  FeatureMatrix res = rhs;
  kernels::axpy(-1.0, qz.values(), res.values());
  out.relative_residual = frobenius_norm(res) / rhs_norm;
  if (!(out.relative_residual <= opts.tolerance)) {
    throw Error(ErrorCode::SolverDiverged,
                "conjugate gradients reached relative residual " +
                    std::to_string(out.relative_residual) + " after " + std::to_string(it) +
                    " iterations");
  }
  return out;
}

RationalSolve dense_direct(std::span<const double> den, const SparseOperator& basis,
                           const FeatureMatrix& rhs, double rhs_norm, const SolverOptions& opts) {
  const std::size_t n = basis.num_nodes();
  if (n > opts.dense_cap) {
    throw Error(ErrorCode::TooLarge, "dense solve needs N <= " + std::to_string(opts.dense_cap));
  }
  const Matrix b_dense = basis.to_dense();
  const Eigen::Map<const RowMajor> bmat(b_dense.data(), static_cast<Eigen::Index>(n),
                                        static_cast<Eigen::Index>(n));
  // Horner: Q = I + B (d1 I + B (d2 I + ... ))
  Eigen::MatrixXd qmat = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                               static_cast<Eigen::Index>(n));
  for (std::size_t m = den.size(); m-- > 0;) {
    qmat.diagonal().array() += den[m];
    qmat = (bmat * qmat).eval();
  }
  qmat.diagonal().array() += 1.0;

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(qmat);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
    throw Error(ErrorCode::SingularDenominator,
                "Q(B) is singular to working precision (rcond " + std::to_string(rcond) + ")");
  }

  const Eigen::Map<const RowMajor> bx(rhs.data(), static_cast<Eigen::Index>(rhs.rows()),
                                      static_cast<Eigen::Index>(rhs.cols()));
  RowMajor z = lu.solve(Eigen::MatrixXd(bx));

  RationalSolve out;
  out.method = SolveMethod::DenseDirect;
  out.z = FeatureMatrix(rhs.rows(), rhs.cols());
  DenominatorOp q{den, basis, {}, {}};
  FeatureMatrix qz;
  FeatureMatrix res;
  for (std::size_t refine = 0;; ++refine) {
    std::copy(z.data(), z.data() + z.size(), out.z.data());
    q(out.z, qz);
    res = rhs;
    kernels::axpy(-1.0, qz.values(), res.values());
    out.relative_residual = frobenius_norm(res) / rhs_norm;
    out.iterations = refine;
    if (out.relative_residual <= opts.tolerance) return out;
    if (refine == 3) break;
    const Eigen::Map<const RowMajor> rmat(res.data(), static_cast<Eigen::Index>(res.rows()),
                                          static_cast<Eigen::Index>(res.cols()));
    z += lu.solve(Eigen::MatrixXd(rmat));
  }
  throw Error(ErrorCode::SolverDiverged, "dense solve left relative residual " +
                                             std::to_string(out.relative_residual));
}

}  // namespace

double rational_residual(const RationalFilter& f, const SparseOperator& basis,
                         const FeatureMatrix& x, const FeatureMatrix& z) {
  const FeatureMatrix rhs = apply_polynomial(f.num, basis, x, f.num.size());
  DenominatorOp q{f.den, basis, {}, {}};
  FeatureMatrix qz;
  q(z, qz);
  FeatureMatrix res = rhs;
  kernels::axpy(-1.0, qz.values(), res.values());
  const double denom = frobenius_norm(rhs);
  const double num = frobenius_norm(res);
  return denom > 0.0 ? num / denom : num;
}

RationalSolve solve_rational(const RationalFilter& f, const SparseOperator& basis,
                             const FeatureMatrix& x, const SolverOptions& opts) {
  if (f.num.empty()) throw Error(ErrorCode::InvalidParam, "rational filter needs a numerator");
  if (!(opts.tolerance > 0.0)) throw Error(ErrorCode::InvalidParam, "tolerance must be > 0");
  if (basis.num_nodes() != x.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                "operator has " + std::to_string(basis.num_nodes()) + " nodes, features have " +
                    std::to_string(x.rows()) + " rows");
  }
  const FeatureMatrix rhs = apply_polynomial(f.num, basis, x, f.num.size());
  const double rhs_norm = frobenius_norm(rhs);
  if (rhs_norm == 0.0 || zero_denominator(f.den)) {
    RationalSolve out;
    out.z = rhs;
    out.method = opts.method;
    return out;
  }

  const std::span<const double> den(f.den);
  const bool fp_ok = fixed_point_allowed(basis);
  const double contraction = contraction_bound(den, basis);

  switch (opts.method) {
    case SolveMethod::FixedPoint:
      if (!fp_ok) {
        throw Error(ErrorCode::MethodUnsupported,
                    "fixed-point iteration is not used on unnormalised operators");
      }
      return fixed_point(den, basis, rhs, rhs_norm, opts);
    case SolveMethod::ConjugateGradient:
      if (!basis.symmetric()) {
        throw Error(ErrorCode::MethodUnsupported,
                    "conjugate gradients need a symmetric basis operator");
      }
      if (!denominator_positive(den, basis)) {
        throw Error(ErrorCode::MethodUnsupported,
                    "Q(B) is not positive definite on the basis spectrum");
      }
      return conjugate_gradient(den, basis, rhs, rhs_norm, opts);
    case SolveMethod::DenseDirect:
      return dense_direct(den, basis, rhs, rhs_norm, opts);
    case SolveMethod::Auto:
      break;
  }

  if (fp_ok && contraction < 1.0) {
    const double expected = std::ceil(std::log(opts.tolerance) / std::log(contraction)) + 2.0;
    if (expected <= static_cast<double>(opts.max_iterations))
      return fixed_point(den, basis, rhs, rhs_norm, opts);
  }
  if (cg_applicable(den, basis)) return conjugate_gradient(den, basis, rhs, rhs_norm, opts);
  if (basis.num_nodes() <= opts.dense_cap) return dense_direct(den, basis, rhs, rhs_norm, opts);
  if (fp_ok && contraction < 1.0) return fixed_point(den, basis, rhs, rhs_norm, opts);
  throw Error(ErrorCode::MethodUnsupported,
              "no solver applies: not a contraction, not SPD, and too large for a dense solve");
}

}  // namespace graphfilter
