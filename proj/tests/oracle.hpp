#pragma once

// Dense reference constructions built from raw edge lists with Eigen,
// independent of the library's sparse code paths.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <vector>

#include "graphfilter/dense.hpp"
#include "graphfilter/graph.hpp"

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd adjacency(std::size_t n, const std::vector<graphfilter::Edge>& edges) {
  MatrixXd a = MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& e : edges) {
    a(e.u, e.v) = e.w;
    a(e.v, e.u) = e.w;
  }
  return a;
}

inline VectorXd inv_or_zero(const VectorXd& d) {
  VectorXd out = d;
  for (Eigen::Index i = 0; i < d.size(); ++i) out(i) = d(i) > 0 ? 1.0 / d(i) : 0.0;
  return out;
}

inline MatrixXd scheme(const MatrixXd& a, graphfilter::Scheme s) {
  using graphfilter::Scheme;
  const auto n = a.rows();
  const MatrixXd id = MatrixXd::Identity(n, n);
  const VectorXd d = a.rowwise().sum();
  const VectorXd dinv = inv_or_zero(d);
  const VectorXd dinv_sqrt = dinv.cwiseSqrt();
  const VectorXd dhat_inv = (d.array() + 1.0).inverse();
  switch (s) {
    case Scheme::AdjRaw: return a;
    case Scheme::AdjRW: return dinv.asDiagonal() * a;
    case Scheme::AdjSym: return dinv_sqrt.asDiagonal() * a * dinv_sqrt.asDiagonal();
    case Scheme::AdjRenorm:
      return dhat_inv.cwiseSqrt().asDiagonal() * (a + id) * dhat_inv.cwiseSqrt().asDiagonal();
    case Scheme::AdjRWSelfLoop: return dhat_inv.asDiagonal() * (a + id);
    case Scheme::LapUnnorm: return MatrixXd(d.asDiagonal()) - a;
    case Scheme::LapSym: return id - dinv_sqrt.asDiagonal() * a * dinv_sqrt.asDiagonal();
    case Scheme::LapRW: return id - dinv.asDiagonal() * a;
    case Scheme::Identity: return id;
    case Scheme::Derived: break;
  }
  return MatrixXd();
}

inline MatrixXd polynomial(const std::vector<double>& c, const MatrixXd& b) {
  MatrixXd acc = MatrixXd::Zero(b.rows(), b.cols());
  MatrixXd power = MatrixXd::Identity(b.rows(), b.cols());
  for (double cj : c) {
    acc += cj * power;
    power = power * b;
  }
  return acc;
}

inline MatrixXd to_eigen(const graphfilter::Matrix& m) {
  MatrixXd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  return out;
}

inline graphfilter::Matrix from_eigen(const MatrixXd& m) {
  graphfilter::Matrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j)
      out(i, j) = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

inline double max_abs(const MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

inline double rel_diff(const MatrixXd& got, const MatrixXd& want) {
  const double scale = std::max(max_abs(want), 1e-300);
  return max_abs(got - want) / scale;
}

}  // namespace oracle
