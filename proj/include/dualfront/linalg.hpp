#pragma once

// Small dense helpers on top of Eigen: singular values and rank.

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "dualfront/jet.hpp"

namespace dualfront {

template <class T>
using DenseMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <class T>
DenseMatrix<T> to_dense(std::span<const T> rowmajor, std::size_t rows, std::size_t cols) {
  DenseMatrix<T> m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rowmajor[i * cols + j];
  }
  return m;
}

/// Singular values in decreasing order.
template <class T>
std::vector<double> singular_values(std::span<const T> rowmajor, std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) return {};
  Eigen::JacobiSVD<DenseMatrix<T>> svd(to_dense(rowmajor, rows, cols));
  const auto& s = svd.singularValues();
  return std::vector<double>(s.data(), s.data() + s.size());
}

/// Count of singular values >= rel_tol * max(sigma_max, reference).
inline int numerical_rank(std::span<const double> sv, double rel_tol, double reference = 0.0) {
  const double ref = std::max(sv.empty() ? 0.0 : sv.front(), reference);
  int r = 0;
  for (double s : sv) {
    if (ref > 0.0 && s >= rel_tol * ref) ++r;
  }
  return r;
}

template <class T>
double norm(std::span<const T> v) {
  double s = 0.0;
  for (const T& x : v) s += std::norm(x);
  return std::sqrt(s);
}

/// Index of the largest-modulus entry; ties go to the lowest index.
template <class T>
std::size_t argmax_abs(std::span<const T> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  return best;
}

}  // namespace dualfront
