#ifndef LRR_LINALG_HPP
#define LRR_LINALG_HPP

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <string>

#include "lrr/types.hpp"

namespace lrr {

// Rank at a relative singular-value threshold.
template <typename Mat>
int rank_at(const Eigen::BDCSVD<Mat>& svd, double rel_tol) {
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0;
  const double cut = rel_tol * s(0);
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++r;
  return r;
}

// Rank that must be stable when the threshold is perturbed by x10 either way.
template <typename Mat>
int stable_rank(const Mat& m, double rel_tol = 1e-10,
                const std::string& what = "rank") {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::BDCSVD<Mat> svd(m);
  const int r = rank_at(svd, rel_tol);
  if (r != rank_at(svd, rel_tol * 10.0) || r != rank_at(svd, rel_tol / 10.0))
    throw InstabilityError("rank-unstable: " + what);
  return r;
}

template <typename Mat>
int stable_nullity(const Mat& m, double rel_tol = 1e-10,
                   const std::string& what = "nullity") {
  if (m.cols() == 0) return 0;
  if (m.rows() == 0) return static_cast<int>(m.cols());
  return static_cast<int>(m.cols()) - stable_rank(m, rel_tol, what);
}

// Orthonormal basis of the nullspace (right singular vectors past the rank).
template <typename Mat>
Mat nullspace_basis(const Mat& m, double rel_tol = 1e-10) {
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeFullV);
  const int r = rank_at(svd, rel_tol);
  const int n = static_cast<int>(m.cols());
  return svd.matrixV().rightCols(n - r);
}

inline double smallest_singular_value(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues().minCoeff();
}

inline double largest_singular_value(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues().maxCoeff();
}

}  // namespace lrr

#endif
