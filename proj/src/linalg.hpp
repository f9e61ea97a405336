#pragma once

#include <Eigen/Dense>

namespace bileg::detail {

/// Number of singular values above rel_tol times the largest one.
inline int numerical_rank(const Eigen::MatrixXd& m, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * s[0]) ++r;
  return r;
}

/// Orthonormal basis of the column space, as columns.
inline Eigen::MatrixXd column_space(const Eigen::MatrixXd& m, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int r = 0;
  if (s.size() > 0 && s[0] > 0.0)
    for (int i = 0; i < s.size(); ++i)
      if (s[i] > rel_tol * s[0]) ++r;
  return svd.matrixU().leftCols(r);
}

}  // namespace bileg::detail
