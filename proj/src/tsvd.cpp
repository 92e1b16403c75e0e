#include "immerse/tsvd.hpp"

#include <lapacke.h>

#include <stdexcept>

namespace immerse {

TsvdSolver::TsvdSolver(const Eigen::MatrixXd& A, double rel_cutoff) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  const int k = std::min(m, n);
  Eigen::MatrixXd work = A;
  u_.resize(m, k);
  vt_.resize(k, n);
  s_.resize(k);
  int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', m, n, work.data(), m,
                            s_.data(), u_.data(), m, vt_.data(), k);
  if (info != 0) throw std::runtime_error("dgesdd failed to converge");
  cutoff_ = rel_cutoff * s_[0];
  rank_ = 0;
  for (int i = 0; i < k; ++i)
    if (s_[i] > cutoff_) ++rank_;
}

Eigen::VectorXd TsvdSolver::solve(const Eigen::VectorXd& b) const {
  Eigen::VectorXd c = u_.transpose() * b;
  for (int i = 0; i < s_.size(); ++i) c[i] = (s_[i] > cutoff_) ? c[i] / s_[i] : 0.0;
  return vt_.transpose() * c;
}

}  // namespace immerse
