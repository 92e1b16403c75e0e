#include "immerse/nnls.hpp"

#include <vector>

namespace immerse {

Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                     double* rnorm, int max_iter) {
  const int n = static_cast<int>(A.cols());
  if (max_iter < 0) max_iter = 3 * n + 30;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  int n_passive = 0;

  auto solve_passive = [&](Eigen::VectorXd& z) {
    Eigen::MatrixXd Ap(A.rows(), n_passive);
    std::vector<int> idx;
    idx.reserve(n_passive);
    for (int j = 0; j < n; ++j)
      if (passive[j]) {
        Ap.col(static_cast<int>(idx.size())) = A.col(j);
        idx.push_back(j);
      }
    Eigen::VectorXd zp = Ap.colPivHouseholderQr().solve(b);
    z.setZero(n);
    for (std::size_t i = 0; i < idx.size(); ++i) z[idx[i]] = zp[i];
  };

  const double tol = 10 * std::numeric_limits<double>::epsilon() *
                     A.cwiseAbs().maxCoeff() * std::max<int>(1, n);
  for (int iter = 0; iter < max_iter; ++iter) {
    Eigen::VectorXd w = A.transpose() * (b - A * x);
    int best = -1;
    double wmax = tol;
    for (int j = 0; j < n; ++j)
      if (!passive[j] && w[j] > wmax) {
        wmax = w[j];
        best = j;
      }
    if (best < 0) break;
    passive[best] = true;
    ++n_passive;

    Eigen::VectorXd z;
    solve_passive(z);
    while (true) {
      double alpha = 1.0;
      bool feasible = true;
      for (int j = 0; j < n; ++j)
        if (passive[j] && z[j] <= 0) {
          feasible = false;
          alpha = std::min(alpha, x[j] / (x[j] - z[j]));
        }
      if (feasible) {
        x = z;
        break;
      }
      x += alpha * (z - x);
      for (int j = 0; j < n; ++j)
        if (passive[j] && x[j] <= tol) {
          passive[j] = false;
          x[j] = 0;
          --n_passive;
        }
      if (n_passive == 0) break;
      solve_passive(z);
    }
  }
  if (rnorm) *rnorm = (A * x - b).norm();
  return x;
}

Eigen::VectorXd nnls_regularized(const Eigen::MatrixXd& A,
                                 const Eigen::VectorXd& b, double reg,
                                 double* rnorm) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  Eigen::MatrixXd Aa(m + n, n);
  Aa.topRows(m) = A;
  Aa.bottomRows(n) = std::sqrt(reg) * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd ba = Eigen::VectorXd::Zero(m + n);
  ba.head(m) = b;
  Eigen::VectorXd x = nnls(Aa, ba);
  if (rnorm) *rnorm = (A * x - b).norm();
  return x;
}

}  // namespace immerse
