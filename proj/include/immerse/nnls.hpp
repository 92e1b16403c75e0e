#pragma once

#include <Eigen/Dense>

namespace immerse {

// Lawson-Hanson active-set solver for min |A x - b| subject to x >= 0.
// Returns the solution; *rnorm (optional) receives the residual norm.
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                     double* rnorm = nullptr, int max_iter = -1);

// Ridge-regularized variant: min |A x - b|^2 + reg |x|^2, x >= 0. The small
// ridge keeps the weight map continuous across active-set changes.
Eigen::VectorXd nnls_regularized(const Eigen::MatrixXd& A,
                                 const Eigen::VectorXd& b, double reg,
                                 double* rnorm = nullptr);

}  // namespace immerse
