#pragma once

#include <Eigen/Dense>

namespace immerse {

// Truncated-SVD least squares for the ill-conditioned collocation systems.
// Factor once, solve many right-hand sides; singular values below
// rel_cutoff * sigma_max are dropped.
class TsvdSolver {
 public:
  TsvdSolver() = default;
  TsvdSolver(const Eigen::MatrixXd& A, double rel_cutoff);

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  double sigma_max() const { return s_.size() ? s_[0] : 0.0; }
  double sigma_min() const { return s_.size() ? s_[s_.size() - 1] : 0.0; }
  int rank() const { return rank_; }
  int rows() const { return static_cast<int>(u_.rows()); }
  int cols() const { return static_cast<int>(vt_.cols()); }

 private:
  Eigen::MatrixXd u_, vt_;
  Eigen::VectorXd s_;
  double cutoff_ = 0.0;
  int rank_ = 0;
};

}  // namespace immerse
