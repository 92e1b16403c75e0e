#pragma once

#include <functional>
#include <vector>

#include "immerse/types.hpp"

namespace immerse {
namespace ode {

// One accepted step with the coefficients of the quartic dense-output
// interpolant of the Dormand-Prince 5(4) pair.
struct Step {
  double t0 = 0, h = 0;
  Vec6 r1, r2, r3, r4, r5;
};

// Dense solution on [t_begin, t_end].
class Solution {
 public:
  double t_begin() const { return steps_.empty() ? 0 : steps_.front().t0; }
  double t_end() const { return steps_.empty() ? 0 : steps_.back().t0 + steps_.back().h; }
  Vec6 at(double t) const;
  int step_count() const { return static_cast<int>(steps_.size()); }
  const std::vector<Step>& steps() const { return steps_; }
  void append(const Step& s) { steps_.push_back(s); }
  void append(const Solution& other);  // times must continue monotonically

 private:
  std::vector<Step> steps_;
};

struct Options {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double initial_step = 1e-3;
  double max_step = std::numeric_limits<double>::infinity();
  // optional time-dependent step ceiling (pulse windows)
  std::function<double(double)> max_step_at;
  // called after each accepted step; return false to abort the integration
  std::function<bool(double t, const Vec6& y)> on_step;
  long long max_steps = 2000000;
};

using Rhs = std::function<Vec6(double t, const Vec6& y)>;

// Adaptive embedded Runge-Kutta 5(4) (Dormand-Prince) with dense output.
Solution integrate(const Rhs& f, const Vec6& y0, double t0, double t1,
                   const Options& opt);

}  // namespace ode
}  // namespace immerse
