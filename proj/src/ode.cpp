#include "immerse/ode.hpp"

#include <stdexcept>

namespace immerse {
namespace ode {

namespace {

// Dormand-Prince RK5(4)7M coefficients (Hairer, Norsett & Wanner).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;

}  // namespace

Vec6 Solution::at(double t) const {
  if (steps_.empty()) throw std::runtime_error("empty dense solution");
  // binary search for the covering step
  int lo = 0, hi = static_cast<int>(steps_.size()) - 1;
  while (lo < hi) {
    int mid = (lo + hi) / 2;
    if (t <= steps_[mid].t0 + steps_[mid].h)
      hi = mid;
    else
      lo = mid + 1;
  }
  const Step& s = steps_[lo];
  double th = (t - s.t0) / s.h;
  th = std::clamp(th, 0.0, 1.0);
  double th1 = 1.0 - th;
  return s.r1 + th * (s.r2 + th1 * (s.r3 + th * (s.r4 + th1 * s.r5)));
}

void Solution::append(const Solution& other) {
  for (const Step& s : other.steps_) steps_.push_back(s);
}

Solution integrate(const Rhs& f, const Vec6& y0, double t0, double t1,
                   const Options& opt) {
  Solution sol;
  if (t1 <= t0) return sol;

  Vec6 y = y0;
  double t = t0;
  Vec6 k1 = f(t, y);
  double h = std::min({opt.initial_step, t1 - t0, opt.max_step});
  long long n_steps = 0;

  while (t < t1) {
    if (++n_steps > opt.max_steps)
      throw std::runtime_error("integrator exceeded the step budget");
    double ceiling = opt.max_step;
    if (opt.max_step_at) ceiling = std::min(ceiling, opt.max_step_at(t));
    h = std::min({h, ceiling, t1 - t});

    Vec6 k2 = f(t + c2 * h, y + h * (a21 * k1));
    Vec6 k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    Vec6 k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    Vec6 k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    Vec6 k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Vec6 y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    Vec6 k7 = f(t + h, y1);

    Vec6 err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err = 0;
    for (int i = 0; i < 6; ++i) {
      double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
      err += std::pow(err_vec[i] / sc, 2);
    }
    err = std::sqrt(err / 6.0);

    if (err <= 1.0) {
      Step s;
      s.t0 = t;
      s.h = h;
      s.r1 = y;
      s.r2 = y1 - y;
      s.r3 = h * k1 - s.r2;
      s.r4 = s.r2 - h * k7 - s.r3;
      s.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      sol.append(s);
      t += h;
      y = y1;
      k1 = k7;  // FSAL
      if (opt.on_step && !opt.on_step(t, y)) break;
    }
    double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    h *= std::clamp(factor, 0.2, 5.0);
    h = std::max(h, 1e-14 * std::max(1.0, std::abs(t)));
  }
  return sol;
}

}  // namespace ode
}  // namespace immerse
