#pragma once

#include <cmath>
#include <Eigen/Dense>

namespace immerse {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// x^perp = (-x2, x1), counterclockwise quarter turn.
inline Vec2 perp(const Vec2& x) { return Vec2(-x.y(), x.x()); }

inline Mat2 rotation(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

// Body configuration: center of mass and rotation angle. theta lives on the
// real line, not on the circle.
struct Pose {
  Vec2 h = Vec2::Zero();
  double theta = 0.0;

  Pose() = default;
  Pose(const Vec2& h_, double theta_) : h(h_), theta(theta_) {}
  Pose(double hx, double hy, double theta_) : h(hx, hy), theta(theta_) {}

  Vec3 as_vec3() const { return Vec3(h.x(), h.y(), theta); }
  static Pose from_vec3(const Vec3& v) { return Pose(v[0], v[1], v[2]); }

  // Rigid placement x -> h + R(theta) (x - h0).
  Vec2 apply(const Vec2& x, const Vec2& h0) const {
    return h + rotation(theta) * (x - h0);
  }

  bool finite() const {
    return std::isfinite(h.x()) && std::isfinite(h.y()) && std::isfinite(theta);
  }
};

inline double pose_distance(const Pose& a, const Pose& b) {
  return (a.as_vec3() - b.as_vec3()).norm();
}

// Configuration and generalized velocity (h', theta').
struct State {
  Pose pose;
  Vec3 vel = Vec3::Zero();

  Vec6 as_vec6() const {
    Vec6 y;
    y << pose.as_vec3(), vel;
    return y;
  }
  static State from_vec6(const Vec6& y) {
    State st;
    st.pose = Pose::from_vec3(y.head<3>());
    st.vel = y.tail<3>();
    return st;
  }
};

inline double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a;
}

}  // namespace immerse
