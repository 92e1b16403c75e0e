// Independent reference solutions used to freeze expected values in tests.
// Everything here is closed-form or reduced to a tiny linear solve, kept
// separate from the library's solution path.
#pragma once

#include <cmath>

#include "immerse/types.hpp"

namespace oracles {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Concentric annulus a <= r <= R, solid disk at the origin.
//
// Kirchhoff potential for unit x-translation of the solid with an
// impermeable outer circle: Phi(r, phi) = (A r + B / r) cos phi where the
// Neumann conditions (fluid-outward normals: -r^ on the solid, +r^ on the
// outer circle) force A - B/a^2 = 1 and A - B/R^2 = 0.
struct AnnulusKirchhoff {
  double A, B;
  AnnulusKirchhoff(double a, double R) {
    B = R * R * a * a / (a * a - R * R);
    A = B / (R * R);
  }
  double value(double r, double phi) const { return (A * r + B / r) * std::cos(phi); }
  immerse::Vec2 gradient(double r, double phi) const {
    double dr = (A - B / (r * r)) * std::cos(phi);
    double dphi = -(A * r + B / r) * std::sin(phi);
    immerse::Vec2 er(std::cos(phi), std::sin(phi));
    immerse::Vec2 ephi(-std::sin(phi), std::cos(phi));
    return dr * er + (dphi / r) * ephi;
  }
};

// Added mass of the concentric configuration: Ma11 = Ma22, Ma33 = 0.
inline double annulus_added_mass(double a, double R) {
  return kPi * a * a * (R * R + a * a) / (R * R - a * a);
}

// Stream function of the annulus normalized to flux -1 through the solid
// boundary (fluid-outward normal): psi = log(r/R) / (2 pi).
inline double annulus_stream(double r, double R) {
  return std::log(r / R) / (2 * kPi);
}

// Zero-mean solution of the radial flux problem: normal velocity 1/(2 pi a)
// on the solid boundary balanced by -1/(2 pi R) outside.
inline double annulus_log_solution(double r, double a) {
  return -std::log(r / a) / (2 * kPi);
}

// Unbounded-fluid added masses of an ellipse with semi-axes (ax, ay):
// pi ay^2 for motion along x, pi ax^2 along y.
inline immerse::Vec2 ellipse_added_mass(double ax, double ay) {
  return {kPi * ay * ay, kPi * ax * ax};
}

}  // namespace oracles
