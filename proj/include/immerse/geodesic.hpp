#pragma once

#include "immerse/dynamics.hpp"
#include "immerse/ode.hpp"

namespace immerse {

struct GeodesicConfig {
  double rel_tol = 1e-9;        // integrate_geodesic tolerance
  double shoot_rel_tol = 1e-10; // tighter tolerance inside the shooting loop
  double shoot_tol = 1e-8;      // endpoint residual target
  int max_newton = 50;
  double jacobian_step = 1e-6;
  double r1 = 0.4;  // geodesic ball radius (trajectory must stay in r1/2)
  double r2 = 0.1;  // admissible displacement |q1 - q0|
  double initial_step = 0.02;
};

struct GeodesicSolution {
  ode::Solution trajectory;
  Vec3 c0 = Vec3::Zero();  // initial velocity
  Vec3 c1 = Vec3::Zero();  // final velocity
  double residual = 0;     // |q(T) - q1|
  double max_excursion = 0;  // max |q(t) - q0| along the way
};

// Uncontrolled, zero-circulation flow: the geodesic equation of Mg + Ma.
// Aborts with LeftAdmissibleSet if the trajectory exits Q_delta.
ode::Solution integrate_geodesic(const DynamicsContext& dyn, const Pose& q0,
                                 const Vec3& c0, double T,
                                 const GeodesicConfig& cfg = {});

// Two-point boundary value problem: damped Newton on the initial velocity
// with a finite-difference Jacobian, initial guess (q1 - q0)/T.
GeodesicSolution shoot(const DynamicsContext& dyn, const Pose& q0,
                       const Pose& q1, double T, const GeodesicConfig& cfg = {});

}  // namespace immerse
