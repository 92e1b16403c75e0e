#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "immerse/types.hpp"

namespace immerse {

// Sampling of a closed analytic curve at uniform parameter values, with
// trapezoidal quadrature weights (spectrally accurate for smooth closed
// curves). Normals point out of the fluid: into the solid on solid
// boundaries, out of Omega on the outer boundary.
struct BoundarySampling {
  Eigen::ArrayXd s;          // parameter values in [0, 2pi)
  Eigen::Matrix2Xd points;
  Eigen::Matrix2Xd normals;  // unit, out of the fluid
  Eigen::Matrix2Xd tangents; // unit, counterclockwise w.r.t. the solid
  Eigen::ArrayXd r;          // (x - h)^perp . n
  Eigen::ArrayXd weights;    // |c'(s_k)| 2pi/N

  int size() const { return static_cast<int>(s.size()); }
  double length() const { return weights.sum(); }

  // Closed-curve identities sum w n = 0 and sum w r = 0, returned as residuals.
  Vec2 closure_normal() const;
  double closure_rotational() const;

  // Neumann data vector for the Kirchhoff problems: (n1, n2, (x-h)^perp.n).
  Vec3 kirchhoff_data(int k) const {
    return Vec3(normals(0, k), normals(1, k), r[k]);
  }
};

struct ConformalBoundaryPoint {
  Vec2 point;
  Vec2 normal;
  Vec2 tangent;
  double jacobian_factor;  // sqrt of the conformal map derivative magnitude
};

// Reference solid shape: a disk of radius a, or the image of the unit circle
// under an exterior conformal map
//   Psi(zeta) = rho zeta + c0 + sum_{k>=1} c_k zeta^{-k},  |zeta| >= 1.
// Mass properties are prescribed, the reference center h0 defaults to the
// area centroid of the enclosed region.
class SolidShape {
 public:
  enum class Kind { Disk, Conformal };

  static SolidShape disk(double radius, double mass, double inertia,
                         const Vec2& center = Vec2::Zero());
  static SolidShape conformal(double rho, const Vec2& c0,
                              const std::vector<std::complex<double>>& coeffs,
                              double mass, double inertia);

  Kind kind() const { return kind_; }
  bool is_disk() const { return kind_ == Kind::Disk; }
  double mass() const { return mass_; }
  double inertia() const { return inertia_; }
  const Vec2& reference_center() const { return h0_; }
  double scale() const { return scale_; }  // max boundary distance from h0

  // Boundary point / derivative of the reference curve at parameter s
  // (counterclockwise). For disks the curve is center + a e^{is}.
  Vec2 boundary_point(double s) const;
  Vec2 boundary_derivative(double s) const;
  // Complex derivative Psi'(e^{is}) of the exterior map (= a for disk(a)).
  std::complex<double> map_derivative(double s) const;
  // Image of zeta under the reference map (|zeta| >= 1 expected).
  Vec2 map_point(const std::complex<double>& zeta) const;
  // Conformal center: anchor point of the exterior map (= disk center).
  const Vec2& conformal_center() const { return c0_; }

  BoundarySampling sample(const Pose& q, int n) const;

  std::size_t id() const { return id_; }

 private:
  SolidShape() = default;
  void finalize();
  void check_injective() const;

  Kind kind_ = Kind::Disk;
  double radius_ = 1.0;  // disk
  double rho_ = 1.0;     // conformal leading coefficient
  Vec2 c0_ = Vec2::Zero();
  std::vector<std::complex<double>> coeffs_;
  double mass_ = 1.0;
  double inertia_ = 1.0;
  Vec2 h0_ = Vec2::Zero();
  double scale_ = 1.0;
  std::size_t id_ = 0;
};

// Outer domain: a disk of radius R centered at the origin, or a star-shaped
// analytic boundary rho(phi) = R + sum_k (a_k cos k phi + b_k sin k phi).
// Sigma is the control arc, an angular interval of the outer boundary.
struct DomainSpec {
  double outer_radius = 10.0;
  Eigen::VectorXd radius_cos;  // optional Fourier perturbation, index k-1
  Eigen::VectorXd radius_sin;
  double sigma_begin = 0.0;  // angular interval [begin, end], begin < end
  double sigma_end = 1.0;
  double delta = 1.0;  // safety clearance

  bool is_circle() const {
    return radius_cos.size() == 0 && radius_sin.size() == 0;
  }
  double radius(double phi) const;
  double radius_derivative(double phi) const;
  Vec2 boundary_point(double phi) const;
  bool in_sigma(double phi) const;
  double sigma_length() const;  // arc length of Sigma

  BoundarySampling sample(int n) const;
  void validate() const;  // throws ConfigError on bad parameters
};

// Sampling of the placed solid boundary S(q) = h + R(theta)(S0 - h0).
BoundarySampling place_solid(const SolidShape& shape, const Pose& q, int n);

// Distance between S(q) and the outer boundary; negative when the sampled
// solid pokes through it. Membership in Q_delta is clearance > delta.
double clearance(const SolidShape& shape, const DomainSpec& domain,
                 const Pose& q, int n = 512);

// Placed boundary point with normal, tangent and the conformal pullback
// factor sqrt(|Psi'(e^{is})|).
ConformalBoundaryPoint conformal_boundary(const SolidShape& shape,
                                          const Pose& q, double s);

}  // namespace immerse
