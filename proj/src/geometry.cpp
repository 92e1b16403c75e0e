#include "immerse/geometry.hpp"

#include <atomic>

#include "immerse/errors.hpp"

namespace immerse {

namespace {
std::atomic<std::size_t> next_shape_id{1};
}

Vec2 BoundarySampling::closure_normal() const {
  return Vec2((weights * normals.row(0).transpose().array()).sum(),
              (weights * normals.row(1).transpose().array()).sum());
}

double BoundarySampling::closure_rotational() const {
  return (weights * r).sum();
}

SolidShape SolidShape::disk(double radius, double mass, double inertia,
                            const Vec2& center) {
  if (radius <= 0) throw ConfigError("disk radius must be positive");
  SolidShape s;
  s.kind_ = Kind::Disk;
  s.radius_ = radius;
  s.rho_ = radius;
  s.c0_ = center;
  s.mass_ = mass;
  s.inertia_ = inertia;
  s.finalize();
  return s;
}

SolidShape SolidShape::conformal(double rho, const Vec2& c0,
                                 const std::vector<std::complex<double>>& coeffs,
                                 double mass, double inertia) {
  if (rho <= 0) throw ConfigError("conformal map leading coefficient must be positive");
  SolidShape s;
  s.kind_ = Kind::Conformal;
  s.rho_ = rho;
  s.c0_ = c0;
  s.coeffs_ = coeffs;
  s.mass_ = mass;
  s.inertia_ = inertia;
  s.finalize();
  return s;
}

Vec2 SolidShape::map_point(const std::complex<double>& zeta) const {
  if (kind_ == Kind::Disk) {
    std::complex<double> w = radius_ * zeta;
    return c0_ + Vec2(w.real(), w.imag());
  }
  std::complex<double> w = rho_ * zeta;
  std::complex<double> zinv = 1.0 / zeta;
  std::complex<double> p = zinv;
  for (const auto& c : coeffs_) {
    w += c * p;
    p *= zinv;
  }
  return c0_ + Vec2(w.real(), w.imag());
}

Vec2 SolidShape::boundary_point(double s) const {
  return map_point(std::polar(1.0, s));
}

std::complex<double> SolidShape::map_derivative(double s) const {
  if (kind_ == Kind::Disk) return {radius_, 0.0};
  std::complex<double> zeta = std::polar(1.0, s);
  std::complex<double> zinv = 1.0 / zeta;
  std::complex<double> d = rho_;
  std::complex<double> p = zinv * zinv;
  double k = 1.0;
  for (const auto& c : coeffs_) {
    d -= k * c * p;
    p *= zinv;
    k += 1.0;
  }
  return d;
}

Vec2 SolidShape::boundary_derivative(double s) const {
  // d/ds Psi(e^{is}) = i e^{is} Psi'(e^{is})
  std::complex<double> d =
      std::complex<double>(0, 1) * std::polar(1.0, s) * map_derivative(s);
  return Vec2(d.real(), d.imag());
}

void SolidShape::check_injective() const {
  if (kind_ == Kind::Disk) return;
  const int n = 512;
  std::vector<Vec2> pts(n);
  std::vector<std::complex<double>> zs(n);
  for (int i = 0; i < n; ++i) {
    double s = kTwoPi * i / n;
    zs[i] = std::polar(1.0, s);
    pts[i] = boundary_point(s);
  }
  double min_ratio = std::numeric_limits<double>::max();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double dz = std::abs(zs[i] - zs[j]);
      min_ratio = std::min(min_ratio, (pts[i] - pts[j]).norm() / dz);
    }
  // Psi' must not vanish on or slightly outside the circle.
  double min_deriv = std::numeric_limits<double>::max();
  for (int i = 0; i < n; ++i)
    min_deriv = std::min(min_deriv, std::abs(map_derivative(kTwoPi * i / n)));
  if (min_ratio <= 1e-6 * rho_ || min_deriv <= 1e-6 * rho_)
    throw ConfigError("conformal shape map is not injective on the boundary");
}

void SolidShape::finalize() {
  if (mass_ <= 0) throw ConfigError("solid mass must be positive");
  if (inertia_ <= 0) throw ConfigError("solid inertia must be positive");
  check_injective();

  // Area centroid by boundary quadrature (Green's theorem); this is the
  // reference center of mass for a homogeneous body.
  const int n = 1024;
  double area = 0, cx = 0, cy = 0;
  for (int i = 0; i < n; ++i) {
    double s = kTwoPi * i / n;
    Vec2 x = boundary_point(s);
    Vec2 d = boundary_derivative(s);
    area += 0.5 * (x.x() * d.y() - x.y() * d.x());
    cx += 0.5 * x.x() * x.x() * d.y();
    cy += -0.5 * x.y() * x.y() * d.x();
  }
  area *= kTwoPi / n;
  cx *= kTwoPi / n;
  cy *= kTwoPi / n;
  if (area <= 0) throw ConfigError("shape boundary is not counterclockwise");
  h0_ = Vec2(cx / area, cy / area);

  scale_ = 0;
  for (int i = 0; i < n; ++i)
    scale_ = std::max(scale_, (boundary_point(kTwoPi * i / n) - h0_).norm());
  id_ = next_shape_id.fetch_add(1);
}

BoundarySampling SolidShape::sample(const Pose& q, int n) const {
  BoundarySampling b;
  b.s.resize(n);
  b.points.resize(2, n);
  b.normals.resize(2, n);
  b.tangents.resize(2, n);
  b.r.resize(n);
  b.weights.resize(n);
  const Mat2 R = rotation(q.theta);
  for (int k = 0; k < n; ++k) {
    double s = kTwoPi * k / n;
    Vec2 x0 = boundary_point(s);
    Vec2 d0 = boundary_derivative(s);
    Vec2 x = q.h + R * (x0 - h0_);
    Vec2 d = R * d0;
    double speed = d.norm();
    Vec2 tau = d / speed;
    Vec2 nrm = perp(tau);  // into the solid = out of the fluid
    b.s[k] = s;
    b.points.col(k) = x;
    b.tangents.col(k) = tau;
    b.normals.col(k) = nrm;
    b.r[k] = perp(x - q.h).dot(nrm);
    b.weights[k] = speed * kTwoPi / n;
  }
  return b;
}

BoundarySampling place_solid(const SolidShape& shape, const Pose& q, int n) {
  if (n < 16) throw ConfigError("place_solid needs at least 16 samples");
  return shape.sample(q, n);
}

double DomainSpec::radius(double phi) const {
  double r = outer_radius;
  for (int k = 0; k < radius_cos.size(); ++k) r += radius_cos[k] * std::cos((k + 1) * phi);
  for (int k = 0; k < radius_sin.size(); ++k) r += radius_sin[k] * std::sin((k + 1) * phi);
  return r;
}

double DomainSpec::radius_derivative(double phi) const {
  double r = 0;
  for (int k = 0; k < radius_cos.size(); ++k) r += -(k + 1) * radius_cos[k] * std::sin((k + 1) * phi);
  for (int k = 0; k < radius_sin.size(); ++k) r += (k + 1) * radius_sin[k] * std::cos((k + 1) * phi);
  return r;
}

Vec2 DomainSpec::boundary_point(double phi) const {
  double r = radius(phi);
  return Vec2(r * std::cos(phi), r * std::sin(phi));
}

bool DomainSpec::in_sigma(double phi) const {
  double a = wrap_angle(phi - sigma_begin);
  return a > 0 && a < (sigma_end - sigma_begin);
}

double DomainSpec::sigma_length() const {
  const int n = 2048;
  double len = 0;
  for (int k = 0; k < n; ++k) {
    double phi = sigma_begin + (sigma_end - sigma_begin) * (k + 0.5) / n;
    Vec2 d(radius_derivative(phi) * std::cos(phi) - radius(phi) * std::sin(phi),
           radius_derivative(phi) * std::sin(phi) + radius(phi) * std::cos(phi));
    len += d.norm() * (sigma_end - sigma_begin) / n;
  }
  return len;
}

BoundarySampling DomainSpec::sample(int n) const {
  BoundarySampling b;
  b.s.resize(n);
  b.points.resize(2, n);
  b.normals.resize(2, n);
  b.tangents.resize(2, n);
  b.r.resize(n);
  b.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    double phi = kTwoPi * k / n;
    double r = radius(phi), dr = radius_derivative(phi);
    Vec2 x(r * std::cos(phi), r * std::sin(phi));
    Vec2 d(dr * std::cos(phi) - r * std::sin(phi),
           dr * std::sin(phi) + r * std::cos(phi));
    double speed = d.norm();
    Vec2 tau = d / speed;
    Vec2 nrm = -perp(tau);  // out of Omega = out of the fluid
    b.s[k] = phi;
    b.points.col(k) = x;
    b.tangents.col(k) = tau;
    b.normals.col(k) = nrm;
    b.r[k] = perp(x).dot(nrm);
    b.weights[k] = speed * kTwoPi / n;
  }
  return b;
}

void DomainSpec::validate() const {
  if (outer_radius <= 0) throw ConfigError("outer radius must be positive");
  if (!(sigma_begin < sigma_end)) throw ConfigError("Sigma must be a nonempty open arc");
  if (sigma_end - sigma_begin >= kTwoPi) throw ConfigError("Sigma must be a proper arc");
  if (delta <= 0) throw ConfigError("delta must be positive");
  if (delta >= outer_radius) throw ConfigError("delta must be smaller than the outer radius");
  const int n = 1024;
  for (int k = 0; k < n; ++k)
    if (radius(kTwoPi * k / n) <= 0)
      throw ConfigError("outer boundary radius function must stay positive");
}

double clearance(const SolidShape& shape, const DomainSpec& domain,
                 const Pose& q, int n) {
  BoundarySampling solid = shape.sample(q, n);
  if (domain.is_circle()) {
    // distance of a point to a circle is exact along the ray
    double R = domain.outer_radius;
    double worst = std::numeric_limits<double>::max();
    for (int k = 0; k < solid.size(); ++k)
      worst = std::min(worst, R - solid.points.col(k).norm());
    return worst;
  }
  BoundarySampling outer = domain.sample(n);
  double inside_margin = std::numeric_limits<double>::max();
  for (int k = 0; k < solid.size(); ++k) {
    Vec2 x = solid.points.col(k);
    double phi = std::atan2(x.y(), x.x());
    inside_margin = std::min(inside_margin, domain.radius(phi) - x.norm());
  }
  double dmin = std::numeric_limits<double>::max();
  for (int k = 0; k < solid.size(); ++k)
    for (int j = 0; j < outer.size(); ++j)
      dmin = std::min(dmin, (solid.points.col(k) - outer.points.col(j)).norm());
  return inside_margin < 0 ? inside_margin : dmin;
}

ConformalBoundaryPoint conformal_boundary(const SolidShape& shape,
                                          const Pose& q, double s) {
  ConformalBoundaryPoint out;
  const Mat2 R = rotation(q.theta);
  Vec2 x0 = shape.boundary_point(s);
  Vec2 d = R * shape.boundary_derivative(s);
  out.point = q.h + R * (x0 - shape.reference_center());
  out.tangent = d.normalized();
  out.normal = perp(out.tangent);
  out.jacobian_factor = std::sqrt(std::abs(shape.map_derivative(s)));
  return out;
}

}  // namespace immerse
