#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "immerse/errors.hpp"
#include "immerse/geometry.hpp"
#include "oracles.hpp"

using namespace immerse;

namespace {
SolidShape joukowski(double c = 0.3) {
  return SolidShape::conformal(1.0, Vec2::Zero(), {{c, 0.0}}, 1.0, 0.5);
}
DomainSpec domain10() {
  DomainSpec d;
  d.outer_radius = 10.0;
  d.sigma_begin = oracles::kPi / 4;
  d.sigma_end = 3 * oracles::kPi / 4;
  d.delta = 1.0;
  return d;
}
}  // namespace

TEST_CASE("disk sampling: unit circle points, normals point into the solid") {
  auto disk = SolidShape::disk(1.0, 1.0, 0.5);
  auto b = place_solid(disk, Pose(0, 0, 0), 64);
  for (int k = 0; k < b.size(); ++k) {
    CHECK((b.points.col(k).norm()) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK((b.normals.col(k) + b.points.col(k)).norm() < 1e-12);  // n = -x
    CHECK(std::abs(b.r[k]) < 1e-12);  // (x-h)^perp . n = 0 on a centered disk
    CHECK(std::abs(b.normals.col(k).dot(b.tangents.col(k))) < 1e-13);
    CHECK(b.normals.col(k).norm() == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("translation moves points, leaves normals") {
  auto shape = joukowski();
  Vec2 h(0.4, -0.2);
  auto b0 = place_solid(shape, Pose(0, 0, 0), 48);
  auto b1 = place_solid(shape, Pose(h, 0), 48);
  for (int k = 0; k < b0.size(); ++k) {
    CHECK((b1.points.col(k) - b0.points.col(k) - h).norm() < 1e-13);
    CHECK((b1.normals.col(k) - b0.normals.col(k)).norm() < 1e-13);
    CHECK(b1.weights[k] == doctest::Approx(b0.weights[k]).epsilon(1e-13));
  }
}

TEST_CASE("joukowski ellipse rotated by pi/2 maps Psi(1)=1.3 to (0,1.3)") {
  auto shape = joukowski();
  auto b = place_solid(shape, Pose(0, 0, oracles::kPi / 2), 64);
  CHECK((b.points.col(0) - Vec2(0.0, 1.3)).norm() < 1e-12);
}

TEST_CASE("pose composition commutes with placement") {
  auto shape = joukowski();
  Pose q(0.3, -0.1, 0.7);
  Vec2 d(0.2, 0.5);
  double phi = -0.4;
  Pose composed(d + rotation(phi) * q.h, q.theta + phi);
  auto a = place_solid(shape, q, 32);
  auto b = place_solid(shape, composed, 32);
  for (int k = 0; k < a.size(); ++k) {
    Vec2 moved = d + rotation(phi) * a.points.col(k);
    CHECK((b.points.col(k) - moved).norm() < 1e-12);
  }
}

TEST_CASE("clearance on concentric disks") {
  auto disk = SolidShape::disk(1.0, 1.0, 0.5);
  auto dom = domain10();
  CHECK(clearance(disk, dom, Pose(2, 0, 0)) == doctest::Approx(7.0).epsilon(1e-10));
  CHECK(clearance(disk, dom, Pose(0, 0, 0)) == doctest::Approx(9.0).epsilon(1e-10));
  CHECK(clearance(joukowski(), dom, Pose(0, 0, 0)) == doctest::Approx(8.7).epsilon(1e-10));
  // overlap reported as a negative value
  CHECK(clearance(disk, dom, Pose(9.5, 0, 0)) < 0);
}

TEST_CASE("clearance invariant under simultaneous rotation (disk domain)") {
  auto shape = joukowski();
  auto dom = domain10();
  Pose q(3.0, 1.0, 0.3);
  double c0 = clearance(shape, dom, q);
  for (double rot : {0.7, 1.9, 4.0}) {
    Pose qr(rotation(rot) * q.h, q.theta + rot);
    CHECK(clearance(shape, dom, qr) == doctest::Approx(c0).epsilon(1e-9));
  }
}

TEST_CASE("closed-curve quadrature identities") {
  auto shape = joukowski();
  auto dom = domain10();
  for (int n : {64, 256}) {
    auto b = place_solid(shape, Pose(0.5, 0.2, 0.4), n);
    double diam = 2 * 1.3;
    CHECK(b.closure_normal().norm() <= 1e-8 * b.length());
    CHECK(std::abs(b.closure_rotational()) <= 1e-8 * b.length() * diam);
    auto o = dom.sample(n);
    CHECK(o.closure_normal().norm() <= 1e-8 * o.length());
  }
}

TEST_CASE("conformal boundary jacobian factors") {
  auto disk = SolidShape::disk(1.0, 1.0, 0.5);
  for (double s : {0.0, 0.9, 2.4})
    CHECK(conformal_boundary(disk, Pose(0, 0, 0), s).jacobian_factor ==
          doctest::Approx(1.0).epsilon(1e-13));
  auto shape = joukowski();
  auto p0 = conformal_boundary(shape, Pose(0, 0, 0), 0.0);
  CHECK(p0.point.x() == doctest::Approx(1.3).epsilon(1e-13));
  CHECK(p0.jacobian_factor == doctest::Approx(std::sqrt(0.7)).epsilon(1e-12));
  auto p1 = conformal_boundary(shape, Pose(0, 0, 0), oracles::kPi / 2);
  CHECK(p1.point.y() == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(p1.jacobian_factor == doctest::Approx(std::sqrt(1.3)).epsilon(1e-12));
}

TEST_CASE("non-injective conformal maps are rejected") {
  CHECK_THROWS_AS(SolidShape::conformal(1.0, Vec2::Zero(), {{1.0, 0.0}}, 1.0, 1.0),
                  ConfigError);
  CHECK_THROWS_AS(SolidShape::conformal(1.0, Vec2::Zero(), {{1.2, 0.0}}, 1.0, 1.0),
                  ConfigError);
}

TEST_CASE("invalid mass properties are rejected") {
  CHECK_THROWS_AS(SolidShape::disk(1.0, -1.0, 0.5), ConfigError);
  CHECK_THROWS_AS(SolidShape::disk(1.0, 1.0, 0.0), ConfigError);
}

TEST_CASE("star-shaped outer boundary sampling") {
  DomainSpec d;
  d.outer_radius = 5.0;
  d.radius_cos.resize(2);
  d.radius_cos << 0.0, 0.3;  // rho = 5 + 0.3 cos(2 phi)
  d.sigma_begin = 0.0;
  d.sigma_end = 1.0;
  d.delta = 0.5;
  d.validate();
  auto b = d.sample(128);
  CHECK(b.closure_normal().norm() <= 1e-8 * b.length());
  // normals point outward: x . n > 0 for a star-shaped curve about the origin
  for (int k = 0; k < b.size(); ++k) CHECK(b.points.col(k).dot(b.normals.col(k)) > 0);
  auto disk = SolidShape::disk(1.0, 1.0, 0.5);
  double c = clearance(disk, d, Pose(0, 0, 0), 512);
  CHECK(c > 3.5);
  CHECK(c < 4.8 - 1.0 + 0.1);
}

TEST_CASE("domain validation rejects bad Sigma and delta") {
  DomainSpec d = domain10();
  d.sigma_begin = 2.0;
  d.sigma_end = 2.0;
  CHECK_THROWS_AS(d.validate(), ConfigError);
  d = domain10();
  d.delta = 11.0;
  CHECK_THROWS_AS(d.validate(), ConfigError);
  d = domain10();
  CHECK_NOTHROW(d.validate());
}
