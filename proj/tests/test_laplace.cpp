#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "immerse/errors.hpp"
#include "immerse/laplace.hpp"
#include "oracles.hpp"

using namespace immerse;

namespace {

std::shared_ptr<const SolidShape> unit_disk() {
  return std::make_shared<SolidShape>(SolidShape::disk(1.0, 1.0, 0.5));
}
std::shared_ptr<const SolidShape> joukowski() {
  return std::make_shared<SolidShape>(
      SolidShape::conformal(1.0, Vec2::Zero(), {{0.3, 0.0}}, 1.0, 0.5));
}
DomainSpec domain10() {
  DomainSpec d;
  d.outer_radius = 10.0;
  d.sigma_begin = oracles::kPi / 4;
  d.sigma_end = 3 * oracles::kPi / 4;
  d.delta = 1.0;
  return d;
}

NeumannData x_translation_data(const PoseContext& ctx) {
  // dn Phi_1 = n_1 on the solid boundary, 0 outside; evaluate the normal
  // through the placed sampling geometry.
  auto shape = &ctx.shape();
  Pose q = ctx.pose();
  return NeumannData::on_solid([shape, q](double s) {
    Vec2 d = rotation(q.theta) * shape->boundary_derivative(s);
    Vec2 tau = d.normalized();
    return perp(tau).x();
  });
}

}  // namespace

TEST_CASE("zero data gives the zero field") {
  auto dom = domain10();
  auto shape = unit_disk();
  PoseContext ctx(shape, dom, Pose(0, 0, 0), SolverConfig::for_geometry(*shape, dom));
  auto f = ctx.solve_neumann(NeumannData::zero());
  CHECK(f.strengths.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(f.log_strength == 0.0);
  auto [v, g] = evaluate(f, Vec2(3.0, 1.0));
  CHECK(v == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(g.norm() < 1e-14);
}

TEST_CASE("concentric annulus Kirchhoff potential matches the series oracle") {
  auto dom = domain10();
  auto shape = unit_disk();
  PoseContext ctx(shape, dom, Pose(0, 0, 0), SolverConfig::for_geometry(*shape, dom));
  auto f = ctx.solve_neumann(x_translation_data(ctx));
  CHECK(f.residual <= 1e-8 * 2);

  oracles::AnnulusKirchhoff ex(1.0, 10.0);
  double ref_scale = std::abs(ex.value(1.0, 0.0));
  for (double r : {1.0, 1.5, 3.0, 7.0, 9.9}) {
    for (double phi : {0.1, 1.3, 2.9, 4.4}) {
      Vec2 x(r * std::cos(phi), r * std::sin(phi));
      auto [v, g] = evaluate(f, x);
      CHECK(std::abs(v - ex.value(r, phi)) <= 1e-6 * ref_scale);
      CHECK((g - ex.gradient(r, phi)).norm() <= 1e-6 * ref_scale);
    }
  }
}

TEST_CASE("radial flux datum reproduces the log solution") {
  auto dom = domain10();
  auto shape = unit_disk();
  PoseContext ctx(shape, dom, Pose(0, 0, 0), SolverConfig::for_geometry(*shape, dom));
  const double a = 1.0, R = 10.0;
  NeumannData data{[=](double) { return 1.0 / (2 * oracles::kPi * a); },
                   [=](double) { return -1.0 / (2 * oracles::kPi * R); }};
  auto f = ctx.solve_neumann(data);
  CHECK(f.log_strength == doctest::Approx(-1.0).epsilon(1e-10));
  for (double r : {1.0, 2.0, 5.0, 9.0}) {
    auto [v, g] = evaluate(f, Vec2(r, 0));
    CHECK(v == doctest::Approx(oracles::annulus_log_solution(r, a)).epsilon(1e-8));
  }
}

TEST_CASE("incompatible flux data is rejected") {
  auto dom = domain10();
  auto shape = unit_disk();
  PoseContext ctx(shape, dom, Pose(0, 0, 0), SolverConfig::for_geometry(*shape, dom));
  CHECK_THROWS_AS(ctx.solve_neumann(NeumannData::on_solid([](double) { return 1.0; })),
                  IncompatibleData);
}

TEST_CASE("stream function: annulus oracle, normalization and outer trace") {
  auto dom = domain10();
  auto shape = unit_disk();
  PoseContext ctx(shape, dom, Pose(0, 0, 0), SolverConfig::for_geometry(*shape, dom));
  auto psi = ctx.solve_stream();

  CHECK(ctx.solid_flux(psi) == doctest::Approx(-1.0).epsilon(1e-8));
  for (double r : {1.0, 2.0, 5.0, 9.5}) {
    auto [v, g] = evaluate(psi, Vec2(r * 0.6, r * 0.8));
    CHECK(v == doctest::Approx(oracles::annulus_stream(r, 10.0)).epsilon(1e-7));
  }
  Eigen::VectorXd vals;
  psi.evaluate_batch(ctx.outer_fine().points, &vals, nullptr);
  CHECK(vals.cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("stream function on the joukowski solid") {
  auto dom = domain10();
  auto shape = joukowski();
  PoseContext ctx(shape, dom, Pose(0.5, -0.3, 0.4), SolverConfig::for_geometry(*shape, dom));
  auto psi = ctx.solve_stream();
  CHECK(ctx.solid_flux(psi) == doctest::Approx(-1.0).epsilon(1e-8));
  // constant trace on the solid boundary
  Eigen::VectorXd vals;
  psi.evaluate_batch(ctx.solid_fine().points, &vals, nullptr);
  CHECK((vals.array() - vals.mean()).abs().maxCoeff() < 1e-6);
}

TEST_CASE("evaluate: hand-computed kernel and finite-difference gradient") {
  HarmonicField f;
  f.sources.resize(2, 1);
  f.sources.col(0) = Vec2(0, 0);
  f.strengths.resize(1);
  f.strengths[0] = 1.0;
  auto [v, g] = evaluate(f, Vec2(2.0, 0.0));
  CHECK(v == doctest::Approx(std::log(2.0) / (2 * oracles::kPi)).epsilon(1e-14));
  CHECK(g.x() == doctest::Approx(1.0 / (4 * oracles::kPi)).epsilon(1e-14));
  CHECK(std::abs(g.y()) < 1e-15);

  // gradient against central differences of the value
  const double h = 1e-4;
  Vec2 x(1.3, -0.8);
  Vec2 fd((f.value(x + Vec2(h, 0)) - f.value(x - Vec2(h, 0))) / (2 * h),
          (f.value(x + Vec2(0, h)) - f.value(x - Vec2(0, h))) / (2 * h));
  CHECK((fd - f.gradient(x)).norm() < 1e-6);

  CHECK_THROWS_AS(evaluate(f, Vec2(1e-9, 0)), EvaluationNearSource);
}

TEST_CASE("reciprocity and flux conservation for two solved fields") {
  auto dom = domain10();
  auto shape = joukowski();
  PoseContext ctx(shape, dom, Pose(0.2, 0.1, 0.3), SolverConfig::for_geometry(*shape, dom));

  auto alpha = ctx.solve_neumann(x_translation_data(ctx));
  auto shape_raw = shape.get();
  Pose q = ctx.pose();
  auto beta = ctx.solve_neumann(NeumannData::on_solid([shape_raw, q](double s) {
    Vec2 d = rotation(q.theta) * shape_raw->boundary_derivative(s);
    return perp(d.normalized()).y();
  }));

  auto pair_integral = [&](const HarmonicField& u, const HarmonicField& w) {
    double acc = 0;
    for (const BoundarySampling* b : {&ctx.solid_fine(), &ctx.outer_fine()}) {
      Eigen::VectorXd uv;
      Eigen::Matrix2Xd wg;
      u.evaluate_batch(b->points, &uv, nullptr);
      w.evaluate_batch(b->points, nullptr, &wg);
      for (int k = 0; k < b->size(); ++k)
        acc += b->weights[k] * uv[k] * wg.col(k).dot(b->normals.col(k));
    }
    return acc;
  };
  double lhs = pair_integral(alpha, beta);
  double rhs = pair_integral(beta, alpha);
  double scale = std::max(std::abs(lhs), std::abs(rhs));
  CHECK(std::abs(lhs - rhs) <= 1e-6 * scale);

  for (const HarmonicField* f : {&alpha, &beta}) {
    double total = 0;
    for (const BoundarySampling* b : {&ctx.solid_fine(), &ctx.outer_fine()}) {
      Eigen::Matrix2Xd g;
      f->evaluate_batch(b->points, nullptr, &g);
      for (int k = 0; k < b->size(); ++k)
        total += b->weights[k] * g.col(k).dot(b->normals.col(k));
    }
    CHECK(std::abs(total) < 1e-8);
  }
}

TEST_CASE("pose cache memoizes contexts") {
  auto dom = domain10();
  auto shape = unit_disk();
  LaplaceCache cache(shape, dom, SolverConfig::for_geometry(*shape, dom));
  auto a = cache.context(Pose(0.1, 0.2, 0.3));
  auto b = cache.context(Pose(0.1, 0.2, 0.3));
  CHECK(a.get() == b.get());
  CHECK(cache.hits() == 1);
  auto c = cache.context(Pose(0.1, 0.2, 0.300001));
  CHECK(a.get() != c.get());
}

TEST_CASE("spectral derivative of a smooth periodic trace") {
  const int n = 64;
  Eigen::VectorXd f(n), expected(n);
  for (int k = 0; k < n; ++k) {
    double s = kTwoPi * k / n;
    f[k] = std::sin(s) + 0.25 * std::cos(3 * s);
    expected[k] = std::cos(s) - 0.75 * std::sin(3 * s);
  }
  Eigen::VectorXd d = spectral_derivative(f);
  CHECK((d - expected).cwiseAbs().maxCoeff() < 1e-10);
}
