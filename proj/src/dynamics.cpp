#include "immerse/dynamics.hpp"

#include <atomic>
#include <thread>

#include "immerse/errors.hpp"

namespace immerse {

namespace {

// Kirchhoff Neumann data at a pose: dn Phi_i = n_i on the solid boundary,
// dn Phi_3 = (x - h)^perp . n, all zero on the outer boundary.
NeumannData kirchhoff_data(const SolidShape& shape, const Pose& q, int i) {
  const SolidShape* sp = &shape;
  if (i < 2) {
    return NeumannData::on_solid([sp, q, i](double s) {
      Vec2 tau = (rotation(q.theta) * sp->boundary_derivative(s)).normalized();
      return perp(tau)[i];
    });
  }
  return NeumannData::on_solid([sp, q](double s) {
    Mat2 R = rotation(q.theta);
    Vec2 x = q.h + R * (sp->boundary_point(s) - sp->reference_center());
    Vec2 tau = (R * sp->boundary_derivative(s)).normalized();
    return perp(x - q.h).dot(perp(tau));
  });
}

// run f(0..n-1) on up to `threads` workers
void parallel_for(int n, int threads, const std::function<void(int)>& f) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min(threads, n) - 1; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

Pose shifted(const Pose& q, int axis, double d) {
  Vec3 v = q.as_vec3();
  v[axis] += d;
  return Pose::from_vec3(v);
}

// boundary tangential derivative of a trace, d/dsigma = d/ds / |x'(s)|
Eigen::VectorXd tangential_derivative(const BoundarySampling& b,
                                      const Eigen::VectorXd& trace) {
  Eigen::VectorXd ds = spectral_derivative(trace);
  const double h = kTwoPi / b.size();
  for (int k = 0; k < b.size(); ++k) ds[k] /= b.weights[k] / h;
  return ds;
}

}  // namespace

DynamicsContext::DynamicsContext(std::shared_ptr<const SolidShape> shape,
                                 DomainSpec domain, DynamicsConfig cfg)
    : shape_(shape),
      cfg_(cfg),
      cache_(shape, std::move(domain), cfg.solver, cfg.cache_capacity) {
  mg_ = Mat3::Zero();
  mg_(0, 0) = shape_->mass();
  mg_(1, 1) = shape_->mass();
  mg_(2, 2) = shape_->inertia();
}

std::shared_ptr<const PoseContext> DynamicsContext::pose_context(const Pose& q) const {
  return cache_.context(q);
}

bool DynamicsContext::admissible(const Pose& q) const {
  return clearance(*shape_, cache_.domain(), q, 256) > cache_.domain().delta;
}

std::array<const HarmonicField*, 3> DynamicsContext::kirchhoff(const PoseContext& ctx) const {
  std::array<const HarmonicField*, 3> out;
  static const char* ids[3] = {"phi1", "phi2", "phi3"};
  for (int i = 0; i < 3; ++i)
    out[i] = &ctx.field(ids[i], [&ctx, i, this]() {
      // a homogeneous disk has identically zero rotational datum
      if (i == 2 && shape_->is_disk()) {
        HarmonicField zero;
        zero.sources.resize(2, 0);
        zero.strengths.resize(0);
        return zero;
      }
      return ctx.solve_neumann(kirchhoff_data(*shape_, ctx.pose(), i));
    });
  return out;
}

std::array<const HarmonicField*, 3> DynamicsContext::kirchhoff(const Pose& q) const {
  auto ctx = pose_context(q);
  return kirchhoff(*ctx);
}

const HarmonicField& DynamicsContext::stream(const PoseContext& ctx) const {
  return ctx.field("psi", [&ctx]() { return ctx.solve_stream(); });
}

Mat3 DynamicsContext::added_mass_matrix(const PoseContext& ctx, double* asymmetry) const {
  auto phis = kirchhoff(ctx);
  const BoundarySampling& b = ctx.solid_fine();
  const int n = b.size();
  Eigen::MatrixXd traces = Eigen::MatrixXd::Zero(3, n);
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd vals;
    phis[i]->evaluate_batch(b.points, &vals, nullptr);
    traces.row(i) = vals.transpose();
  }
  Mat3 raw = Mat3::Zero();
  for (int k = 0; k < n; ++k) {
    Vec3 data = b.kirchhoff_data(k);
    raw += b.weights[k] * Vec3(traces.col(k)) * data.transpose();
  }
  double scale = raw.cwiseAbs().maxCoeff();
  if (asymmetry)
    *asymmetry = scale > 0 ? (raw - raw.transpose()).cwiseAbs().maxCoeff() / scale : 0.0;
  return 0.5 * (raw + raw.transpose());
}

InertiaModel DynamicsContext::added_mass(const Pose& q) const {
  InertiaModel m;
  m.Mg = mg_;
  auto ctx = pose_context(q);
  m.Ma = added_mass_matrix(*ctx, &m.asymmetry);
  return m;
}

ChristoffelTensor DynamicsContext::christoffel(const Pose& q, double step,
                                               bool richardson_check) const {
  auto build = [this, &q](double d) {
    std::array<Mat3, 6> M;
    parallel_for(6, cfg_.threads, [&](int i) {
      Pose p = shifted(q, i / 2, (i % 2 == 0) ? d : -d);
      M[i] = added_mass_matrix(*pose_context(p));
    });
    std::array<Mat3, 3> dMa;
    for (int k = 0; k < 3; ++k) dMa[k] = (M[2 * k] - M[2 * k + 1]) / (2 * d);
    ChristoffelTensor g;
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          g.gamma[k](i, j) = 0.5 * (dMa[i](k, j) + dMa[j](k, i) - dMa[k](i, j));
    return g;
  };
  ChristoffelTensor g = build(step);
  if (richardson_check) {
    ChristoffelTensor g2 = build(step / 2);
    double num = 0, den = 0;
    for (int k = 0; k < 3; ++k) {
      num = std::max(num, (g.gamma[k] - g2.gamma[k]).cwiseAbs().maxCoeff());
      den = std::max(den, g2.gamma[k].cwiseAbs().maxCoeff());
    }
    if (num > 1e-4 * std::max(den, 1e-12))
      throw StepTooLarge("Christoffel finite-difference step fails the Richardson check");
  }
  return g;
}

DynamicsContext::Metric DynamicsContext::metric(const Pose& q) const {
  const double d = cfg_.fd_step;
  std::array<Mat3, 7> M;
  double asym = 0;
  parallel_for(7, cfg_.threads, [&](int i) {
    Pose p = (i == 0) ? q : shifted(q, (i - 1) / 2, ((i - 1) % 2 == 0) ? d : -d);
    M[i] = added_mass_matrix(*pose_context(p), i == 0 ? &asym : nullptr);
  });
  Metric out;
  out.inertia.Mg = mg_;
  out.inertia.Ma = M[0];
  out.inertia.asymmetry = asym;
  std::array<Mat3, 3> dMa;
  for (int k = 0; k < 3; ++k) dMa[k] = (M[1 + 2 * k] - M[2 + 2 * k]) / (2 * d);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        out.gamma.gamma[k](i, j) = 0.5 * (dMa[i](k, j) + dMa[j](k, i) - dMa[k](i, j));
  return out;
}

std::pair<Vec3, Vec3> DynamicsContext::circulation_fields(const Pose& q) const {
  auto ctx = pose_context(q);
  auto phis = kirchhoff(*ctx);
  const HarmonicField& psi = stream(*ctx);
  const BoundarySampling& b = ctx->solid_fine();
  const int n = b.size();

  Eigen::Matrix2Xd psi_grad(2, n);
  psi.evaluate_batch(b.points, nullptr, &psi_grad);
  Eigen::MatrixXd dtau(3, n);
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd vals;
    phis[i]->evaluate_batch(b.points, &vals, nullptr);
    dtau.row(i) = tangential_derivative(b, vals).transpose();
  }

  Vec3 E = Vec3::Zero(), B = Vec3::Zero();
  for (int k = 0; k < n; ++k) {
    double dn_psi = psi_grad.col(k).dot(b.normals.col(k));
    Vec3 dn_phi = b.kirchhoff_data(k);
    E += -0.5 * b.weights[k] * dn_psi * dn_psi * dn_phi;
    B += b.weights[k] * dn_psi * dn_phi.cross(Vec3(dtau.col(k)));
  }
  return {E, B};
}

ForceDecomposition DynamicsContext::control_forces(const Pose& q, const Vec3& p,
                                                   double gamma,
                                                   const HarmonicField& alpha,
                                                   const Eigen::VectorXd& alpha_dot) const {
  auto ctx = pose_context(q);
  auto phis = kirchhoff(*ctx);
  const HarmonicField& psi = stream(*ctx);
  const BoundarySampling& b = ctx->solid_fine();
  const int n = b.size();

  Eigen::Matrix2Xd ag(2, n), sg(2, n);
  Eigen::Matrix2Xd pg = Eigen::Matrix2Xd::Zero(2, n);
  alpha.evaluate_batch(b.points, nullptr, &ag);
  for (int i = 0; i < 3; ++i) {
    if (p[i] == 0.0) continue;
    Eigen::Matrix2Xd g;
    phis[i]->evaluate_batch(b.points, nullptr, &g);
    pg += p[i] * g;
  }
  psi.evaluate_batch(b.points, nullptr, &sg);

  ForceDecomposition f;
  f.gamma = gamma;
  auto [E, B] = circulation_fields(q);
  f.E = E;
  f.B = B;
  for (int k = 0; k < n; ++k) {
    Vec3 d = b.kirchhoff_data(k);
    double w = b.weights[k];
    Vec2 grad_a = ag.col(k);
    f.F1a += -0.5 * w * grad_a.squaredNorm() * d;
    f.F1b += -w * grad_a.dot(pg.col(k)) * d;
    f.F1c += -w * grad_a.dot(perp(Vec2(sg.col(k)))) * d;
    if (alpha_dot.size() == n) f.F2 += -w * alpha_dot[k] * d;
  }
  return f;
}

const HarmonicField& DynamicsContext::control_potential(const PoseContext& ctx,
                                                        const SpatialControl& ctl) const {
  return ctx.field("ctl:" + std::to_string(ctl.id),
                   [&]() { return ctx.solve_neumann(ctl.boundary_data()); });
}

Vec3 DynamicsContext::rhs(const Pose& q, const Vec3& p, double gamma,
                          const ImpulsiveControl* control, double t,
                          const RhsOptions& opt) const {
  const double d = cfg_.fd_step;
  const bool control_active =
      control && control->active(t) && !(control->g0.zero && control->g1.zero);

  std::array<std::shared_ptr<const PoseContext>, 7> ctxs;
  std::array<Mat3, 7> M;
  parallel_for(7, cfg_.threads, [&](int i) {
    Pose pp = (i == 0) ? q : shifted(q, (i - 1) / 2, ((i - 1) % 2 == 0) ? d : -d);
    ctxs[i] = pose_context(pp);
    M[i] = added_mass_matrix(*ctxs[i]);
    if (control_active && opt.f2 && i > 0) {
      // warm the stencil caches used by the D_q A chain-rule term
      if (control->bump.active(t) && !control->g0.zero)
        control_potential(*ctxs[i], control->g0);
      if (control->bump.active(control->T - t) && !control->g1.zero)
        control_potential(*ctxs[i], control->g1);
    }
  });

  ChristoffelTensor gam;
  {
    std::array<Mat3, 3> dMa;
    for (int k = 0; k < 3; ++k) dMa[k] = (M[1 + 2 * k] - M[2 + 2 * k]) / (2 * d);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          gam.gamma[k](i, j) = 0.5 * (dMa[i](k, j) + dMa[j](k, i) - dMa[k](i, j));
  }

  Vec3 b = -gam.contract(p);

  if (gamma != 0.0 && opt.eb) {
    auto [E, B] = circulation_fields(q);
    b += gamma * gamma * E + gamma * p.cross(B);
  }

  if (control_active) {
    const PoseContext& ctx = *ctxs[0];
    const BoundarySampling& sb = ctx.solid_fine();
    const int n = sb.size();
    const double T = control->T;
    const double b0 = control->bump.value(t);
    const double b1 = control->bump.value(T - t);
    const double db0 = control->bump.derivative(t);
    const double db1 = -control->bump.derivative(T - t);

    struct Pulse {
      const SpatialControl* ctl;
      double beta, dbeta;
    };
    std::vector<Pulse> pulses;
    if (!control->g0.zero && (b0 != 0 || db0 != 0)) pulses.push_back({&control->g0, b0, db0});
    if (!control->g1.zero && (b1 != 0 || db1 != 0)) pulses.push_back({&control->g1, b1, db1});

    if (!pulses.empty()) {
      Eigen::Matrix2Xd grad = Eigen::Matrix2Xd::Zero(2, n);
      Eigen::VectorXd adot = Eigen::VectorXd::Zero(n);
      for (const Pulse& pl : pulses) {
        const HarmonicField& a = control_potential(ctx, *pl.ctl);
        Eigen::VectorXd vals;
        Eigen::Matrix2Xd g;
        a.evaluate_batch(sb.points, &vals, &g);
        grad += pl.beta * g;
        if (opt.f2) {
          adot += pl.dbeta * vals;
          if (pl.beta != 0.0) {
            // chain rule: beta (D_q A . p), central differences in q evaluated
            // on the current solid boundary
            for (int ax = 0; ax < 3; ++ax) {
              if (p[ax] == 0.0) continue;
              const HarmonicField& ap = control_potential(*ctxs[1 + 2 * ax], *pl.ctl);
              const HarmonicField& am = control_potential(*ctxs[2 + 2 * ax], *pl.ctl);
              Eigen::VectorXd vp, vm;
              ap.evaluate_batch(sb.points, &vp, nullptr);
              am.evaluate_batch(sb.points, &vm, nullptr);
              adot += pl.beta * p[ax] / (2 * d) * (vp - vm);
            }
          }
        }
      }

      Eigen::Matrix2Xd pg = Eigen::Matrix2Xd::Zero(2, n), sg;
      const bool use_f1b = opt.f1b && p.cwiseAbs().maxCoeff() > 0;
      if (use_f1b) {
        auto phis = kirchhoff(ctx);
        for (int i = 0; i < 3; ++i) {
          if (p[i] == 0.0) continue;
          Eigen::Matrix2Xd g;
          phis[i]->evaluate_batch(sb.points, nullptr, &g);
          pg += p[i] * g;
        }
      }
      const bool use_f1c = opt.f1c && gamma != 0.0;
      if (use_f1c) {
        sg.resize(2, n);
        stream(ctx).evaluate_batch(sb.points, nullptr, &sg);
      }

      for (int k = 0; k < n; ++k) {
        Vec3 dvec = sb.kirchhoff_data(k);
        double w = sb.weights[k];
        Vec2 ga = grad.col(k);
        if (opt.f1a) b += -0.5 * w * ga.squaredNorm() * dvec;
        if (use_f1b) b += -w * ga.dot(pg.col(k)) * dvec;
        if (use_f1c) b += -gamma * w * ga.dot(perp(Vec2(sg.col(k)))) * dvec;
        if (opt.f2) b += -w * adot[k] * dvec;
      }
    }
  }

  Mat3 total = mg_ + M[0];
  return total.ldlt().solve(b);
}

Vec2 DynamicsContext::reconstruct_velocity(const Pose& q, const Vec3& p,
                                           double gamma, const NeumannData& g,
                                           const Vec2& x) const {
  auto ctx = pose_context(q);
  Vec2 u = Vec2::Zero();
  if (p.cwiseAbs().maxCoeff() > 0) {
    auto phis = kirchhoff(*ctx);
    for (int i = 0; i < 3; ++i)
      if (p[i] != 0.0) u += p[i] * phis[i]->gradient(x);
  }
  if (gamma != 0.0) u += gamma * perp(stream(*ctx).gradient(x));
  bool has_g = false;
  for (int k = 0; k < ctx->outer().size() && !has_g; ++k)
    if (g.outer(ctx->outer().s[k]) != 0.0) has_g = true;
  for (int k = 0; k < ctx->solid().size() && !has_g; ++k)
    if (g.solid(ctx->solid().s[k]) != 0.0) has_g = true;
  if (has_g) u += ctx->solve_neumann(g).gradient(x);
  return u;
}

double DynamicsContext::kinetic_energy(const State& st) const {
  InertiaModel m = added_mass(st.pose);
  return 0.5 * st.vel.dot(m.total() * st.vel);
}

}  // namespace immerse
