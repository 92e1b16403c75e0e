#pragma once

#include <array>
#include <memory>

#include "immerse/control.hpp"
#include "immerse/geometry.hpp"
#include "immerse/laplace.hpp"
#include "immerse/types.hpp"

namespace immerse {

// Genuine and added 3x3 inertia. Ma is the Gram matrix of the Kirchhoff
// potential gradients, assembled by boundary quadrature and symmetrized;
// `asymmetry` records the relative asymmetry of the raw quadrature.
struct InertiaModel {
  Mat3 Mg = Mat3::Identity();
  Mat3 Ma = Mat3::Zero();
  double asymmetry = 0.0;
  Mat3 total() const { return Mg + Ma; }
};

// Christoffel symbols of the first kind of the metric Mg + Ma(q), built from
// central finite differences of Ma and symmetrized in the lower indices.
struct ChristoffelTensor {
  std::array<Mat3, 3> gamma;  // gamma[k](i,j)

  Vec3 contract(const Vec3& p) const {
    return Vec3(p.dot(gamma[0] * p), p.dot(gamma[1] * p), p.dot(gamma[2] * p));
  }
};

struct ForceDecomposition {
  Vec3 E = Vec3::Zero();
  Vec3 B = Vec3::Zero();
  Vec3 F1a = Vec3::Zero();
  Vec3 F1b = Vec3::Zero();
  Vec3 F1c = Vec3::Zero();
  Vec3 F2 = Vec3::Zero();
  double gamma = 0.0;
  Vec3 F1() const { return F1a + F1b + gamma * F1c; }
};

// Term switches for the controlled right-hand side (the intermediate model
// keeps only F1a; the toy model bypasses rhs entirely).
struct RhsOptions {
  bool f1a = true;
  bool f1b = true;
  bool f1c = true;
  bool f2 = true;
  bool eb = true;
};

struct DynamicsConfig {
  SolverConfig solver;
  double fd_step = 1e-4;  // Christoffel and D_q A central differences
  std::size_t cache_capacity = 256;
  int threads = 2;  // concurrent stencil solves
};

// Assembles every coefficient of the reformulated ODE at a pose. All methods
// are pure given the immutable shape/domain; the pose-context cache is the
// only shared state.
class DynamicsContext {
 public:
  DynamicsContext(std::shared_ptr<const SolidShape> shape, DomainSpec domain,
                  DynamicsConfig cfg);

  const SolidShape& shape() const { return *shape_; }
  const DomainSpec& domain() const { return cache_.domain(); }
  const DynamicsConfig& config() const { return cfg_; }
  const LaplaceCache& cache() const { return cache_; }

  std::shared_ptr<const PoseContext> pose_context(const Pose& q) const;
  bool admissible(const Pose& q) const;  // q in Q_delta

  // The three Kirchhoff potentials at q (solved once per pose, memoized).
  std::array<const HarmonicField*, 3> kirchhoff(const Pose& q) const;
  std::array<const HarmonicField*, 3> kirchhoff(const PoseContext& ctx) const;
  const HarmonicField& stream(const PoseContext& ctx) const;

  InertiaModel added_mass(const Pose& q) const;
  Mat3 added_mass_matrix(const PoseContext& ctx, double* asymmetry = nullptr) const;

  // Central finite differences of Ma with Richardson validation on request.
  ChristoffelTensor christoffel(const Pose& q, double step,
                                bool richardson_check = false) const;

  std::pair<Vec3, Vec3> circulation_fields(const Pose& q) const;

  // Force terms for a given control potential alpha and the trace of its
  // partial time derivative on the fine solid sampling of ctx.
  ForceDecomposition control_forces(const Pose& q, const Vec3& p, double gamma,
                                    const HarmonicField& alpha,
                                    const Eigen::VectorXd& alpha_dot) const;

  // Metric data shared by every trajectory integration step.
  struct Metric {
    InertiaModel inertia;
    ChristoffelTensor gamma;
  };
  Metric metric(const Pose& q) const;

  // Full right-hand side of the controlled ODE: solves
  // (Mg + Ma) q'' = -<Gamma,p,p> + gamma^2 E + gamma p x B + F1 + F2.
  Vec3 rhs(const Pose& q, const Vec3& p, double gamma,
           const ImpulsiveControl* control, double t,
           const RhsOptions& opt = {}) const;

  // Fluid velocity at x from the decomposition u = grad(p.Phi) + gamma
  // grad^perp psi + grad A[q,g].
  Vec2 reconstruct_velocity(const Pose& q, const Vec3& p, double gamma,
                            const NeumannData& g, const Vec2& x) const;

  double kinetic_energy(const State& st) const;

 private:
  const HarmonicField& control_potential(const PoseContext& ctx,
                                         const SpatialControl& ctl) const;

  std::shared_ptr<const SolidShape> shape_;
  DynamicsConfig cfg_;
  LaplaceCache cache_;
  Mat3 mg_;
};

}  // namespace immerse
