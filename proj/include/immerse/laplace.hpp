#pragma once

#include <array>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include "immerse/geometry.hpp"
#include "immerse/tsvd.hpp"
#include "immerse/types.hpp"

namespace immerse {

struct SolverConfig {
  int collocation = 256;     // collocation points per boundary component
  int sources = 128;         // log sources per boundary component
  double boundary_tol = 1e-8;
  double svd_cutoff = 1e-12; // relative to sigma_max
  double eval_clearance = 1e-6;
  double inner_offset = 0.7; // solid source curve: scale toward conformal center
  double outer_offset = 1.2; // outer source curve: scale outward
  int verify_factor = 4;     // verification sampling refinement

  // Spec defaults: 1e-8 for disk-in-disk, 1e-6 for conformal shapes.
  static SolverConfig for_geometry(const SolidShape& shape, const DomainSpec& domain);
  std::size_t key() const;
};

// Boundary Neumann data, given as functions of the curve parameter so that
// solves can sample both collocation and verification grids.
struct NeumannData {
  std::function<double(double)> solid;  // parameter s on the solid boundary
  std::function<double(double)> outer;  // angle phi on the outer boundary

  static NeumannData zero();
  static NeumannData on_solid(std::function<double(double)> f);
  static NeumannData on_outer(std::function<double(double)> f);
};

// Mesh-free representation of a harmonic function on F(q): log point sources
// outside the closure of the fluid domain plus one interior log term at the
// conformal center of the solid (carries the net flux between the two
// boundary components) and an additive constant. Kernel log|x-y| / 2pi, so a
// unit-strength source has unit flux through any enclosing curve.
struct HarmonicField {
  Eigen::Matrix2Xd sources;
  Eigen::VectorXd strengths;
  Vec2 log_center = Vec2::Zero();
  double log_strength = 0.0;
  double constant = 0.0;
  double residual = 0.0;  // self-verification residual of the producing solve

  double value(const Vec2& x) const;
  Vec2 gradient(const Vec2& x) const;
  void evaluate_batch(const Eigen::Matrix2Xd& x, Eigen::VectorXd* values,
                      Eigen::Matrix2Xd* gradients) const;
  double min_source_distance(const Vec2& x) const;

  HarmonicField& operator*=(double c);
  // Linear combination of fields sharing the same source layout.
  static HarmonicField combine(const std::vector<const HarmonicField*>& fields,
                               const Eigen::VectorXd& coeffs);
};

// Value and gradient of the field at x; x must keep eval_clearance away from
// every source.
std::pair<double, Vec2> evaluate(const HarmonicField& field, const Vec2& x,
                                 double eval_clearance = 1e-6);

// Everything needed to solve Laplace problems at one solid position: placed
// samplings, source curves and the factored collocation operators. Immutable
// after construction except for the named-field memo.
class PoseContext {
 public:
  PoseContext(std::shared_ptr<const SolidShape> shape, const DomainSpec& domain,
              const Pose& q, const SolverConfig& cfg);

  const Pose& pose() const { return q_; }
  const SolidShape& shape() const { return *shape_; }
  const DomainSpec& domain() const { return domain_; }
  const SolverConfig& config() const { return cfg_; }

  const BoundarySampling& solid() const { return solid_; }
  const BoundarySampling& outer() const { return outer_; }
  const BoundarySampling& solid_fine() const { return solid_fine_; }
  const BoundarySampling& outer_fine() const { return outer_fine_; }
  const Vec2& conformal_center() const { return center_; }

  // Neumann solve with truncated-SVD least squares and self-verification on
  // the fine sampling. The additive constant is fixed by zero mean over the
  // solid collocation points.
  HarmonicField solve_neumann(const NeumannData& data) const;

  // Stream function: Dirichlet values 1 on the solid and 0 on the outer
  // boundary, rescaled so the flux through the solid boundary is -1.
  HarmonicField solve_stream() const;

  // Memoized named solves (Kirchhoff potentials, control potentials, ...).
  const HarmonicField& field(const std::string& id,
                             const std::function<HarmonicField()>& make) const;

  // Flux of the field through the solid boundary, by fine quadrature.
  double solid_flux(const HarmonicField& f) const;

 private:
  Eigen::VectorXd neumann_rhs(const NeumannData& data, double log_strength) const;
  void verify_neumann(const HarmonicField& f, const NeumannData& data) const;

  std::shared_ptr<const SolidShape> shape_;
  DomainSpec domain_;
  Pose q_;
  SolverConfig cfg_;
  BoundarySampling solid_, outer_, solid_fine_, outer_fine_;
  Eigen::Matrix2Xd src_;  // inner sources then outer sources
  Vec2 center_;
  TsvdSolver neumann_op_;
  mutable std::unique_ptr<TsvdSolver> dirichlet_op_;
  mutable std::mutex fields_mu_;
  mutable std::unordered_map<std::string, std::shared_ptr<const HarmonicField>> fields_;
};

// Pose-keyed context cache (LRU, thread safe, last-write-wins). Poses are
// quantized at 1e-10 for keying.
class LaplaceCache {
 public:
  LaplaceCache(std::shared_ptr<const SolidShape> shape, DomainSpec domain,
               SolverConfig cfg, std::size_t capacity = 256);

  std::shared_ptr<const PoseContext> context(const Pose& q) const;
  const SolverConfig& config() const { return cfg_; }
  const DomainSpec& domain() const { return domain_; }
  const SolidShape& shape() const { return *shape_; }
  std::shared_ptr<const SolidShape> shape_ptr() const { return shape_; }
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  struct Key {
    long long a, b, c;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };

  std::shared_ptr<const SolidShape> shape_;
  DomainSpec domain_;
  SolverConfig cfg_;
  std::size_t capacity_;
  mutable std::mutex mu_;
  mutable std::list<Key> order_;
  mutable std::unordered_map<Key, std::pair<std::shared_ptr<const PoseContext>,
                                            std::list<Key>::iterator>, KeyHash> map_;
  mutable std::size_t hits_ = 0, misses_ = 0;
};

// Spectral differentiation of a periodic trace sampled on a uniform grid.
Eigen::VectorXd spectral_derivative(const Eigen::VectorXd& values);

}  // namespace immerse
