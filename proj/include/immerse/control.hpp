#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "immerse/geometry.hpp"
#include "immerse/laplace.hpp"
#include "immerse/types.hpp"

namespace immerse {

class DynamicsContext;  // defined in dynamics.hpp
struct GeodesicSolution;

// Smooth time pulse beta_eps(t) = eps^{-1/2} beta((t - eps)/eps) built from
// the mollifier exp(-1/(1-u^2)), normalized so the square integrates to one.
// Support is [0, 2 eps].
struct TimeBump {
  double epsilon = 0.1;
  double norm = 1.0;  // normalization constant of the unit profile

  static TimeBump make(double epsilon);
  double profile(double u) const;             // beta on (-1, 1)
  double value(double t) const;               // beta_eps(t)
  double derivative(double t) const;          // beta_eps'(t)
  bool active(double t) const { return t > 0 && t < 2 * epsilon; }
};

// Zero-mean boundary bump: the derivative in the curve parameter of a
// mollifier supported on [center - width, center + width].
struct BoundaryBump {
  double center = 0;
  double width = 0.05;  // half-width of the support
  double scale = 1.0;

  double value(double s) const;
  bool supported(double s) const;
};

// Truncated Laurent-series field on an annulus around the unit circle:
//   alpha(r, phi) = 1/2 sum_k (1/k)(r^k + r^{-k})(-b_k cos k phi + a_k sin k phi)
// with (a_k, b_k) the cosine/sine Fourier coefficients of a boundary bump.
// The radial derivative vanishes on r = 1 and the angular derivative there
// recovers the K-truncated bump.
struct LaurentPatch {
  Eigen::VectorXd a, b;  // index k-1 holds the k-th coefficients

  int terms() const { return static_cast<int>(a.size()); }
  double value(double r, double phi) const;
  Vec2 gradient(double r, double phi) const;  // Cartesian, in the annulus frame
};

// Spatial part of the impulsive control at a fixed pose: the boundary flux
// profile on Sigma together with its induced potential and diagnostics.
struct SpatialControl {
  Pose q;
  Vec3 v = Vec3::Zero();
  bool zero = true;
  std::uint64_t id = 0;  // key for memoized potential solves

  HarmonicField design;  // designed trial field; gbar is its trace on Sigma
  HarmonicField alpha;   // induced potential A[q, gbar] at the synthesis pose
  double sigma_lo = 0, sigma_hi = 0;  // trace support inside Sigma
  double cutoff_margin = 0;           // smooth cutoff width at the ends
  double flux_fix = 0;                // amplitude of the flux-neutralizing bump

  Vec3 achieved_moment = Vec3::Zero();       // integral |grad alpha|^2 dn Phi
  Vec3 achieved_mean_moment = Vec3::Zero();  // integral alpha dn Phi

  // diagnostics sufficient to rebuild the control
  Eigen::VectorXd mu;                     // cone weights
  std::vector<double> site_angles;
  std::vector<Eigen::Vector4d> lambdas;   // zero-mean combination per site
  double bump_width = 0;
  int laurent_terms = 0;

  double gbar(double phi) const;  // normal velocity profile on the outer boundary
  NeumannData boundary_data() const;
};

// Full impulsive control g(t,x) = beta_eps(t) g0(x) + beta_eps(T-t) g1(x).
struct ImpulsiveControl {
  double T = 1.0;
  TimeBump bump;
  Vec3 v0 = Vec3::Zero(), v1 = Vec3::Zero();
  SpatialControl g0, g1;

  bool active(double t) const { return bump.active(t) || bump.active(T - t); }
  double g(double t, double phi) const;
};

struct ControlConfig {
  int sites = 16;          // cone sites for non-disk solids
  int candidates = 4;      // fields per site for the zero-mean combination
  double bump_width = 0.04;       // boundary bump half-width (parameter)
  double bump_width_disk = 0.12;
  int laurent_terms = 32;
  int ext_collocation = 256;  // extension operator: collar points per ring
  int ext_sources = 160;      // sources per boundary component
  double ext_tol = 1e-6;      // off-Sigma Neumann residual tolerance
  double svd_cutoff = 1e-12;
  double collar_radius = 1.08;   // outermost collar ring (annulus frame)
  double sigma_margin = 0.1;     // fraction of Sigma kept clear at each end
  double trace_penalty = 1e-3;   // weight damping the Sigma trace amplitude
  double grad_weight = 1.0;      // collar gradient row weight
  double offsigma_weight = 30.0; // off-Sigma Neumann row weight
  double tol_syn = 1e-3;         // moment tolerance: tol_syn * (1 + |v|)
  int newton_max = 40;
  double nnls_ridge = 1e-10;
  SolverConfig resolve;  // config for the A[q, gbar] re-solve
};

// --- operations ---

TimeBump time_bump(double epsilon);

// Explicit positive decomposition v = mu1 e1 + mu2 e2 + mu3 e3 with
// e1=(1,0), e2=(0,1), e3=(-1,-1); exact for every v in R^2.
Eigen::Vector3d cone_weights_disk(const Vec2& v);

// Cone sites and data vectors (n1, n2, (x-h)^perp . n) at a pose; the sites
// rotate with the body. For non-disk shapes the 16 vectors positively span
// R^3 (certified by nonnegative least squares on the signed axis targets).
struct ConeBasis {
  std::vector<double> site_angles;           // parameter values on the body
  Eigen::Matrix<double, 3, Eigen::Dynamic> directions;  // data vectors at q
};
ConeBasis cone_points_general(const SolidShape& shape, const Pose& q, int sites);
void certify_positive_span(const ConeBasis& basis, double tol = 1e-8);
Eigen::VectorXd cone_weights_general(const ConeBasis& basis, const Vec3& v,
                                     double ridge);

// Disjoint zero-mean bump family around the given sites; `directions` only
// fixes the target magnitude of each bump.
std::vector<std::vector<BoundaryBump>> boundary_bumps(
    double width, const std::vector<double>& sites,
    const std::vector<Vec3>& directions, int candidates, double pitch_factor = 2.45);

// Direction integral of one bump: integral |beta|^2 d(s) / jacobian_factor ds
// with d(s) the Kirchhoff data vector; approaches the target direction as the
// support shrinks.
Vec3 bump_direction_integral(const BoundaryBump& bump, const SolidShape& shape,
                             const Pose& q, int quad = 4096);

LaurentPatch local_harmonic_patch(const BoundaryBump& beta, int terms);

// Least-squares harmonic extension at one pose: matches patch values and
// gradients on a collar near the solid boundary, zero Neumann trace away
// from Sigma, trace left free (but amplitude-penalized) on Sigma.
class ExtensionOperator {
 public:
  ExtensionOperator(std::shared_ptr<const SolidShape> shape,
                    const DomainSpec& domain, const Pose& q,
                    const ControlConfig& cfg);

  // site: bump center, used to place the ring of collar points
  HarmonicField extend(const LaurentPatch& patch, double* collar_residual,
                       double* offsigma_residual) const;

  const Pose& pose() const { return q_; }
  const SolidShape& shape() const { return *shape_; }
  const DomainSpec& domain() const { return domain_; }
  const ControlConfig& config() const { return cfg_; }
  const BoundarySampling& solid_quad() const { return squad_; }
  double sigma_lo() const { return lo_; }
  double sigma_hi() const { return hi_; }
  double cutoff_margin() const { return margin_; }

 private:
  std::shared_ptr<const SolidShape> shape_;
  DomainSpec domain_;
  Pose q_;
  ControlConfig cfg_;
  double lo_, hi_, margin_;
  BoundarySampling squad_;       // fine solid sampling for moments
  Eigen::Matrix2Xd collar_;      // collar points (physical)
  std::vector<Vec2> collar_zeta_;  // annulus-frame coordinates (r, phi)
  Eigen::Matrix2Xd collar_jac_;    // placeholder for map jacobians
  std::vector<Mat2> pullback_;     // gradient pullback (DF)^{-T} per collar point
  Eigen::Matrix2Xd src_;
  Vec2 center_;
  BoundarySampling outer_fine_;
  std::vector<int> offsigma_rows_;  // outer sampling indices with Neumann rows
  TsvdSolver op_;
  int n_collar_ = 0;
};

// Unit-norm combination of four candidate fields with zero mean moment
// integral alpha dn Phi over the solid boundary. Returns the combined field
// and the weights.
std::pair<HarmonicField, Eigen::Vector4d> zero_mean_combination(
    const BoundarySampling& solid_quad, const std::vector<HarmonicField>& fields);

// Full synthesis of gbar(q, v): cone weights, bumps, patches, extensions,
// zero-mean combinations and a damped Newton iteration matching the achieved
// moment to v. For disk solids v must have zero third component.
class SpatialControlFactory {
 public:
  SpatialControlFactory(std::shared_ptr<const SolidShape> shape,
                        const DomainSpec& domain, const Pose& q,
                        const ControlConfig& cfg);

  SpatialControl synthesize(const Vec3& v) const;
  Vec3 measure_moment(const HarmonicField& field) const;       // |grad|^2 data integral
  Vec3 measure_mean_moment(const HarmonicField& field) const;  // value data integral
  const ConeBasis& basis() const { return basis_; }
  // cross-term matrix of the per-direction fields (diagnostic)
  Mat3 direction_field_moment(int i) const;
  double cross_term(int i, int j) const;
  int built_directions() const;

 private:
  struct DirectionField {
    HarmonicField field;       // zero-mean combined, calibrated
    Eigen::Vector4d lambda;
    Vec3 moment;
  };
  const DirectionField& direction(int i) const;
  SpatialControl assemble(const Eigen::VectorXd& mu) const;
  Vec3 resolve_moment(SpatialControl* ctl) const;

  std::shared_ptr<const SolidShape> shape_;
  DomainSpec domain_;
  Pose q_;
  ControlConfig cfg_;
  ConeBasis basis_;
  std::shared_ptr<ExtensionOperator> ext_;
  std::shared_ptr<PoseContext> resolve_ctx_;
  std::vector<std::vector<BoundaryBump>> bumps_;
  mutable std::vector<std::optional<DirectionField>> dirs_;
  mutable std::mutex mu_;
};

// Impulse vectors from the geodesic endpoint velocities:
//   v0 = (Mg + Ma(q0)) (c0 - q0'),   v1 = -(Mg + Ma(q1)) (c1 - q1').
std::pair<Vec3, Vec3> impulses(const DynamicsContext& dyn, const Pose& q0,
                               const Vec3& q0p, const Pose& q1, const Vec3& q1p,
                               const GeodesicSolution& geo);

// Assembles the full impulsive control for the transfer
// (q0, q0p) -> (q1, q1p) over [0, T]: geodesic shot, impulses, and the two
// spatial controls gbar(q0, -2 v0), gbar(q1, -2 v1).
ImpulsiveControl build_control(const DynamicsContext& dyn, const Pose& q0,
                               const Vec3& q0p, const Pose& q1, const Vec3& q1p,
                               double epsilon, double T, const ControlConfig& cfg,
                               const GeodesicSolution& geo);

}  // namespace immerse
