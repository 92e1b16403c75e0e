#include "immerse/laplace.hpp"

#include <complex>

#include "immerse/errors.hpp"

namespace immerse {

namespace {

constexpr double kInv2Pi = 1.0 / kTwoPi;

inline double kernel_value(const Vec2& x, const Vec2& y) {
  return 0.5 * kInv2Pi * std::log((x - y).squaredNorm());
}

inline Vec2 kernel_gradient(const Vec2& x, const Vec2& y) {
  Vec2 d = x - y;
  return d * (kInv2Pi / d.squaredNorm());
}

inline double kernel_dn(const Vec2& x, const Vec2& y, const Vec2& n) {
  Vec2 d = x - y;
  return d.dot(n) * kInv2Pi / d.squaredNorm();
}

}  // namespace

SolverConfig SolverConfig::for_geometry(const SolidShape& shape,
                                        const DomainSpec& domain) {
  SolverConfig cfg;
  cfg.boundary_tol = (shape.is_disk() && domain.is_circle()) ? 1e-8 : 1e-6;
  return cfg;
}

std::size_t SolverConfig::key() const {
  std::size_t h = std::hash<int>()(collocation);
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  mix(std::hash<int>()(sources));
  mix(std::hash<double>()(boundary_tol));
  mix(std::hash<double>()(svd_cutoff));
  mix(std::hash<double>()(inner_offset));
  mix(std::hash<double>()(outer_offset));
  mix(std::hash<int>()(verify_factor));
  return h;
}

NeumannData NeumannData::zero() {
  return {[](double) { return 0.0; }, [](double) { return 0.0; }};
}
NeumannData NeumannData::on_solid(std::function<double(double)> f) {
  return {std::move(f), [](double) { return 0.0; }};
}
NeumannData NeumannData::on_outer(std::function<double(double)> f) {
  return {[](double) { return 0.0; }, std::move(f)};
}

double HarmonicField::value(const Vec2& x) const {
  double v = constant;
  for (int j = 0; j < strengths.size(); ++j)
    v += strengths[j] * kernel_value(x, sources.col(j));
  if (log_strength != 0.0) v += log_strength * kernel_value(x, log_center);
  return v;
}

Vec2 HarmonicField::gradient(const Vec2& x) const {
  Vec2 g = Vec2::Zero();
  for (int j = 0; j < strengths.size(); ++j)
    g += strengths[j] * kernel_gradient(x, sources.col(j));
  if (log_strength != 0.0) g += log_strength * kernel_gradient(x, log_center);
  return g;
}

void HarmonicField::evaluate_batch(const Eigen::Matrix2Xd& x,
                                   Eigen::VectorXd* values,
                                   Eigen::Matrix2Xd* gradients) const {
  const int m = static_cast<int>(x.cols());
  if (values) values->setConstant(m, constant);
  if (gradients) gradients->setZero(2, m);
  for (int k = 0; k < m; ++k) {
    const Vec2 xk = x.col(k);
    double v = 0;
    Vec2 g = Vec2::Zero();
    for (int j = 0; j < strengths.size(); ++j) {
      Vec2 d = xk - sources.col(j);
      double r2 = d.squaredNorm();
      if (values) v += strengths[j] * 0.5 * std::log(r2);
      if (gradients) g += (strengths[j] / r2) * d;
    }
    if (log_strength != 0.0) {
      Vec2 d = xk - log_center;
      double r2 = d.squaredNorm();
      v += log_strength * 0.5 * std::log(r2);
      g += (log_strength / r2) * d;
    }
    if (values) (*values)[k] += v * kInv2Pi;
    if (gradients) gradients->col(k) = g * kInv2Pi;
  }
}

double HarmonicField::min_source_distance(const Vec2& x) const {
  double d = std::numeric_limits<double>::max();
  for (int j = 0; j < sources.cols(); ++j)
    d = std::min(d, (x - sources.col(j)).norm());
  if (log_strength != 0.0) d = std::min(d, (x - log_center).norm());
  return d;
}

HarmonicField& HarmonicField::operator*=(double c) {
  strengths *= c;
  log_strength *= c;
  constant *= c;
  return *this;
}

HarmonicField HarmonicField::combine(const std::vector<const HarmonicField*>& fields,
                                     const Eigen::VectorXd& coeffs) {
  HarmonicField out;
  if (fields.empty()) return out;
  out = *fields[0];
  out.strengths *= coeffs[0];
  out.log_strength *= coeffs[0];
  out.constant *= coeffs[0];
  for (std::size_t i = 1; i < fields.size(); ++i) {
    out.strengths += coeffs[i] * fields[i]->strengths;
    out.log_strength += coeffs[i] * fields[i]->log_strength;
    out.constant += coeffs[i] * fields[i]->constant;
    out.residual = std::max(out.residual, fields[i]->residual);
  }
  return out;
}

std::pair<double, Vec2> evaluate(const HarmonicField& field, const Vec2& x,
                                 double eval_clearance) {
  if (field.strengths.size() > 0 || field.log_strength != 0.0) {
    if (field.min_source_distance(x) < eval_clearance)
      throw EvaluationNearSource("evaluation point within clearance of a source");
  }
  return {field.value(x), field.gradient(x)};
}

PoseContext::PoseContext(std::shared_ptr<const SolidShape> shape,
                         const DomainSpec& domain, const Pose& q,
                         const SolverConfig& cfg)
    : shape_(std::move(shape)), domain_(domain), q_(q), cfg_(cfg) {
  const int nc = cfg_.collocation;
  solid_ = shape_->sample(q_, nc);
  outer_ = domain_.sample(nc);
  solid_fine_ = shape_->sample(q_, cfg_.verify_factor * nc);
  outer_fine_ = domain_.sample(cfg_.verify_factor * nc);
  center_ = q_.apply(shape_->conformal_center(), shape_->reference_center());

  const int ns = cfg_.sources;
  src_.resize(2, 2 * ns);
  const Mat2 R = rotation(q_.theta);
  // Inner source curve: the boundary contracted toward the conformal center,
  // i.e. the image of the circle |zeta| = inner_offset. For conformal shapes
  // this keeps the curve outside the branch points of the harmonic
  // continuation, which physical-space scaling does not.
  for (int j = 0; j < ns; ++j) {
    double s = kTwoPi * (j + 0.5) / ns;
    Vec2 x0 = shape_->map_point(std::polar(cfg_.inner_offset, s));
    src_.col(j) = q_.h + R * (x0 - shape_->reference_center());
  }
  for (int j = 0; j < ns; ++j) {
    double phi = kTwoPi * (j + 0.5) / ns;
    src_.col(ns + j) = cfg_.outer_offset * domain_.boundary_point(phi);
  }

  // Neumann collocation operator: normal derivative rows on both boundaries
  // plus a soft row pinning the inner-ring strengths to zero net flux.
  Eigen::MatrixXd A(2 * nc + 1, 2 * ns);
  for (int k = 0; k < nc; ++k)
    for (int j = 0; j < 2 * ns; ++j)
      A(k, j) = kernel_dn(solid_.points.col(k), src_.col(j), solid_.normals.col(k));
  for (int k = 0; k < nc; ++k)
    for (int j = 0; j < 2 * ns; ++j)
      A(nc + k, j) = kernel_dn(outer_.points.col(k), src_.col(j), outer_.normals.col(k));
  A.row(2 * nc).setZero();
  A.row(2 * nc).head(ns).setOnes();
  neumann_op_ = TsvdSolver(A, cfg_.svd_cutoff);
}

Eigen::VectorXd PoseContext::neumann_rhs(const NeumannData& data,
                                         double log_strength) const {
  const int nc = cfg_.collocation;
  Eigen::VectorXd rhs(2 * nc + 1);
  for (int k = 0; k < nc; ++k) {
    rhs[k] = data.solid(solid_.s[k]);
    if (log_strength != 0.0)
      rhs[k] -= log_strength * kernel_dn(solid_.points.col(k), center_, solid_.normals.col(k));
  }
  for (int k = 0; k < nc; ++k) {
    rhs[nc + k] = data.outer(outer_.s[k]);
    if (log_strength != 0.0)
      rhs[nc + k] -= log_strength * kernel_dn(outer_.points.col(k), center_, outer_.normals.col(k));
  }
  rhs[2 * nc] = 0.0;
  return rhs;
}

void PoseContext::verify_neumann(const HarmonicField& f,
                                 const NeumannData& data) const {
  double resid = 0, scale = 0;
  Eigen::Matrix2Xd grads(2, solid_fine_.size());
  f.evaluate_batch(solid_fine_.points, nullptr, &grads);
  for (int k = 0; k < solid_fine_.size(); ++k) {
    double g = data.solid(solid_fine_.s[k]);
    resid = std::max(resid, std::abs(grads.col(k).dot(solid_fine_.normals.col(k)) - g));
    scale = std::max(scale, std::abs(g));
  }
  f.evaluate_batch(outer_fine_.points, nullptr, &grads);
  for (int k = 0; k < outer_fine_.size(); ++k) {
    double g = data.outer(outer_fine_.s[k]);
    resid = std::max(resid, std::abs(grads.col(k).dot(outer_fine_.normals.col(k)) - g));
    scale = std::max(scale, std::abs(g));
  }
  const double required = cfg_.boundary_tol * (1.0 + scale);
  const_cast<HarmonicField&>(f).residual = resid;
  if (resid > required) throw ResidualTooLarge(resid, required);
}

HarmonicField PoseContext::solve_neumann(const NeumannData& data) const {
  // flux compatibility, by fine quadrature
  double flux_s = 0, flux_o = 0, mass = 0;
  for (int k = 0; k < solid_fine_.size(); ++k) {
    double g = data.solid(solid_fine_.s[k]);
    flux_s += solid_fine_.weights[k] * g;
    mass += solid_fine_.weights[k] * std::abs(g);
  }
  for (int k = 0; k < outer_fine_.size(); ++k) {
    double g = data.outer(outer_fine_.s[k]);
    flux_o += outer_fine_.weights[k] * g;
    mass += outer_fine_.weights[k] * std::abs(g);
  }
  if (std::abs(flux_s + flux_o) > 1e-8 * (1.0 + mass))
    throw IncompatibleData("Neumann data has nonzero total flux");

  HarmonicField f;
  f.sources = src_;
  f.log_center = center_;
  // Interior log term carries the prescribed flux through the solid boundary:
  // a unit source inside S contributes -1 there with the fluid-outward normal.
  f.log_strength = -flux_s;
  f.strengths = neumann_op_.solve(neumann_rhs(data, f.log_strength));

  Eigen::VectorXd vals;
  f.evaluate_batch(solid_.points, &vals, nullptr);
  f.constant = -vals.mean();
  verify_neumann(f, data);
  return f;
}

HarmonicField PoseContext::solve_stream() const {
  const int nc = cfg_.collocation;
  const int ns = cfg_.sources;
  // Build (or reuse) the Dirichlet operator: values on both boundaries,
  // unknowns = source strengths, interior log strength, additive constant.
  {
    std::lock_guard<std::mutex> lock(fields_mu_);
    if (!dirichlet_op_) {
      Eigen::MatrixXd A(2 * nc, 2 * ns + 2);
      for (int k = 0; k < nc; ++k) {
        for (int j = 0; j < 2 * ns; ++j)
          A(k, j) = kernel_value(solid_.points.col(k), src_.col(j));
        A(k, 2 * ns) = kernel_value(solid_.points.col(k), center_);
        A(k, 2 * ns + 1) = 1.0;
      }
      for (int k = 0; k < nc; ++k) {
        for (int j = 0; j < 2 * ns; ++j)
          A(nc + k, j) = kernel_value(outer_.points.col(k), src_.col(j));
        A(nc + k, 2 * ns) = kernel_value(outer_.points.col(k), center_);
        A(nc + k, 2 * ns + 1) = 1.0;
      }
      dirichlet_op_ = std::make_unique<TsvdSolver>(A, cfg_.svd_cutoff);
    }
  }

  Eigen::VectorXd rhs(2 * nc);
  rhs.head(nc).setOnes();
  rhs.tail(nc).setZero();
  Eigen::VectorXd u = dirichlet_op_->solve(rhs);

  HarmonicField f;
  f.sources = src_;
  f.strengths = u.head(2 * ns);
  f.log_center = center_;
  f.log_strength = u[2 * ns];
  f.constant = u[2 * ns + 1];

  // verify the Dirichlet fit on the fine samplings
  Eigen::VectorXd vals;
  double resid = 0;
  f.evaluate_batch(solid_fine_.points, &vals, nullptr);
  resid = (vals.array() - 1.0).abs().maxCoeff();
  f.evaluate_batch(outer_fine_.points, &vals, nullptr);
  resid = std::max(resid, vals.array().abs().maxCoeff());
  if (resid > cfg_.boundary_tol * 2.0) throw ResidualTooLarge(resid, cfg_.boundary_tol * 2.0);

  // normalize: flux of psi through the solid boundary must be -1
  double flux = solid_flux(f);
  if (std::abs(flux) < 1e-14) throw ResidualTooLarge(std::abs(flux), 1e-14);
  f *= -1.0 / flux;
  f.residual = resid * std::abs(1.0 / flux);
  return f;
}

double PoseContext::solid_flux(const HarmonicField& f) const {
  Eigen::Matrix2Xd grads(2, solid_fine_.size());
  f.evaluate_batch(solid_fine_.points, nullptr, &grads);
  double flux = 0;
  for (int k = 0; k < solid_fine_.size(); ++k)
    flux += solid_fine_.weights[k] * grads.col(k).dot(solid_fine_.normals.col(k));
  return flux;
}

const HarmonicField& PoseContext::field(
    const std::string& id, const std::function<HarmonicField()>& make) const {
  {
    std::lock_guard<std::mutex> lock(fields_mu_);
    auto it = fields_.find(id);
    if (it != fields_.end()) return *it->second;
  }
  auto f = std::make_shared<HarmonicField>(make());
  std::lock_guard<std::mutex> lock(fields_mu_);
  auto [it, _] = fields_.emplace(id, std::move(f));
  return *it->second;
}

std::size_t LaplaceCache::KeyHash::operator()(const Key& k) const {
  std::size_t h = std::hash<long long>()(k.a);
  h ^= std::hash<long long>()(k.b) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= std::hash<long long>()(k.c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

LaplaceCache::LaplaceCache(std::shared_ptr<const SolidShape> shape,
                           DomainSpec domain, SolverConfig cfg,
                           std::size_t capacity)
    : shape_(std::move(shape)), domain_(std::move(domain)), cfg_(cfg),
      capacity_(capacity) {}

std::shared_ptr<const PoseContext> LaplaceCache::context(const Pose& q) const {
  auto quant = [](double v) { return static_cast<long long>(std::llround(v * 1e10)); };
  Key key{quant(q.h.x()), quant(q.h.y()), quant(q.theta)};
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = map_.find(key);
    if (it != map_.end()) {
      ++hits_;
      order_.splice(order_.begin(), order_, it->second.second);
      return it->second.first;
    }
    ++misses_;
  }
  auto ctx = std::make_shared<const PoseContext>(shape_, domain_, q, cfg_);
  std::lock_guard<std::mutex> lock(mu_);
  auto it = map_.find(key);
  if (it != map_.end()) return it->second.first;  // lost the race: keep first
  order_.push_front(key);
  map_.emplace(key, std::make_pair(ctx, order_.begin()));
  while (map_.size() > capacity_) {
    map_.erase(order_.back());
    order_.pop_back();
  }
  return ctx;
}

namespace {
// Periodic spectral differentiation matrices, cached by grid size
// (Trefethen's closed forms for uniform grids).
const Eigen::MatrixXd& diff_matrix(int n) {
  static std::mutex mu;
  static std::unordered_map<int, Eigen::MatrixXd> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  const double h = kTwoPi / n;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      double sgn = ((j - k) % 2 == 0) ? 1.0 : -1.0;
      if (n % 2 == 0)
        d(j, k) = 0.5 * sgn / std::tan(0.5 * (j - k) * h);
      else
        d(j, k) = 0.5 * sgn / std::sin(0.5 * (j - k) * h);
    }
  return cache.emplace(n, std::move(d)).first->second;
}
}  // namespace

Eigen::VectorXd spectral_derivative(const Eigen::VectorXd& values) {
  return diff_matrix(static_cast<int>(values.size())) * values;
}

}  // namespace immerse
