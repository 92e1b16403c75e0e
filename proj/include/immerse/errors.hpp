#pragma once

#include <stdexcept>
#include <string>

namespace immerse {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// laplace
struct ResidualTooLarge : Error {
  double achieved, required;
  ResidualTooLarge(double a, double r)
      : Error("boundary residual " + std::to_string(a) + " exceeds tolerance " +
              std::to_string(r)),
        achieved(a),
        required(r) {}
};
struct IncompatibleData : Error {
  using Error::Error;
};
struct EvaluationNearSource : Error {
  using Error::Error;
};

// dynamics
struct StepTooLarge : Error {
  using Error::Error;
};

// geodesic / simulate
struct LeftAdmissibleSet : Error {
  double t_exit;
  explicit LeftAdmissibleSet(double t)
      : Error("trajectory left the admissible set at t = " + std::to_string(t)),
        t_exit(t) {}
};
struct ShootingDiverged : Error {
  int iterations;
  double residual;
  ShootingDiverged(int it, double res)
      : Error("shooting failed after " + std::to_string(it) +
              " iterations, residual " + std::to_string(res)),
        iterations(it),
        residual(res) {}
};
struct JunctionMismatch : Error {
  using Error::Error;
};
struct CorrectionDiverged : Error {
  using Error::Error;
};

// control
struct ConeDegenerate : Error {
  using Error::Error;
};
struct SupportOverlap : Error {
  using Error::Error;
};
struct ExtensionResidualTooLarge : Error {
  double achieved;
  explicit ExtensionResidualTooLarge(double a)
      : Error("harmonic extension residual " + std::to_string(a)), achieved(a) {}
};
struct NewtonStalled : Error {
  double best_residual;
  explicit NewtonStalled(double r)
      : Error("control synthesis stalled, best residual " + std::to_string(r)),
        best_residual(r) {}
};

// config
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace immerse
