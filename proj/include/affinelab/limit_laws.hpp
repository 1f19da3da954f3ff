#pragma once

#include "affinelab/rng.hpp"

#include <cstddef>
#include <utility>

namespace affinelab {

/// One replicate of the limit functionals of the diffusion
///   dY = a dt + sqrt(Y) dW,  dX = m dt + sqrt(Y) dB,  (Y_0, X_0) = (0, 0)
/// on [0, 1].
struct LimitFunctionals {
  double int_x = 0.0;    // int_0^1 X dt
  double int_x2 = 0.0;   // int_0^1 X^2 dt
  double x1 = 0.0;       // X_1
  double int_y = 0.0;    // int_0^1 Y dt
  double int_xdx = 0.0;  // int_0^1 X dX = (X_1^2 - int_0^1 Y dt) / 2
};

/// Y by exact CIR transitions, X by Euler on a grid of `steps` cells.
/// Time integrals integrate the piecewise-linear interpolant of the grid
/// values exactly; int_xdx comes from the Ito identity, not from summed
/// increments. a == 0 is accepted (Y stays at 0). Throws
/// std::invalid_argument for steps < 2 or a < 0.
LimitFunctionals sample_limit_functionals(double a, double m, std::size_t steps, RngStream& rng);

/// A fine sample on `fine_steps` cells and a coarse sample on fine_steps / 2
/// cells driven by the same noise: the coarse Y is the fine Y at even nodes
/// and each coarse Brownian increment is the sum of two fine ones.
/// `fine_steps` must be even and >= 4.
std::pair<LimitFunctionals, LimitFunctionals> sample_limit_functionals_coupled(double a, double m,
                                                                               std::size_t fine_steps,
                                                                               RngStream& rng);

/// Limit of n * theta_tilde (drift m known):
///   -(int_xdx - m int_x) / int_x2.
/// Throws std::domain_error if int_x2 == 0.
double known_drift_theta_limit(const LimitFunctionals& f, double m);

struct JointDriftLimit {
  double theta = 0.0;  // limit of n * theta_hat
  double m = 0.0;      // limit of m_hat
};

/// Limits of the joint least-squares estimators. Throws std::domain_error
/// if int_x2 - int_x^2 == 0.
JointDriftLimit joint_drift_limit(const LimitFunctionals& f);

/// J = int_x2 (x1 - m) - int_x (int_xdx - m int_x); E J = m a / 6.
double drift_correlation_j(const LimitFunctionals& f, double m);

}  // namespace affinelab
