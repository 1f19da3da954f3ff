#include "affinelab/limit_laws.hpp"

#include "affinelab/sde_engine.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace affinelab {

namespace {

/// Integrates grid values of (Y, X) cell by cell.
class FunctionalAccumulator {
 public:
  void add_cell(double y0, double y1, double x0, double x1) {
    sum_x_ += x0 + x1;
    sum_x2_ += x0 * x0 + x0 * x1 + x1 * x1;
    sum_y_ += y0 + y1;
  }

  LimitFunctionals finish(double dt, double x_end) const {
    LimitFunctionals f;
    f.int_x = 0.5 * dt * sum_x_;
    f.int_x2 = dt * sum_x2_ / 3.0;
    f.int_y = 0.5 * dt * sum_y_;
    f.x1 = x_end;
    f.int_xdx = 0.5 * (x_end * x_end - f.int_y);
    return f;
  }

 private:
  double sum_x_ = 0.0;
  double sum_x2_ = 0.0;
  double sum_y_ = 0.0;
};

void check_inputs(double a, std::size_t steps) {
  if (steps < 2) throw std::invalid_argument("limit functionals need at least two steps");
  if (!(a >= 0.0)) throw std::invalid_argument("limit functionals need a >= 0");
}

}  // namespace

LimitFunctionals sample_limit_functionals(double a, double m, std::size_t steps, RngStream& rng) {
  check_inputs(a, steps);
  const double dt = 1.0 / static_cast<double>(steps);
  const double sqrt_dt = std::sqrt(dt);
  FunctionalAccumulator acc;
  double y = 0.0;
  double x = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double y_next = cir_transition_sample_unchecked(y, a, 0.0, dt, rng);
    const double x_next = x + m * dt + std::sqrt(y) * sqrt_dt * rng.normal();
    acc.add_cell(y, y_next, x, x_next);
    y = y_next;
    x = x_next;
  }
  return acc.finish(dt, x);
}

std::pair<LimitFunctionals, LimitFunctionals> sample_limit_functionals_coupled(double a, double m,
                                                                               std::size_t fine_steps,
                                                                               RngStream& rng) {
  check_inputs(a, fine_steps);
  if (fine_steps % 2 != 0 || fine_steps < 4) throw std::invalid_argument("coupled sampler needs an even step count >= 4");
  const double dt = 1.0 / static_cast<double>(fine_steps);
  const double sqrt_dt = std::sqrt(dt);
  const double coarse_dt = 2.0 * dt;
  const double coarse_sqrt_dt = std::sqrt(coarse_dt);

  FunctionalAccumulator fine, coarse;
  double y = 0.0;
  double x = 0.0;
  double yc = 0.0;
  double xc = 0.0;
  for (std::size_t k = 0; k < fine_steps; k += 2) {
    const double y_mid = cir_transition_sample_unchecked(y, a, 0.0, dt, rng);
    const double z0 = rng.normal();
    const double y_end = cir_transition_sample_unchecked(y_mid, a, 0.0, dt, rng);
    const double z1 = rng.normal();

    const double x_mid = x + m * dt + std::sqrt(y) * sqrt_dt * z0;
    const double x_end = x_mid + m * dt + std::sqrt(y_mid) * sqrt_dt * z1;
    fine.add_cell(y, y_mid, x, x_mid);
    fine.add_cell(y_mid, y_end, x_mid, x_end);

    const double xc_end = xc + m * coarse_dt + std::sqrt(yc) * coarse_sqrt_dt * (z0 + z1) / std::numbers::sqrt2;
    coarse.add_cell(yc, y_end, xc, xc_end);

    y = y_end;
    x = x_end;
    yc = y_end;
    xc = xc_end;
  }
  return {fine.finish(dt, x), coarse.finish(coarse_dt, xc)};
}

double known_drift_theta_limit(const LimitFunctionals& f, double m) {
  if (f.int_x2 == 0.0) throw std::domain_error("int_0^1 X^2 dt vanishes");
  return -(f.int_xdx - m * f.int_x) / f.int_x2;
}

JointDriftLimit joint_drift_limit(const LimitFunctionals& f) {
  const double denom = f.int_x2 - f.int_x * f.int_x;
  if (denom == 0.0) throw std::domain_error("int X^2 dt - (int X dt)^2 vanishes");
  return {-(f.int_xdx - f.x1 * f.int_x) / denom, (f.x1 * f.int_x2 - f.int_x * f.int_xdx) / denom};
}

double drift_correlation_j(const LimitFunctionals& f, double m) {
  return f.int_x2 * (f.x1 - m) - f.int_x * (f.int_xdx - m * f.int_x);
}

}  // namespace affinelab
