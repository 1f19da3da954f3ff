#include "affinelab/sde_engine.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace affinelab {

void TimeGrid::validate() const {
  if (!(t1 > t0)) throw std::invalid_argument("time grid: t1 must exceed t0");
  if (steps < 1) throw std::invalid_argument("time grid: steps must be positive");
}

double noncentral_chi2_sample(double df, double nc, RngStream& rng) {
  if (nc <= 0.0) return df > 0.0 ? rng.gamma(0.5 * df, 2.0) : 0.0;
  if (df > 1.0) {
    // chi'^2(df, nc) = (Z + sqrt(nc))^2 + chi^2(df - 1)
    const double z = rng.normal() + std::sqrt(nc);
    return z * z + rng.gamma(0.5 * (df - 1.0), 2.0);
  }
  // Poisson mixture of central chi-squares.
  const double shape = 0.5 * df + static_cast<double>(rng.poisson(0.5 * nc));
  return shape > 0.0 ? rng.gamma(shape, 2.0) : 0.0;
}

double cir_transition_sample_unchecked(double y0, double a, double b, double dt, RngStream& rng) {
  if (dt == 0.0) return y0;
  double c;
  double decay;
  if (b == 0.0) {
    c = 4.0 / dt;
    decay = 1.0;
  } else {
    c = 4.0 * b / -std::expm1(-b * dt);
    decay = std::exp(-b * dt);
  }
  return noncentral_chi2_sample(4.0 * a, c * y0 * decay, rng) / c;
}

double cir_transition_sample(double y0, double a, double b, double dt, RngStream& rng) {
  if (!(a > 0.0)) throw std::invalid_argument("immigration drift must be positive");
  if (!(y0 >= 0.0)) throw std::invalid_argument("CIR state must be nonnegative");
  if (!(dt >= 0.0)) throw std::invalid_argument("CIR time step must be nonnegative");
  return cir_transition_sample_unchecked(y0, a, b, dt, rng);
}

double cir_transition_sample_scaled(double y0, double a, double b, double sigma2, double dt, RngStream& rng) {
  if (sigma2 == 0.0) {
    if (b == 0.0) return y0 + a * dt;
    const double decay = std::exp(-b * dt);
    return y0 * decay + a * -std::expm1(-b * dt) / b;
  }
  return sigma2 * cir_transition_sample_unchecked(y0 / sigma2, a / sigma2, b, dt, rng);
}

namespace {

void check_joint_inputs(const ModelParams& params, const InitialLaw& init, const JointPathOptions& options) {
  if (!(params.a > 0.0) && !(options.allow_zero_immigration && params.a == 0.0))
    throw std::invalid_argument("immigration drift must be positive");
  if (!(init.y0 >= 0.0)) throw std::invalid_argument("initial Y must be nonnegative");
}

struct JointStepper {
  const ModelParams& params;
  double dt;
  double sqrt_dt;
  VarianceRule rule;

  void step(double& y, double& x, RngStream& rng) const {
    const double y_next = cir_transition_sample_unchecked(y, params.a, params.b, dt, rng);
    const double var_rate = rule == VarianceRule::LeftEndpoint ? y : 0.5 * (y + y_next);
    x = x + (params.m - params.theta * x) * dt + std::sqrt(var_rate) * sqrt_dt * rng.normal();
    y = y_next;
  }
};

}  // namespace

SamplePath simulate_joint_path(const ModelParams& params, const InitialLaw& init, const TimeGrid& grid,
                               RngStream& rng, const JointPathOptions& options) {
  grid.validate();
  check_joint_inputs(params, init, options);
  const double dt = grid.dt();
  const JointStepper stepper{params, dt, std::sqrt(dt), options.variance};

  SamplePath path;
  path.grid = grid;
  path.y.resize(grid.steps + 1);
  path.x.resize(grid.steps + 1);
  double y = init.y0;
  double x = init.x0;
  path.y[0] = y;
  path.x[0] = x;
  for (std::size_t k = 1; k <= grid.steps; ++k) {
    stepper.step(y, x, rng);
    path.y[k] = y;
    path.x[k] = x;
  }
  return path;
}

ObservationSeries simulate_observations(const ModelParams& params, const InitialLaw& init, std::size_t n_obs,
                                        std::size_t steps_per_unit, RngStream& rng,
                                        const JointPathOptions& options) {
  if (n_obs < 1 || steps_per_unit < 1) throw std::invalid_argument("simulate_observations: empty grid");
  const TimeGrid grid{0.0, static_cast<double>(n_obs), n_obs * steps_per_unit};
  check_joint_inputs(params, init, options);
  const double dt = grid.dt();
  const JointStepper stepper{params, dt, std::sqrt(dt), options.variance};

  ObservationSeries obs;
  obs.x.resize(n_obs + 1);
  double y = init.y0;
  double x = init.x0;
  obs.x[0] = x;
  for (std::size_t i = 1; i <= n_obs; ++i) {
    for (std::size_t k = 0; k < steps_per_unit; ++k) stepper.step(y, x, rng);
    obs.x[i] = x;
  }
  return obs;
}

ObservationSeries subsample_integer_times(const SamplePath& path) {
  const TimeGrid& g = path.grid;
  const double n_real = g.t1;
  if (g.t0 != 0.0 || n_real < 1.0 || std::floor(n_real) != n_real)
    throw std::invalid_argument("grid must span [0, n] for an integer n >= 1");
  const auto n = static_cast<std::size_t>(n_real);
  if (g.steps % n != 0) throw std::invalid_argument("grid steps not divisible by the number of unit intervals");
  if (path.x.size() != g.steps + 1) throw std::invalid_argument("path does not match its grid");
  const std::size_t stride = g.steps / n;
  ObservationSeries obs;
  obs.x.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) obs.x.push_back(path.x[i * stride]);
  return obs;
}

SamplePath simulate_cbi_path(const CbiParams& p, double y0, const TimeGrid& grid, RngStream& rng) {
  grid.validate();
  const ValidationReport report = validate_cbi(p);
  if (!report.ok()) throw std::invalid_argument("invalid CBI parameters: " + report.violations.front());
  if (!(y0 >= 0.0)) throw std::invalid_argument("initial Y must be nonnegative");

  const double dt = grid.dt();
  const double sqrt_dt = std::sqrt(dt);
  const double branch_rate = p.p_meas.empty() ? 0.0 : p.p_meas.rate;
  const double branch_mean = p.p_meas.empty() ? 0.0 : p.p_meas.first_moment(1)(0) / p.p_meas.rate;
  const double immig_rate = p.n_meas.empty() ? 0.0 : p.n_meas.rate;

  SamplePath path;
  path.grid = grid;
  path.y.resize(grid.steps + 1);
  double y = y0;  // internal Euler state, may dip below zero
  path.y[0] = y0;
  for (std::size_t k = 1; k <= grid.steps; ++k) {
    const double yp = std::max(y, 0.0);
    double next = y + (p.b_imm + p.beta * yp) * dt;
    if (p.alpha > 0.0) next += std::sqrt(2.0 * p.alpha * yp) * sqrt_dt * rng.normal();

    if (branch_rate > 0.0) {
      // Intensity is frozen between accepted jumps and raised after each one;
      // the compensator integrates exactly the intensity that was used.
      double level = yp;
      double remaining = dt;
      double exposure = 0.0;
      double jumps = 0.0;
      while (level > 0.0) {
        const double wait = rng.exponential(level * branch_rate);
        if (wait >= remaining) {
          exposure += level * remaining;
          break;
        }
        exposure += level * wait;
        remaining -= wait;
        const double size = p.p_meas.sample_size(rng);
        level += size;
        jumps += size;
      }
      next += jumps - branch_rate * branch_mean * exposure;
    }

    if (immig_rate > 0.0) {
      const std::int64_t count = rng.poisson(immig_rate * dt);
      for (std::int64_t j = 0; j < count; ++j) next += p.n_meas.sample_size(rng);
    }

    y = next;
    path.y[k] = std::max(y, 0.0);
  }
  return path;
}

void write_path_csv(std::ostream& out, const SamplePath& path) {
  const bool has_x = !path.x.empty();
  out << (has_x ? "t,Y,X\n" : "t,Y\n");
  for (std::size_t k = 0; k < path.y.size(); ++k) {
    if (has_x)
      out << fmt::format("{:.17g},{:.17g},{:.17g}\n", path.grid.time(k), path.y[k], path.x[k]);
    else
      out << fmt::format("{:.17g},{:.17g}\n", path.grid.time(k), path.y[k]);
  }
}

void write_observations_csv(std::ostream& out, const ObservationSeries& obs) {
  out << "i,X\n";
  for (std::size_t i = 0; i < obs.x.size(); ++i) out << fmt::format("{},{:.17g}\n", i, obs.x[i]);
}

ObservationSeries read_observations_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("observation CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "i,X") throw std::runtime_error("observation CSV must start with header 'i,X'");
  ObservationSeries obs;
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("malformed observation row: " + line);
    try {
      const auto idx = std::stoull(line.substr(0, comma));
      if (idx != expected) throw std::runtime_error("observation indices must be 0, 1, 2, ...");
      obs.x.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::logic_error&) {
      throw std::runtime_error("malformed observation row: " + line);
    }
    ++expected;
  }
  return obs;
}

}  // namespace affinelab
