#pragma once

#include "affinelab/estimators.hpp"
#include "affinelab/model_params.hpp"
#include "affinelab/rng.hpp"

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace affinelab {

struct TimeGrid {
  double t0 = 0.0;
  double t1 = 1.0;
  std::size_t steps = 1;

  double dt() const { return (t1 - t0) / static_cast<double>(steps); }
  double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt(); }
  /// Throws std::invalid_argument unless t1 > t0 and steps >= 1.
  void validate() const;
};

/// Values of (Y, X) on a grid; `x` is empty for Y-only (CBI) paths.
struct SamplePath {
  TimeGrid grid;
  std::vector<double> y;
  std::vector<double> x;
};

/// How the conditional variance of an X increment is approximated.
enum class VarianceRule {
  LeftEndpoint,  // Y_k dt
  Trapezoid,     // (Y_k + Y_{k+1}) dt / 2
};

struct JointPathOptions {
  VarianceRule variance = VarianceRule::LeftEndpoint;
  /// Accept a == 0 (degenerate diffusion); only for tests.
  bool allow_zero_immigration = false;
};

/// Noncentral chi-square draw with `df` degrees of freedom and
/// noncentrality `nc`. df >= 0, nc >= 0.
double noncentral_chi2_sample(double df, double nc, RngStream& rng);

/// One exact transition of dY = (a - b Y) dt + sqrt(Y) dW over `dt`.
/// Throws std::invalid_argument("immigration drift must be positive") if a <= 0.
double cir_transition_sample(double y0, double a, double b, double dt, RngStream& rng);

/// Same law, accepting a >= 0 (a == 0 with y0 == 0 stays at 0).
double cir_transition_sample_unchecked(double y0, double a, double b, double dt, RngStream& rng);

/// Exact transition of dY = (a - b Y) dt + sqrt(sigma2 Y) dW, sigma2 >= 0.
double cir_transition_sample_scaled(double y0, double a, double b, double sigma2, double dt, RngStream& rng);

SamplePath simulate_joint_path(const ModelParams& params, const InitialLaw& init, const TimeGrid& grid,
                               RngStream& rng, const JointPathOptions& options = {});

/// Observations at t = 0, 1, ..., n_obs of a path simulated with
/// `steps_per_unit` sub-steps per unit time. Consumes the stream exactly as
/// simulate_joint_path on the grid [0, n_obs] does, without storing the path.
ObservationSeries simulate_observations(const ModelParams& params, const InitialLaw& init, std::size_t n_obs,
                                        std::size_t steps_per_unit, RngStream& rng,
                                        const JointPathOptions& options = {});

/// X at integer times of a path whose grid starts at 0 and ends at an
/// integer n dividing the step count. Throws std::invalid_argument otherwise.
ObservationSeries subsample_integer_times(const SamplePath& path);

/// Euler full-truncation path of the jump-type CBI process with
/// finite-activity immigration (n) and branching (p) jumps, started at y0.
SamplePath simulate_cbi_path(const CbiParams& p, double y0, const TimeGrid& grid, RngStream& rng);

/// CSV with header `t,Y,X` (or `t,Y` for Y-only paths), 17 significant digits.
void write_path_csv(std::ostream& out, const SamplePath& path);

/// CSV with header `i,X`.
void write_observations_csv(std::ostream& out, const ObservationSeries& obs);

/// Parses the `i,X` CSV written above. Throws std::runtime_error on bad input.
ObservationSeries read_observations_csv(std::istream& in);

}  // namespace affinelab
