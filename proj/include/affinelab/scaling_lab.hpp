#pragma once

#include "affinelab/kernels.hpp"
#include "affinelab/model_params.hpp"
#include "affinelab/rng.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace affinelab {

/// Parameters of the limiting diffusion dY = (a_lim + beta Y) dt + sqrt(sigma2 Y) dW.
struct CorollaryLimit {
  double a_lim = 0.0;
  double beta = 0.0;
  double sigma2 = 0.0;
};

CorollaryLimit corollary_limit_params(const CbiParams& p);

/// theta^{-1} Y^(theta)(theta t) for the CBI process whose linear drift
/// coefficient is p.beta / theta, started at theta * y0. The path uses
/// ceil(theta * t * grid_per_unit) Euler cells.
double scaled_marginal_sample(const CbiParams& p, double theta, double t, std::size_t grid_per_unit,
                              RngStream& rng, double y0 = 0.0);

/// Exact draw of the limiting diffusion at time t from y0.
double limit_marginal_sample(const CorollaryLimit& lim, double y0, double t, RngStream& rng);

/// Mean and variance of the limiting diffusion at time t from y0.
std::array<double, 2> limit_marginal_moments(const CorollaryLimit& lim, double y0, double t);

struct ScalingExperiment {
  CbiParams cbi;
  std::vector<double> theta_values{4.0, 16.0, 64.0};
  double t_eval = 1.0;
  std::size_t n_paths = 10000;
  std::size_t grid_per_unit = 64;
  double y0 = 0.0;

  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;
};

struct ConvergenceReport {
  std::vector<double> theta;
  std::vector<double> ks;
  std::vector<double> mean_gap;
  std::vector<double> se;
  std::vector<double> variance_gap;
  std::vector<double> variance_se;
  double reference_mean = 0.0;
  double reference_variance = 0.0;
  bool monotone = false;
};

/// Sampling scale of a two-sample KS statistic: the standard deviation of
/// the Kolmogorov distribution (0.2603) times sqrt(1/n1 + 1/n2).
double ks_standard_error(std::size_t n1, std::size_t n2);

/// KS values non-increasing along the sequence within 2 joint standard errors.
bool ks_monotone(const std::vector<double>& ks, double se_each);

struct ScalingRun {
  ConvergenceReport report;
  std::vector<std::vector<double>> scaled_samples;  // one per theta
  std::vector<double> reference_samples;
};

/// Arm k (k = 0..theta_values.size()-1) uses streams arm_stream_id(k, r); the
/// reference sampler uses arm theta_values.size().
ScalingRun run_scaling_experiment(const ScalingExperiment& exp, std::uint64_t master_seed,
                                  const ExecutionPolicy& policy);

struct SelfSimilarityReport {
  double ks_x = 0.0;
  double ks_y = 0.0;
  std::vector<double> scaled_x, scaled_y;  // theta^{-1} (X, Y)(theta t)
  std::vector<double> plain_x, plain_y;    // (X, Y)(t)
};

/// Compares theta^{-1}(Y, X)(theta t) against (Y, X)(t) with n_paths
/// independent paths per arm, both on `steps` cells. Requires b = theta = 0
/// and a start at the origin; throws std::invalid_argument otherwise.
SelfSimilarityReport self_similarity_check(const ModelParams& params, const InitialLaw& init, double theta_scale,
                                           double t, std::size_t n_paths, std::size_t steps,
                                           std::uint64_t master_seed, const ExecutionPolicy& policy);

enum class TestFunction { Constant, LinearX, SquareX, ExpBump };

TestFunction parse_test_function(const std::string& name);
std::string to_string(TestFunction f);

struct FunctionJet {
  double value = 0.0;
  double d1 = 0.0;   // df/dx1
  double d2 = 0.0;   // df/dx2
  double d11 = 0.0;
  double d22 = 0.0;
};

/// Value and hand-coded derivatives at (x1, x2). ExpBump is exp(-x1 - x2^2).
FunctionJet evaluate(TestFunction f, double x1, double x2);

/// (A f)(x) = (a - b x1) f_1 + (m - theta x2) f_2 + x1 (f_11 + f_22) / 2.
double generator_apply(const ModelParams& params, TestFunction f, double x1, double x2);

struct GeneratorResidual {
  double residual = 0.0;
  double se = 0.0;
};

/// [E f(Z_h | Z_0 = x) - f(x)] / h - (A f)(x), with the expectation a Monte
/// Carlo mean over n_paths joint paths on [0, h] with `substeps` trapezoid
/// cells (exact Y transitions). Replicate r uses stream arm_stream_id(arm, r).
GeneratorResidual generator_residual(const ModelParams& params, double x1, double x2, TestFunction f, double h,
                                     std::size_t n_paths, std::size_t substeps, std::uint64_t master_seed,
                                     std::uint64_t arm, const ExecutionPolicy& policy);

}  // namespace affinelab
