#include "affinelab/scaling_lab.hpp"

#include "affinelab/sde_engine.hpp"
#include "affinelab/stats_kit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace affinelab {

CorollaryLimit corollary_limit_params(const CbiParams& p) {
  CorollaryLimit lim;
  lim.a_lim = p.b_imm + p.immigration_jump_mean();
  lim.beta = p.beta;
  lim.sigma2 = 2.0 * (p.alpha + 0.5 * p.branching_second_moment());
  return lim;
}

double scaled_marginal_sample(const CbiParams& p, double theta, double t, std::size_t grid_per_unit,
                              RngStream& rng, double y0) {
  if (!(theta >= 1.0)) throw std::invalid_argument("scale factor must be >= 1");
  if (!(t > 0.0)) throw std::invalid_argument("evaluation time must be positive");
  if (grid_per_unit < 1) throw std::invalid_argument("grid_per_unit must be positive");
  CbiParams scaled = p;
  scaled.beta = p.beta / theta;
  const double horizon = theta * t;
  const auto steps = static_cast<std::size_t>(std::ceil(horizon * static_cast<double>(grid_per_unit)));
  const SamplePath path = simulate_cbi_path(scaled, theta * y0, TimeGrid{0.0, horizon, steps}, rng);
  return path.y.back() / theta;
}

double limit_marginal_sample(const CorollaryLimit& lim, double y0, double t, RngStream& rng) {
  return cir_transition_sample_scaled(y0, lim.a_lim, -lim.beta, lim.sigma2, t, rng);
}

std::array<double, 2> limit_marginal_moments(const CorollaryLimit& lim, double y0, double t) {
  const double a = lim.a_lim;
  const double beta = lim.beta;
  if (beta == 0.0) return {y0 + a * t, lim.sigma2 * (y0 * t + 0.5 * a * t * t)};
  const double e1 = std::exp(beta * t);
  const double e2 = e1 * e1;
  const double mean = y0 * e1 + a * std::expm1(beta * t) / beta;
  const double var = lim.sigma2 * ((y0 + a / beta) * (e2 - e1) / beta - a * (e2 - 1.0) / (2.0 * beta * beta));
  return {mean, var};
}

void ScalingExperiment::validate() const {
  if (theta_values.empty()) throw std::invalid_argument("theta_values must not be empty");
  for (std::size_t i = 0; i < theta_values.size(); ++i) {
    if (!(theta_values[i] >= 1.0)) throw std::invalid_argument("theta_values must be >= 1");
    if (i > 0 && !(theta_values[i] > theta_values[i - 1]))
      throw std::invalid_argument("theta_values must be strictly increasing");
  }
  if (n_paths < 100) throw std::invalid_argument("n_paths must be >= 100");
  if (!(t_eval > 0.0)) throw std::invalid_argument("t_eval must be positive");
  const ValidationReport report = validate_cbi(cbi);
  if (!report.ok()) throw std::invalid_argument("invalid CBI parameters: " + report.violations.front());
}

double ks_standard_error(std::size_t n1, std::size_t n2) {
  return 0.2603 * std::sqrt(1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2));
}

bool ks_monotone(const std::vector<double>& ks, double se_each) {
  const double joint = std::sqrt(2.0) * se_each;
  for (std::size_t i = 1; i < ks.size(); ++i)
    if (ks[i] > ks[i - 1] + 2.0 * joint) return false;
  return true;
}

ScalingRun run_scaling_experiment(const ScalingExperiment& exp, std::uint64_t master_seed,
                                  const ExecutionPolicy& policy) {
  exp.validate();
  const CorollaryLimit lim = corollary_limit_params(exp.cbi);
  const std::uint64_t ref_arm = exp.theta_values.size();

  ScalingRun run;
  run.reference_samples = map_replicates<double>(exp.n_paths, policy, [&](std::size_t r) {
    RngStream rng(master_seed, arm_stream_id(ref_arm, r));
    return limit_marginal_sample(lim, exp.y0, exp.t_eval, rng);
  });
  const auto moments = limit_marginal_moments(lim, exp.y0, exp.t_eval);
  auto& rep = run.report;
  rep.reference_mean = moments[0];
  rep.reference_variance = moments[1];

  for (std::size_t k = 0; k < exp.theta_values.size(); ++k) {
    const double theta = exp.theta_values[k];
    auto samples = map_replicates<double>(exp.n_paths, policy, [&](std::size_t r) {
      RngStream rng(master_seed, arm_stream_id(k, r));
      return scaled_marginal_sample(exp.cbi, theta, exp.t_eval, exp.grid_per_unit, rng, exp.y0);
    });
    const MomentSummary s = moment_summary(samples);
    rep.theta.push_back(theta);
    rep.ks.push_back(ks_two_sample(samples, run.reference_samples));
    rep.mean_gap.push_back(s.mean - moments[0]);
    rep.se.push_back(s.se_mean);
    rep.variance_gap.push_back(s.variance - moments[1]);
    rep.variance_se.push_back(s.se_variance);
    run.scaled_samples.push_back(std::move(samples));
  }
  rep.monotone = ks_monotone(rep.ks, ks_standard_error(exp.n_paths, exp.n_paths));
  return run;
}

SelfSimilarityReport self_similarity_check(const ModelParams& params, const InitialLaw& init, double theta_scale,
                                           double t, std::size_t n_paths, std::size_t steps,
                                           std::uint64_t master_seed, const ExecutionPolicy& policy) {
  if (init.y0 != 0.0 || init.x0 != 0.0) throw std::invalid_argument("self-similarity requires a start at the origin");
  if (params.b != 0.0 || params.theta != 0.0) throw std::invalid_argument("self-similarity requires b = theta = 0");
  if (!(theta_scale > 0.0) || !(t > 0.0)) throw std::invalid_argument("scale and time must be positive");
  if (n_paths < 1) throw std::invalid_argument("n_paths must be positive");

  const TimeGrid scaled_grid{0.0, theta_scale * t, steps};
  const TimeGrid plain_grid{0.0, t, steps};
  const auto scaled = terminal_state_batch(params, init, scaled_grid, {}, master_seed, 0, n_paths, policy);
  const auto plain = terminal_state_batch(params, init, plain_grid, {}, master_seed, 1, n_paths, policy);

  SelfSimilarityReport rep;
  for (const auto& s : scaled) {
    rep.scaled_x.push_back(s.x / theta_scale);
    rep.scaled_y.push_back(s.y / theta_scale);
  }
  for (const auto& s : plain) {
    rep.plain_x.push_back(s.x);
    rep.plain_y.push_back(s.y);
  }
  rep.ks_x = ks_two_sample(rep.scaled_x, rep.plain_x);
  rep.ks_y = ks_two_sample(rep.scaled_y, rep.plain_y);
  return rep;
}

TestFunction parse_test_function(const std::string& name) {
  if (name == "constant") return TestFunction::Constant;
  if (name == "x2") return TestFunction::LinearX;
  if (name == "x2_squared") return TestFunction::SquareX;
  if (name == "exp_bump") return TestFunction::ExpBump;
  throw std::invalid_argument("unknown test function '" + name + "'");
}

std::string to_string(TestFunction f) {
  switch (f) {
    case TestFunction::Constant: return "constant";
    case TestFunction::LinearX: return "x2";
    case TestFunction::SquareX: return "x2_squared";
    case TestFunction::ExpBump: return "exp_bump";
  }
  return "unknown";
}

FunctionJet evaluate(TestFunction f, double x1, double x2) {
  switch (f) {
    case TestFunction::Constant: return {1.0, 0.0, 0.0, 0.0, 0.0};
    case TestFunction::LinearX: return {x2, 0.0, 1.0, 0.0, 0.0};
    case TestFunction::SquareX: return {x2 * x2, 0.0, 2.0 * x2, 0.0, 2.0};
    case TestFunction::ExpBump: {
      const double v = std::exp(-x1 - x2 * x2);
      return {v, -v, -2.0 * x2 * v, v, (4.0 * x2 * x2 - 2.0) * v};
    }
  }
  throw std::invalid_argument("unknown test function");
}

double generator_apply(const ModelParams& params, TestFunction f, double x1, double x2) {
  const FunctionJet j = evaluate(f, x1, x2);
  return (params.a - params.b * x1) * j.d1 + (params.m - params.theta * x2) * j.d2 + 0.5 * x1 * (j.d11 + j.d22);
}

GeneratorResidual generator_residual(const ModelParams& params, double x1, double x2, TestFunction f, double h,
                                     std::size_t n_paths, std::size_t substeps, std::uint64_t master_seed,
                                     std::uint64_t arm, const ExecutionPolicy& policy) {
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  if (n_paths < 2) throw std::invalid_argument("n_paths must be >= 2");
  const InitialLaw start{x1, x2};
  const TimeGrid grid{0.0, h, substeps};
  JointPathOptions options;
  options.variance = VarianceRule::Trapezoid;
  const auto ends = terminal_state_batch(params, start, grid, options, master_seed, arm, n_paths, policy);

  std::vector<double> values(ends.size());
  std::transform(ends.begin(), ends.end(), values.begin(),
                 [&](const TerminalState& s) { return evaluate(f, s.y, s.x).value; });
  const MomentSummary s = moment_summary(values);
  const double f0 = evaluate(f, x1, x2).value;
  return {(s.mean - f0) / h - generator_apply(params, f, x1, x2), s.se_mean / h};
}

}  // namespace affinelab
