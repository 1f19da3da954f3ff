#include "affinelab/experiment.hpp"

#include "affinelab/estimators.hpp"
#include "affinelab/limit_laws.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace affinelab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::size_t positive_size(const Config& cfg, const std::string& key, std::size_t fallback) {
  const std::int64_t v = cfg.get_int(key, static_cast<std::int64_t>(fallback));
  if (v < 1) throw ConfigError(key, "must be a positive integer");
  return static_cast<std::size_t>(v);
}

std::optional<JumpMeasure> parse_measure(const Config& cfg, const std::string& section) {
  if (!cfg.has_section(section)) return std::nullopt;
  JumpMeasure meas;
  meas.rate = cfg.get_double(section + ".rate", 0.0);
  const std::string law = cfg.get_string(section + ".law", "discrete");
  if (law == "exponential") {
    meas.law = ExponentialJumpLaw{cfg.get_double(section + ".mean", 1.0)};
  } else if (law == "discrete") {
    DiscreteJumpLaw d;
    for (const auto& row : cfg.get_matrix(section + ".points")) {
      if (row.size() < 2) throw ConfigError(section + ".points", "each point needs coordinates and a probability");
      d.points.push_back(JumpPoint{std::vector<double>(row.begin(), row.end() - 1), row.back()});
    }
    meas.law = std::move(d);
  } else {
    throw ConfigError(section + ".law", "expected 'discrete' or 'exponential'");
  }
  return meas;
}

double expected_linear_mean(double start, double drift, double reversion, double t) {
  if (reversion == 0.0) return start + drift * t;
  return std::exp(-reversion * t) * start + drift * -std::expm1(-reversion * t) / reversion;
}

CheckResult check_le(std::string name, double value, double bound) {
  return {std::move(name), value, bound, "<=", value <= bound, 0.0};
}

CheckResult check_gt(std::string name, double value, double bound) {
  return {std::move(name), value, bound, ">", value > bound, 0.0};
}

CheckResult check_in(std::string name, double value, double lo, double hi) {
  return {std::move(name), value, lo, "in", value >= lo && value <= hi, hi};
}

std::vector<double> column_of(const std::vector<LimitFunctionals>& fs, double LimitFunctionals::*field) {
  std::vector<double> out(fs.size());
  std::transform(fs.begin(), fs.end(), out.begin(), [&](const LimitFunctionals& f) { return f.*field; });
  return out;
}

template <class F>
std::vector<double> derived_column(const std::vector<LimitFunctionals>& fs, F&& fn) {
  std::vector<double> out(fs.size());
  std::transform(fs.begin(), fs.end(), out.begin(), [&](const LimitFunctionals& f) {
    try {
      return fn(f);
    } catch (const std::domain_error&) {
      return kNaN;
    }
  });
  return out;
}

void add_summary(RunReport& rep, const std::string& name, const std::vector<double>& values) {
  const auto finite = finite_values(values);
  if (finite.size() >= 2) rep.statistics[name] = moment_summary(finite);
}

double ks_finite(const std::vector<double>& a, const std::vector<double>& b) {
  return ks_two_sample(finite_values(a), finite_values(b));
}

std::size_t count_undefined(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); }));
}

void require_condition_c(const ExperimentConfig& cfg) {
  const ValidationReport rep = validate_condition_c(cfg.model, cfg.init);
  if (!rep.ok()) throw ConfigError("model", "Condition (C) violated: " + rep.violations.front());
}

void require_positive_immigration(const ExperimentConfig& cfg) {
  if (!(cfg.model.a > 0.0)) throw ConfigError("model.a", "immigration drift must be positive");
}

ExecutionPolicy policy_of(const ExperimentConfig& cfg) { return {Execution::Parallel, cfg.threads}; }

nlohmann::json model_diagnostics(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["criticality"] = to_string(classify_criticality(cfg.model.b, cfg.model.theta));
  j["condition_c"] = validate_condition_c(cfg.model, cfg.init).violations;

  AdmissibleParams adm;
  adm.a_mat = Eigen::MatrixXd::Zero(2, 2);
  adm.alpha = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  adm.b_vec = Eigen::Vector2d(cfg.model.a, cfg.model.m);
  adm.beta = Eigen::Vector2d(-cfg.model.b, -cfg.model.theta).asDiagonal();
  if (cfg.m_meas) adm.m_meas = *cfg.m_meas;
  if (cfg.mu_meas) adm.mu_meas = *cfg.mu_meas;
  j["admissible"] = validate_admissible(adm).violations;
  if (cfg.m_meas || cfg.mu_meas) {
    const AdmissibleParams lim = limit_parameters(adm.a_mat, adm.alpha, adm.b_vec, adm.beta, adm.m_meas, adm.mu_meas);
    j["limit_alpha"] = {{lim.alpha(0, 0), lim.alpha(0, 1)}, {lim.alpha(1, 0), lim.alpha(1, 1)}};
    j["limit_b"] = {lim.b_vec(0), lim.b_vec(1)};
  }
  return j;
}

std::size_t grid_steps(double horizon, std::size_t per_unit) {
  return static_cast<std::size_t>(std::ceil(horizon * static_cast<double>(per_unit)));
}

RunResult run_simulate(const ExperimentConfig& cfg) {
  require_positive_immigration(cfg);
  RunResult res;
  const TimeGrid grid{0.0, cfg.horizon, grid_steps(cfg.horizon, cfg.steps_per_unit)};
  JointPathOptions opts;
  opts.variance = cfg.variance;
  const auto ends = terminal_state_batch(cfg.model, cfg.init, grid, opts, cfg.master_seed, 0, cfg.replicates,
                                         policy_of(cfg));
  std::vector<double> ys, xs;
  for (const auto& e : ends) {
    ys.push_back(e.y);
    xs.push_back(e.x);
  }
  res.samples.add("Y_T", ys);
  res.samples.add("X_T", xs);
  add_summary(res.report, "Y_T", ys);
  add_summary(res.report, "X_T", xs);

  RngStream rng(cfg.master_seed, arm_stream_id(0, 0));
  const SamplePath path = simulate_joint_path(cfg.model, cfg.init, grid, rng, opts);
  std::ostringstream path_csv;
  write_path_csv(path_csv, path);
  res.files["path.csv"] = path_csv.str();
  if (std::floor(cfg.horizon) == cfg.horizon) {
    std::ostringstream obs_csv;
    write_observations_csv(obs_csv, subsample_integer_times(path));
    res.files["observations.csv"] = obs_csv.str();
  }
  res.report.extra["model"] = model_diagnostics(cfg);
  return res;
}

RunResult run_estimate(const ExperimentConfig& cfg) {
  if (cfg.input.empty()) throw ConfigError("estimate.input", "an observation CSV is required");
  std::ifstream in(cfg.input);
  if (!in) throw ConfigError("estimate.input", "cannot open '" + cfg.input.string() + "'");
  const ObservationSeries obs = read_observations_csv(in);
  if (obs.n() < 2) throw ConfigError("estimate.input", "need at least three observations");

  nlohmann::json all = nlohmann::json::array();
  const std::string& kind = cfg.estimator_kind;
  if (kind == "all" || kind == "LSE_theta") all.push_back(estimator_json(lse_theta_known_m(obs, cfg.model.m)));
  if (kind == "all" || kind == "LSE_theta_m") all.push_back(estimator_json(lse_theta_m(obs)));
  if (kind == "all" || kind == "CLSE_gamma_delta") all.push_back(estimator_json(clse_gamma_delta(obs)));
  if (kind == "all" || kind == "CLSE_theta_m") all.push_back(estimator_json(clse_theta_m(obs)));
  if (all.empty()) throw ConfigError("estimate.kind", "unknown estimator kind '" + kind + "'");

  RunResult res;
  const nlohmann::json out = all.size() == 1 ? all.front() : all;
  res.report.extra["estimates"] = out;
  res.report.extra["n"] = obs.n();
  res.files["estimate.json"] = out.dump(2) + "\n";
  return res;
}

void add_limit_columns(SampleTable& table, const std::vector<LimitFunctionals>& fs, double m) {
  table.add("int_x", column_of(fs, &LimitFunctionals::int_x));
  table.add("int_x2", column_of(fs, &LimitFunctionals::int_x2));
  table.add("x1", column_of(fs, &LimitFunctionals::x1));
  table.add("int_y", column_of(fs, &LimitFunctionals::int_y));
  table.add("int_xdx", column_of(fs, &LimitFunctionals::int_xdx));
  table.add("thm2", derived_column(fs, [&](const LimitFunctionals& f) { return known_drift_theta_limit(f, m); }));
  table.add("thm3_theta", derived_column(fs, [](const LimitFunctionals& f) { return joint_drift_limit(f).theta; }));
  table.add("thm3_m", derived_column(fs, [](const LimitFunctionals& f) { return joint_drift_limit(f).m; }));
  table.add("J", derived_column(fs, [&](const LimitFunctionals& f) { return drift_correlation_j(f, m); }));
}

RunResult run_limit_law(const ExperimentConfig& cfg) {
  if (!(cfg.model.a >= 0.0)) throw ConfigError("model.a", "must be nonnegative");
  RunResult res;
  const auto fs = limit_functional_batch(cfg.model.a, cfg.model.m, cfg.limit_steps, cfg.master_seed, 1,
                                         cfg.replicates, policy_of(cfg));
  add_limit_columns(res.samples, fs, cfg.model.m);
  for (const auto& name : res.samples.columns) add_summary(res.report, name, res.samples.column(name));

  double worst_gap = std::numeric_limits<double>::infinity();
  double worst_identity = 0.0;
  for (const auto& f : fs) {
    worst_gap = std::min(worst_gap, f.int_x2 - f.int_x * f.int_x);
    const double rhs = 0.5 * (f.x1 * f.x1 - f.int_y);
    worst_identity = std::max(worst_identity, std::abs(f.int_xdx - rhs) / std::max(1.0, std::abs(rhs)));
  }
  res.report.checks.push_back(check_gt("cauchy_schwarz_gap_min", worst_gap, -1e-12));
  res.report.checks.push_back(check_le("ito_identity_residual_max", worst_identity, 1e-10));
  return res;
}

RunResult run_thm_check(const ExperimentConfig& cfg) {
  require_condition_c(cfg);
  if (cfg.n_obs < 2) throw ConfigError("experiment.n_obs", "must be at least 2");
  RunResult res;
  SeriesBatchSpec spec{cfg.model, cfg.init, cfg.n_obs, cfg.steps_per_unit, {}};
  spec.options.variance = cfg.variance;
  const auto est = estimator_batch(spec, cfg.master_seed, 0, cfg.replicates, policy_of(cfg));
  const auto fs =
      limit_functional_batch(cfg.model.a, cfg.model.m, cfg.limit_steps, cfg.master_seed, 1, cfg.replicates,
                             policy_of(cfg));

  auto pick = [&](double EstimatorSample::*field) {
    std::vector<double> v(est.size());
    std::transform(est.begin(), est.end(), v.begin(), [&](const EstimatorSample& s) { return s.*field; });
    return v;
  };
  SampleTable& t = res.samples;
  t.add("n_theta_tilde", pick(&EstimatorSample::n_theta_known_m));
  t.add("n_theta_lse", pick(&EstimatorSample::n_theta_lse));
  t.add("m_lse", pick(&EstimatorSample::m_lse));
  t.add("n_theta_clse", pick(&EstimatorSample::n_theta_clse));
  t.add("m_clse", pick(&EstimatorSample::m_clse));
  const double m = cfg.model.m;
  t.add("thm2", derived_column(fs, [&](const LimitFunctionals& f) { return known_drift_theta_limit(f, m); }));
  t.add("thm3_theta", derived_column(fs, [](const LimitFunctionals& f) { return joint_drift_limit(f).theta; }));
  t.add("thm3_m", derived_column(fs, [](const LimitFunctionals& f) { return joint_drift_limit(f).m; }));
  for (const auto& name : t.columns) {
    add_summary(res.report, name, t.column(name));
    res.report.extra["undefined"][name] = count_undefined(t.column(name));
  }

  auto& rep = res.report;
  auto ks_check = [&](const std::string& name, const std::string& a, const std::string& b, double tol) {
    const double ks = ks_finite(t.column(a), t.column(b));
    rep.ks[name] = ks;
    rep.checks.push_back(check_le("ks_" + name, ks, tol));
  };
  const std::string& th = cfg.theorem;
  const bool all = th == "all";
  if (all || th == "2") ks_check("n_theta_tilde_vs_thm2", "n_theta_tilde", "thm2", cfg.ks_tolerance);
  if (all || th == "3") {
    ks_check("n_theta_lse_vs_thm3_theta", "n_theta_lse", "thm3_theta", cfg.ks_tolerance);
    ks_check("m_lse_vs_thm3_m", "m_lse", "thm3_m", cfg.ks_tolerance);
  }
  if (all || th == "4") {
    ks_check("n_theta_clse_vs_thm3_theta", "n_theta_clse", "thm3_theta", cfg.ks_tolerance);
    ks_check("m_clse_vs_thm3_m", "m_clse", "thm3_m", cfg.ks_tolerance);
    ks_check("n_theta_lse_vs_n_theta_clse", "n_theta_lse", "n_theta_clse", cfg.cross_ks_tolerance);
  }
  return res;
}

RunResult run_appendix_b(const ExperimentConfig& cfg) {
  if (!(cfg.model.a >= 0.0)) throw ConfigError("model.a", "must be nonnegative");
  RunResult res;
  const double a = cfg.model.a;
  const double m = cfg.model.m;
  const auto fs = limit_functional_batch(a, m, cfg.limit_steps, cfg.master_seed, 1, cfg.replicates, policy_of(cfg));
  std::vector<double> j(fs.size()), j2(fs.size());
  for (std::size_t r = 0; r < fs.size(); ++r) {
    j[r] = drift_correlation_j(fs[r], m);
    j2[r] = j[r] * j[r];
  }
  res.samples.add("J", j);
  const MomentSummary sj = moment_summary(j);
  const MomentSummary sj2 = moment_summary(j2);
  res.report.statistics["J"] = sj;
  res.report.statistics["J2"] = sj2;
  const double target = m * a / 6.0;
  res.report.extra["expected_mean_J"] = target;
  res.report.checks.push_back(
      check_le("mean_J_gap_over_se", std::abs(sj.mean - target) / sj.se_mean, cfg.mean_se_multiplier));
  if (m == 0.0)
    res.report.checks.push_back(check_gt("mean_J2_minus_4se", sj2.mean - cfg.mean_se_multiplier * sj2.se_mean, 0.0));
  return res;
}

RunResult run_moments_check(const ExperimentConfig& cfg) {
  require_positive_immigration(cfg);
  RunResult res;
  const double t = cfg.horizon;
  const TimeGrid grid{0.0, t, grid_steps(t, cfg.steps_per_unit)};
  JointPathOptions opts;
  opts.variance = cfg.variance;
  const auto ends = terminal_state_batch(cfg.model, cfg.init, grid, opts, cfg.master_seed, 0, cfg.replicates,
                                         policy_of(cfg));
  std::vector<double> ys, xs;
  for (const auto& e : ends) {
    ys.push_back(e.y);
    xs.push_back(e.x);
  }
  res.samples.add("Y_t", ys);
  res.samples.add("X_t", xs);
  const MomentSummary sy = moment_summary(ys);
  const MomentSummary sx = moment_summary(xs);
  res.report.statistics["Y_t"] = sy;
  res.report.statistics["X_t"] = sx;

  const auto& p = cfg.model;
  const double ey = expected_linear_mean(cfg.init.y0, p.a, p.b, t);
  const double ex = expected_linear_mean(cfg.init.x0, p.m, p.theta, t);
  res.report.extra["expected_mean_Y"] = ey;
  res.report.extra["expected_mean_X"] = ex;
  res.report.checks.push_back(check_le("mean_Y_gap_over_se", std::abs(sy.mean - ey) / sy.se_mean, cfg.mean_se_multiplier));
  res.report.checks.push_back(check_le("mean_X_gap_over_se", std::abs(sx.mean - ex) / sx.se_mean, cfg.mean_se_multiplier));
  if (validate_condition_c(p, cfg.init).ok()) {
    const double vx = cfg.init.y0 * t + 0.5 * p.a * t * t;
    res.report.extra["expected_variance_X"] = vx;
    res.report.checks.push_back(check_le("variance_X_gap_over_se", std::abs(sx.variance - vx) / sx.se_variance,
                                         cfg.variance_se_multiplier));
  }
  return res;
}

RunResult run_scaling_check(const ExperimentConfig& cfg) {
  RunResult res;
  const ScalingRun run = run_scaling_experiment(cfg.scaling, cfg.master_seed, policy_of(cfg));
  const ConvergenceReport& c = run.report;
  for (std::size_t k = 0; k < c.theta.size(); ++k) {
    const std::string name = fmt::format("theta_{:g}", c.theta[k]);
    res.samples.add(name, run.scaled_samples[k]);
    add_summary(res.report, name, run.scaled_samples[k]);
    res.report.ks[name] = c.ks[k];
    res.report.checks.push_back(
        check_le("mean_gap_over_se_" + name, std::abs(c.mean_gap[k]) / c.se[k], cfg.mean_se_multiplier));
  }
  res.samples.add("reference", run.reference_samples);
  add_summary(res.report, "reference", run.reference_samples);
  res.report.checks.push_back(check_le("ks_at_largest_theta", c.ks.back(), cfg.scaling_ks_tolerance));
  res.report.checks.push_back({"ks_monotone", c.monotone ? 1.0 : 0.0, 1.0, ">=", c.monotone, 0.0});

  nlohmann::json j;
  j["theta"] = c.theta;
  j["ks"] = c.ks;
  j["mean_gap"] = c.mean_gap;
  j["se"] = c.se;
  j["monotone"] = c.monotone;
  j["variance_gap"] = c.variance_gap;
  j["variance_se"] = c.variance_se;
  j["reference_mean"] = c.reference_mean;
  j["reference_variance"] = c.reference_variance;
  const CorollaryLimit lim = corollary_limit_params(cfg.scaling.cbi);
  j["limit"] = {{"a_lim", lim.a_lim}, {"beta", lim.beta}, {"sigma2", lim.sigma2}};
  res.report.extra["scaling"] = j;
  res.files["scaling.json"] = j.dump(2) + "\n";
  return res;
}

RunResult run_self_similarity(const ExperimentConfig& cfg) {
  require_positive_immigration(cfg);
  RunResult res;
  const SelfSimilarityReport rep = self_similarity_check(cfg.model, cfg.init, cfg.theta_scale, cfg.horizon,
                                                         cfg.replicates, cfg.self_similarity_steps, cfg.master_seed,
                                                         policy_of(cfg));
  res.samples.add("scaled_x", rep.scaled_x);
  res.samples.add("plain_x", rep.plain_x);
  res.samples.add("scaled_y", rep.scaled_y);
  res.samples.add("plain_y", rep.plain_y);
  for (const auto& name : res.samples.columns) add_summary(res.report, name, res.samples.column(name));
  res.report.ks["x"] = rep.ks_x;
  res.report.ks["y"] = rep.ks_y;
  res.report.checks.push_back(check_le("ks_x", rep.ks_x, cfg.self_similarity_ks_tolerance));
  res.report.checks.push_back(check_le("ks_y", rep.ks_y, cfg.self_similarity_ks_tolerance));
  return res;
}

RunResult run_generator_check(const ExperimentConfig& cfg) {
  require_positive_immigration(cfg);
  RunResult res;
  const auto full = generator_residual(cfg.model, cfg.point_y, cfg.point_x, cfg.test_function, cfg.h, cfg.replicates,
                                       cfg.substeps, cfg.master_seed, 0, policy_of(cfg));
  const auto half = generator_residual(cfg.model, cfg.point_y, cfg.point_x, cfg.test_function, 0.5 * cfg.h,
                                       cfg.replicates, cfg.substeps, cfg.master_seed, 1, policy_of(cfg));
  res.samples.add("residual_h", {full.residual});
  res.samples.add("se_h", {full.se});
  res.samples.add("residual_half_h", {half.residual});
  res.samples.add("se_half_h", {half.se});

  const double trend_gap = std::abs(full.residual - 2.0 * half.residual);
  const double trend_se = std::sqrt(full.se * full.se + 4.0 * half.se * half.se);
  res.report.extra["residual_h"] = full.residual;
  res.report.extra["se_h"] = full.se;
  res.report.extra["residual_half_h"] = half.residual;
  res.report.extra["se_half_h"] = half.se;
  res.report.checks.push_back(check_le("richardson_gap_over_se", trend_gap / trend_se, cfg.mean_se_multiplier));
  res.report.checks.push_back(
      check_in("residual_ratio", std::abs(full.residual / half.residual), cfg.ratio_low, cfg.ratio_high));
  return res;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"simulate",      "estimate",    "limit-law",      "thm-check",
                                              "scaling-check", "appendix-b",  "moments-check",  "self-similarity",
                                              "generator-check"};
  return names;
}

ExperimentConfig experiment_config_from(const Config& cfg) {
  ExperimentConfig out;
  out.echo = cfg.entries();
  out.experiment = cfg.get_string("experiment.name", "");
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), out.experiment) == names.end())
    throw ConfigError("experiment.name", "unknown experiment '" + out.experiment + "'");

  out.master_seed = cfg.get_uint64("experiment.master_seed", out.master_seed);
  const std::int64_t reps = cfg.get_int("experiment.replicates", static_cast<std::int64_t>(out.replicates));
  if (reps < 1) throw ConfigError("experiment.replicates", "must be at least 1");
  out.replicates = static_cast<std::size_t>(reps);
  out.threads = static_cast<int>(cfg.get_int("experiment.threads", 0));
  if (out.threads < 0) throw ConfigError("experiment.threads", "must be nonnegative");

  out.model.a = cfg.get_double("model.a", out.model.a);
  out.model.b = cfg.get_double("model.b", out.model.b);
  out.model.m = cfg.get_double("model.m", out.model.m);
  out.model.theta = cfg.get_double("model.theta", out.model.theta);
  out.init.y0 = cfg.get_double("init.y0", out.init.y0);
  out.init.x0 = cfg.get_double("init.x0", out.init.x0);
  if (!(out.init.y0 >= 0.0)) throw ConfigError("init.y0", "must be nonnegative");
  out.m_meas = parse_measure(cfg, "measure.m");
  out.mu_meas = parse_measure(cfg, "measure.mu");

  const std::string variance = cfg.get_string("experiment.variance", "left");
  if (variance == "left")
    out.variance = VarianceRule::LeftEndpoint;
  else if (variance == "trapezoid")
    out.variance = VarianceRule::Trapezoid;
  else
    throw ConfigError("experiment.variance", "expected 'left' or 'trapezoid'");

  out.theorem = cfg.get_string("experiment.theorem", out.theorem);
  if (out.theorem != "2" && out.theorem != "3" && out.theorem != "4" && out.theorem != "all")
    throw ConfigError("experiment.theorem", "expected 2, 3, 4 or all");
  out.n_obs = positive_size(cfg, "experiment.n_obs", out.n_obs);
  out.steps_per_unit = positive_size(cfg, "experiment.steps_per_unit", out.steps_per_unit);
  if (!is_power_of_two(out.steps_per_unit)) throw ConfigError("experiment.steps_per_unit", "must be a power of two");
  out.limit_steps = positive_size(cfg, "experiment.limit_steps", out.limit_steps);
  if (out.limit_steps < 2) throw ConfigError("experiment.limit_steps", "must be at least 2");
  out.ks_tolerance = cfg.get_double("experiment.ks_tolerance", out.ks_tolerance);
  out.cross_ks_tolerance = cfg.get_double("experiment.cross_ks_tolerance", out.cross_ks_tolerance);
  out.horizon = cfg.get_double("experiment.horizon", out.horizon);
  if (!(out.horizon > 0.0)) throw ConfigError("experiment.horizon", "must be positive");
  out.mean_se_multiplier = cfg.get_double("experiment.mean_se_multiplier", out.mean_se_multiplier);
  out.variance_se_multiplier = cfg.get_double("experiment.variance_se_multiplier", out.variance_se_multiplier);

  auto& sc = out.scaling;
  sc.cbi.alpha = cfg.get_double("cbi.alpha", 0.0);
  sc.cbi.b_imm = cfg.get_double("cbi.b_imm", 0.0);
  sc.cbi.beta = cfg.get_double("cbi.beta", 0.0);
  sc.y0 = cfg.get_double("cbi.y0", 0.0);
  if (auto n = parse_measure(cfg, "measure.n")) sc.cbi.n_meas = *n;
  if (auto p = parse_measure(cfg, "measure.p")) sc.cbi.p_meas = *p;
  sc.theta_values = cfg.get_double_list("scaling.theta_values", sc.theta_values);
  sc.t_eval = cfg.get_double("scaling.t_eval", sc.t_eval);
  sc.grid_per_unit = positive_size(cfg, "scaling.grid_per_unit", sc.grid_per_unit);
  sc.n_paths = out.replicates;
  out.scaling_ks_tolerance = cfg.get_double("scaling.ks_tolerance", out.scaling_ks_tolerance);
  if (out.experiment == "scaling-check") {
    try {
      sc.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("scaling", e.what());
    }
  }

  out.theta_scale = cfg.get_double("self_similarity.theta_scale", out.theta_scale);
  out.self_similarity_steps = positive_size(cfg, "self_similarity.steps", out.self_similarity_steps);
  out.self_similarity_ks_tolerance = cfg.get_double("self_similarity.ks_tolerance", out.self_similarity_ks_tolerance);

  try {
    out.test_function = parse_test_function(cfg.get_string("generator.function", "x2_squared"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("generator.function", e.what());
  }
  const auto point = cfg.get_double_list("generator.point", {out.point_y, out.point_x});
  if (point.size() != 2 || !(point[0] >= 0.0)) throw ConfigError("generator.point", "expected [y >= 0, x]");
  out.point_y = point[0];
  out.point_x = point[1];
  out.h = cfg.get_double("generator.h", out.h);
  if (!(out.h > 0.0)) throw ConfigError("generator.h", "must be positive");
  out.substeps = positive_size(cfg, "generator.substeps", out.substeps);
  out.ratio_low = cfg.get_double("generator.ratio_low", out.ratio_low);
  out.ratio_high = cfg.get_double("generator.ratio_high", out.ratio_high);

  out.input = cfg.get_string("estimate.input", "");
  out.estimator_kind = cfg.get_string("estimate.kind", out.estimator_kind);
  return out;
}

void SampleTable::add(std::string name, std::vector<double> values) {
  columns.push_back(std::move(name));
  data.push_back(std::move(values));
}

const std::vector<double>& SampleTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("no sample column '" + name + "'");
  return data[static_cast<std::size_t>(it - columns.begin())];
}

void SampleTable::write_csv(std::ostream& out) const {
  for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
  out << "\n";
  const std::size_t rows = data.empty() ? 0 : data.front().size();
  std::string line;
  for (std::size_t r = 0; r < rows; ++r) {
    line.clear();
    for (std::size_t c = 0; c < data.size(); ++c) {
      if (c) line += ',';
      line += fmt::format("{:.17g}", data[c][r]);
    }
    line += '\n';
    out << line;
  }
}

bool RunReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["threads"] = threads;
  j["config"] = config;
  nlohmann::json stats = nlohmann::json::object();
  for (const auto& [name, s] : statistics)
    stats[name] = {{"mean", s.mean}, {"variance", s.variance}, {"se_mean", s.se_mean},
                   {"se_variance", s.se_variance}, {"size", s.size}};
  j["statistics"] = stats;
  j["ks"] = ks;
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json cj{{"name", c.name}, {"value", c.value}, {"relation", c.relation}, {"bound", c.bound}, {"pass", c.pass}};
    if (c.relation == "in") cj["bound_high"] = c.bound_high;
    cs.push_back(cj);
  }
  j["checks"] = cs;
  j["pass"] = pass();
  for (const auto& [k, v] : extra.items()) j[k] = v;
  j["wall_time_seconds"] = wall_time_seconds;
  return j;
}

nlohmann::json estimator_json(const EstimatorOutput& out) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"kind", to_string(out.kind)},
          {"theta", opt(out.theta)},
          {"m", opt(out.m)},
          {"gamma", opt(out.gamma)},
          {"delta", opt(out.delta)},
          {"denominator", out.diagnostics.denominator},
          {"flags",
           {{"degenerate", out.diagnostics.degenerate}, {"gamma_nonpositive", out.diagnostics.gamma_nonpositive}}}};
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunResult res;
  const std::string& e = cfg.experiment;
  if (e == "simulate") res = run_simulate(cfg);
  else if (e == "estimate") res = run_estimate(cfg);
  else if (e == "limit-law") res = run_limit_law(cfg);
  else if (e == "thm-check") res = run_thm_check(cfg);
  else if (e == "appendix-b") res = run_appendix_b(cfg);
  else if (e == "moments-check") res = run_moments_check(cfg);
  else if (e == "scaling-check") res = run_scaling_check(cfg);
  else if (e == "self-similarity") res = run_self_similarity(cfg);
  else if (e == "generator-check") res = run_generator_check(cfg);
  else throw ConfigError("experiment.name", "unknown experiment '" + e + "'");

  res.report.experiment = e;
  res.report.seed = cfg.master_seed;
  res.report.threads = resolved_thread_count(policy_of(cfg));
  res.report.config = cfg.echo;
  res.report.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

void write_outputs(const RunResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "report.json");
    out << result.report.to_json().dump(2) << "\n";
  }
  if (!result.samples.columns.empty()) {
    std::ofstream out(out_dir / "samples.csv");
    result.samples.write_csv(out);
  }
  for (const auto& [name, contents] : result.files) {
    std::ofstream out(out_dir / name);
    out << contents;
  }
}

}  // namespace affinelab
