#pragma once

#include "affinelab/config.hpp"
#include "affinelab/kernels.hpp"
#include "affinelab/model_params.hpp"
#include "affinelab/scaling_lab.hpp"
#include "affinelab/sde_engine.hpp"
#include "affinelab/stats_kit.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace affinelab {

/// Experiment names accepted by run_experiment (also the CLI subcommands).
const std::vector<std::string>& experiment_names();

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t master_seed = 42;
  std::size_t replicates = 1000;
  int threads = 0;

  ModelParams model;
  InitialLaw init;
  std::optional<JumpMeasure> m_meas;
  std::optional<JumpMeasure> mu_meas;
  VarianceRule variance = VarianceRule::LeftEndpoint;

  // thm-check: "2", "3", "4" or "all".
  std::string theorem = "2";
  std::size_t n_obs = 1000;
  std::size_t steps_per_unit = 8;
  std::size_t limit_steps = 4096;
  double ks_tolerance = 0.03;
  double cross_ks_tolerance = 0.01;

  // simulate, moments-check, self-similarity: evaluation time.
  double horizon = 1.0;
  double mean_se_multiplier = 4.0;
  double variance_se_multiplier = 5.0;

  ScalingExperiment scaling;
  double scaling_ks_tolerance = 0.04;

  double theta_scale = 4.0;
  std::size_t self_similarity_steps = 64;
  double self_similarity_ks_tolerance = 0.02;

  TestFunction test_function = TestFunction::SquareX;
  double point_y = 1.0;
  double point_x = 0.0;
  double h = 0.02;
  std::size_t substeps = 8;
  double ratio_low = 1.5;
  double ratio_high = 3.0;

  std::filesystem::path input;
  std::string estimator_kind = "all";

  std::map<std::string, std::string> echo;
};

/// Builds and validates an experiment config; throws ConfigError naming the
/// offending key.
ExperimentConfig experiment_config_from(const Config& cfg);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  std::string relation;  // "<=", ">=", ">", "in"
  bool pass = false;
  double bound_high = 0.0;  // upper end for "in"
};

/// Column-major table; row r of every column belongs to replicate r.
struct SampleTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;

  void add(std::string name, std::vector<double> values);
  const std::vector<double>& column(const std::string& name) const;
  /// Header line then one row per replicate, 17 significant digits.
  void write_csv(std::ostream& out) const;
};

struct RunReport {
  std::string experiment;
  std::uint64_t seed = 0;
  int threads = 0;
  std::map<std::string, std::string> config;
  std::map<std::string, MomentSummary> statistics;
  std::map<std::string, double> ks;
  std::vector<CheckResult> checks;
  nlohmann::json extra = nlohmann::json::object();
  double wall_time_seconds = 0.0;

  bool pass() const;
  nlohmann::json to_json() const;
};

struct RunResult {
  RunReport report;
  SampleTable samples;
  /// Additional output files: name -> contents.
  std::map<std::string, std::string> files;
};

/// Throws ConfigError or std::invalid_argument on invalid input.
RunResult run_experiment(const ExperimentConfig& cfg);

/// Writes report.json, samples.csv (when non-empty) and the extra files.
void write_outputs(const RunResult& result, const std::filesystem::path& out_dir);

/// JSON object {kind, theta, m, gamma, delta, denominator, flags}.
nlohmann::json estimator_json(const EstimatorOutput& out);

}  // namespace affinelab
