#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace affinelab {

class RngStream;

/// Drift and mean-reversion constants of
///   dY = (a - b Y) dt + sqrt(Y) dW,
///   dX = (m - theta X) dt + sqrt(Y) dB.
struct ModelParams {
  double a = 1.0;
  double b = 0.0;
  double m = 0.0;
  double theta = 0.0;
};

/// Point-mass initial law for (Y0, X0).
struct InitialLaw {
  double y0 = 0.0;
  double x0 = 0.0;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  bool has(const std::string& fragment) const;
};

struct JumpPoint {
  std::vector<double> xi;
  double prob = 0.0;
};

struct DiscreteJumpLaw {
  std::vector<JumpPoint> points;
};

/// One-dimensional exponential jump sizes with the given mean.
struct ExponentialJumpLaw {
  double mean = 1.0;
};

/// Finite-activity (compound Poisson) jump measure: total mass `rate`
/// distributed according to `law`.
struct JumpMeasure {
  double rate = 0.0;
  std::variant<DiscreteJumpLaw, ExponentialJumpLaw> law = DiscreteJumpLaw{};

  static JumpMeasure none() { return {}; }
  static JumpMeasure point_mass(double rate, std::vector<double> xi);

  bool empty() const;
  /// Integral of xi against the measure, in `dim` coordinates.
  Eigen::VectorXd first_moment(Eigen::Index dim) const;
  /// Integral of xi xi^T against the measure.
  Eigen::MatrixXd second_moment(Eigen::Index dim) const;
  /// Integral of xi_1 + min(|xi_2|, |xi_2|^2): condition (v).
  double condition_v_integral() const;
  /// Integral of min(|xi|, |xi|^2): condition (vi).
  double condition_vi_integral() const;

  /// Draws one jump size from a one-dimensional law.
  double sample_size(RngStream& rng) const;
};

/// Checks rate, probabilities and support (R_+ x R^d minus the origin).
ValidationReport validate_jump_measure(const JumpMeasure& meas, Eigen::Index dim,
                                       const std::string& name);

struct AdmissibleParams {
  Eigen::MatrixXd a_mat;
  Eigen::MatrixXd alpha;
  Eigen::VectorXd b_vec;
  Eigen::MatrixXd beta;
  JumpMeasure m_meas;
  JumpMeasure mu_meas;

  Eigen::Index dimension() const { return a_mat.rows(); }
};

struct CbiParams {
  double alpha = 0.0;
  double b_imm = 0.0;
  double beta = 0.0;
  JumpMeasure n_meas;
  JumpMeasure p_meas;

  /// Integral of u n(du).
  double immigration_jump_mean() const;
  /// Integral of u^2 p(du).
  double branching_second_moment() const;
};

ValidationReport validate_cbi(const CbiParams& p);

enum class CriticalityClass { Subcritical, Critical, Supercritical };

std::string to_string(CriticalityClass c);

ValidationReport validate_condition_c(const ModelParams& params, const InitialLaw& init);

CriticalityClass classify_criticality(double b, double theta);

/// Throws std::invalid_argument when the matrix/vector shapes disagree.
ValidationReport validate_admissible(const AdmissibleParams& p);

/// Smallest eigenvalue of the symmetric part of `m`.
double min_symmetric_eigenvalue(const Eigen::MatrixXd& m);

/// Limit parameters (a, alpha + 1/2 int xi xi^T mu, b + e_1 int xi_1 m, beta, 0, 0)
/// of the scaling theorem, given the limits a, alpha, b, beta of the scaled family.
AdmissibleParams limit_parameters(const Eigen::MatrixXd& a_mat, const Eigen::MatrixXd& alpha,
                                  const Eigen::VectorXd& b_vec, const Eigen::MatrixXd& beta,
                                  const JumpMeasure& m_meas, const JumpMeasure& mu_meas);

/// Member of a scaled family: parameters at scale factor `theta`.
struct ScaledFamilyMember {
  double theta = 1.0;
  AdmissibleParams params;
};

/// Uses the largest-theta member with the normalisation theta^{-1} a, alpha, b,
/// theta beta as the limit estimate, then assembles the limit parameters with
/// that member's jump measures. Throws std::invalid_argument on an empty family.
AdmissibleParams limit_parameters(std::span<const ScaledFamilyMember> family);

}  // namespace affinelab
