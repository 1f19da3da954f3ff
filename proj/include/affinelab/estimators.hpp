#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace affinelab {

/// Unit-spaced observations X_0, ..., X_n.
struct ObservationSeries {
  std::vector<double> x;

  /// Number of increments.
  std::size_t n() const { return x.empty() ? 0 : x.size() - 1; }
};

enum class EstimatorKind { LseTheta, LseThetaM, ClseGammaDelta, ClseThetaM };

std::string to_string(EstimatorKind kind);

struct EstimatorDiagnostics {
  double denominator = 0.0;
  bool degenerate = false;
  bool gamma_nonpositive = false;
};

/// Values that the estimator does not define (or could not compute) are empty.
struct EstimatorOutput {
  EstimatorKind kind = EstimatorKind::LseTheta;
  std::optional<double> theta;
  std::optional<double> m;
  std::optional<double> gamma;
  std::optional<double> delta;
  EstimatorDiagnostics diagnostics;
};

/// Compensated sums over i = 1..n shared by every estimator.
struct SeriesSums {
  std::size_t n = 0;
  double prev = 0.0;       // sum X_{i-1}
  double prev_sq = 0.0;    // sum X_{i-1}^2
  double curr = 0.0;       // sum X_i
  double prev_curr = 0.0;  // sum X_{i-1} X_i
  double incr = 0.0;       // sum (X_i - X_{i-1})
  double incr_prev = 0.0;  // sum (X_i - X_{i-1}) X_{i-1}
  double incr_sq = 0.0;    // sum (X_i - X_{i-1})^2
  bool prev_constant = false;

  /// n sum X_{i-1}^2 - (sum X_{i-1})^2, exactly zero for a constant prefix.
  double centred_denominator() const;
};

/// Throws std::invalid_argument when n < 2.
SeriesSums series_sums(const ObservationSeries& obs);

/// Least squares for theta with the drift m known.
EstimatorOutput lse_theta_known_m(const ObservationSeries& obs, double m);

/// Joint least squares for (theta, m).
EstimatorOutput lse_theta_m(const ObservationSeries& obs);

/// Conditional least squares for the AR(1) coefficients
/// X_i = gamma X_{i-1} + delta + noise.
EstimatorOutput clse_gamma_delta(const ObservationSeries& obs);

/// Inverts gamma = exp(-theta), delta = m (1 - exp(-theta)) / theta.
EstimatorOutput clse_theta_m(double gamma, double delta);

EstimatorOutput clse_theta_m(const ObservationSeries& obs);

}  // namespace affinelab
