#include "affinelab/estimators.hpp"

#include "affinelab/stats_kit.hpp"

#include <cmath>
#include <stdexcept>

namespace affinelab {

namespace {

constexpr double kDegenerateThreshold = 1e-300;

bool is_degenerate(double denominator) { return std::abs(denominator) <= kDegenerateThreshold; }

}  // namespace

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::LseTheta: return "LSE_theta";
    case EstimatorKind::LseThetaM: return "LSE_theta_m";
    case EstimatorKind::ClseGammaDelta: return "CLSE_gamma_delta";
    case EstimatorKind::ClseThetaM: return "CLSE_theta_m";
  }
  return "unknown";
}

double SeriesSums::centred_denominator() const {
  if (prev_constant) return 0.0;
  return diff_of_products(static_cast<double>(n), prev_sq, prev, prev);
}

SeriesSums series_sums(const ObservationSeries& obs) {
  if (obs.x.size() < 3) throw std::invalid_argument("estimators need n >= 2 increments");
  CompensatedSum prev, prev_sq, curr, prev_curr, incr, incr_prev, incr_sq;
  const auto& x = obs.x;
  bool constant = true;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double p = x[i - 1];
    const double c = x[i];
    const double d = c - p;
    prev.add(p);
    prev_sq.add(p * p);
    curr.add(c);
    prev_curr.add(p * c);
    incr.add(d);
    incr_prev.add(d * p);
    incr_sq.add(d * d);
    if (p != x[0]) constant = false;
  }
  SeriesSums s;
  s.n = obs.n();
  s.prev = prev.value();
  s.prev_sq = prev_sq.value();
  s.curr = curr.value();
  s.prev_curr = prev_curr.value();
  s.incr = incr.value();
  s.incr_prev = incr_prev.value();
  s.incr_sq = incr_sq.value();
  s.prev_constant = constant;
  return s;
}

EstimatorOutput lse_theta_known_m(const ObservationSeries& obs, double m) {
  const SeriesSums s = series_sums(obs);
  EstimatorOutput out;
  out.kind = EstimatorKind::LseTheta;
  out.m = m;
  out.diagnostics.denominator = s.prev_sq;
  out.diagnostics.degenerate = is_degenerate(s.prev_sq);
  if (!out.diagnostics.degenerate) out.theta = -(s.incr_prev - m * s.prev) / s.prev_sq;
  return out;
}

EstimatorOutput lse_theta_m(const ObservationSeries& obs) {
  const SeriesSums s = series_sums(obs);
  const double n = static_cast<double>(s.n);
  const double denom = s.centred_denominator();
  EstimatorOutput out;
  out.kind = EstimatorKind::LseThetaM;
  out.diagnostics.denominator = denom;
  out.diagnostics.degenerate = is_degenerate(denom);
  if (!out.diagnostics.degenerate) {
    out.theta = -diff_of_products(n, s.incr_prev, s.prev, s.incr) / denom;
    out.m = diff_of_products(s.prev_sq, s.incr, s.prev, s.incr_prev) / denom;
  }
  return out;
}

EstimatorOutput clse_gamma_delta(const ObservationSeries& obs) {
  const SeriesSums s = series_sums(obs);
  const double n = static_cast<double>(s.n);
  const double denom = s.centred_denominator();
  EstimatorOutput out;
  out.kind = EstimatorKind::ClseGammaDelta;
  out.diagnostics.denominator = denom;
  out.diagnostics.degenerate = is_degenerate(denom);
  if (!out.diagnostics.degenerate) {
    out.gamma = diff_of_products(n, s.prev_curr, s.prev, s.curr) / denom;
    out.delta = diff_of_products(s.prev_sq, s.curr, s.prev, s.prev_curr) / denom;
    out.diagnostics.gamma_nonpositive = !(*out.gamma > 0.0);
  }
  return out;
}

EstimatorOutput clse_theta_m(double gamma, double delta) {
  EstimatorOutput out;
  out.kind = EstimatorKind::ClseThetaM;
  out.gamma = gamma;
  out.delta = delta;
  if (!(gamma > 0.0)) {
    out.diagnostics.gamma_nonpositive = true;
    return out;
  }
  const double theta = -std::log(gamma);
  out.theta = theta;
  // (1 - e^{-theta}) / theta, with the removable singularity at 0.
  out.m = theta == 0.0 ? delta : delta * theta / -std::expm1(-theta);
  return out;
}

EstimatorOutput clse_theta_m(const ObservationSeries& obs) {
  const EstimatorOutput gd = clse_gamma_delta(obs);
  if (gd.diagnostics.degenerate) {
    EstimatorOutput out;
    out.kind = EstimatorKind::ClseThetaM;
    out.diagnostics = gd.diagnostics;
    return out;
  }
  EstimatorOutput out = clse_theta_m(*gd.gamma, *gd.delta);
  out.diagnostics.denominator = gd.diagnostics.denominator;
  return out;
}

}  // namespace affinelab
