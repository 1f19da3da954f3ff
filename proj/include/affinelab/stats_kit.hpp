#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace affinelab {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// a*b - c*d with one rounding error per product (Kahan's FMA trick).
double diff_of_products(double a, double b, double c, double d);

/// Right-continuous empirical distribution function.
class Ecdf {
 public:
  explicit Ecdf(std::vector<double> sample);

  double operator()(double v) const;
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

struct MomentSummary {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double se_mean = 0.0;
  double se_variance = 0.0;
  std::size_t size = 0;
};

/// Throws std::invalid_argument for fewer than two values.
MomentSummary moment_summary(std::span<const double> sample);

/// Two-sample Kolmogorov-Smirnov statistic by exact merge scan.
/// Throws std::invalid_argument when either sample is empty.
double ks_two_sample(std::span<const double> xs, std::span<const double> ys);

/// Linear-interpolation quantile (Hyndman-Fan type 7). p in [0, 1].
double quantile(std::span<const double> sample, double p);

/// Copies the finite entries of `sample`.
std::vector<double> finite_values(std::span<const double> sample);

}  // namespace affinelab
