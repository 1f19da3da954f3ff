#include "affinelab/stats_kit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace affinelab {

void CompensatedSum::add(double v) {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v))
    compensation_ += (sum_ - t) + v;
  else
    compensation_ += (v - t) + sum_;
  sum_ = t;
}

double diff_of_products(double a, double b, double c, double d) {
  const double cd = c * d;
  const double err = std::fma(-c, d, cd);
  const double dop = std::fma(a, b, -cd);
  return dop + err;
}

Ecdf::Ecdf(std::vector<double> sample) : values_(std::move(sample)) {
  std::sort(values_.begin(), values_.end());
}

double Ecdf::operator()(double v) const {
  if (values_.empty()) return 0.0;
  const auto it = std::upper_bound(values_.begin(), values_.end(), v);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

MomentSummary moment_summary(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 2) throw std::invalid_argument("moment_summary: need at least two values");

  CompensatedSum sum;
  for (double v : sample) sum.add(v);
  const double mean = sum.value() / static_cast<double>(n);

  CompensatedSum m2;
  CompensatedSum m4;
  for (double v : sample) {
    const double d = v - mean;
    m2.add(d * d);
    m4.add(d * d * d * d);
  }
  const double dn = static_cast<double>(n);
  MomentSummary out;
  out.size = n;
  out.mean = mean;
  out.variance = std::max(0.0, m2.value() / (dn - 1.0));
  out.se_mean = std::sqrt(out.variance / dn);
  const double mu4 = m4.value() / dn;
  const double mu2 = m2.value() / dn;
  out.se_variance = std::sqrt(std::max(0.0, (mu4 - mu2 * mu2 * (dn - 3.0) / (dn - 1.0)) / dn));
  return out;
}

double ks_two_sample(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> a(xs.begin(), xs.end());
  std::vector<double> b(ys.begin(), ys.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double sup = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  // Once one sample is exhausted its ECDF is 1; the gap is largest right here.
  sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  return sup;
}

double quantile(std::span<const double> sample, double p) {
  if (sample.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p outside [0, 1]");
  std::vector<double> v(sample.begin(), sample.end());
  std::sort(v.begin(), v.end());
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<double> finite_values(std::span<const double> sample) {
  std::vector<double> out;
  out.reserve(sample.size());
  for (double v : sample)
    if (std::isfinite(v)) out.push_back(v);
  return out;
}

}  // namespace affinelab
