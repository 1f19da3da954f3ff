#include <gtest/gtest.h>

#include "affinelab/estimators.hpp"
#include "affinelab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace affinelab;

namespace {

ObservationSeries series(std::vector<double> x) { return ObservationSeries{std::move(x)}; }

ObservationSeries random_walk(std::mt19937_64& gen, std::size_t n) {
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> drift(-1.0, 1.0);
  const double m = drift(gen);
  std::vector<double> x{z(gen) * 3.0};
  for (std::size_t i = 0; i < n; ++i) x.push_back(x.back() + m + z(gen));
  return series(std::move(x));
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

TEST(LseThetaKnownM, Examples) {
  EXPECT_EQ(*lse_theta_known_m(series({0, 1, 1}), 0.0).theta, 0.0);
  EXPECT_EQ(*lse_theta_known_m(series({0, 1, 2}), 0.0).theta, -1.0);
  const auto d = lse_theta_known_m(series({0, 0, 0}), 0.0);
  EXPECT_TRUE(d.diagnostics.degenerate);
  EXPECT_FALSE(d.theta.has_value());
  EXPECT_EQ(*d.m, 0.0);
}

TEST(LseThetaM, Examples) {
  const auto pure = lse_theta_m(series({0, 1, 2}));
  EXPECT_EQ(*pure.theta, 0.0);
  EXPECT_EQ(*pure.m, 1.0);
  const auto out = lse_theta_m(series({0, 2, 2}));
  EXPECT_EQ(out.diagnostics.denominator, 4.0);
  EXPECT_EQ(*out.theta, 1.0);
  EXPECT_EQ(*out.m, 2.0);
  for (double c : {-3.5, 0.0, 5.0, 1e6 + 0.1}) {
    const auto d = lse_theta_m(series({c, c, c}));
    EXPECT_TRUE(d.diagnostics.degenerate) << c;
    EXPECT_EQ(d.diagnostics.denominator, 0.0);
    EXPECT_FALSE(d.theta.has_value());
  }
  // Only X_0..X_{n-1} enter the denominator.
  EXPECT_TRUE(lse_theta_m(series({5, 5, 5, 9})).diagnostics.degenerate);
}

TEST(ClseGammaDelta, Examples) {
  const auto a = clse_gamma_delta(series({0, 1, 2}));
  EXPECT_EQ(*a.gamma, 1.0);
  EXPECT_EQ(*a.delta, 1.0);
  EXPECT_FALSE(a.diagnostics.gamma_nonpositive);
  const auto b = clse_gamma_delta(series({0, 2, 2}));
  EXPECT_EQ(*b.gamma, 0.0);
  EXPECT_EQ(*b.delta, 2.0);
  EXPECT_TRUE(b.diagnostics.gamma_nonpositive);
  EXPECT_TRUE(clse_gamma_delta(series({5, 5, 5})).diagnostics.degenerate);
}

TEST(ClseThetaM, Inversion) {
  const auto zero = clse_theta_m(1.0, 1.0);
  EXPECT_EQ(*zero.theta, 0.0);
  EXPECT_EQ(*zero.m, 1.0);
  const auto two = clse_theta_m(std::exp(-2.0), 1.0);
  EXPECT_NEAR(*two.theta, 2.0, 1e-15);
  EXPECT_NEAR(*two.m, 2.0 / (1.0 - std::exp(-2.0)), 1e-14);
  EXPECT_NEAR(*two.m, 2.3130353, 1e-7);
  const auto neg = clse_theta_m(-0.1, 1.0);
  EXPECT_TRUE(neg.diagnostics.gamma_nonpositive);
  EXPECT_FALSE(neg.theta.has_value());
  EXPECT_FALSE(neg.m.has_value());
}

TEST(ClseThetaM, FromSeriesPropagatesFlags) {
  EXPECT_TRUE(clse_theta_m(series({0, 2, 2})).diagnostics.gamma_nonpositive);
  EXPECT_TRUE(clse_theta_m(series({1, 1, 1})).diagnostics.degenerate);
  const auto ok = clse_theta_m(series({0, 1, 2}));
  EXPECT_EQ(*ok.theta, 0.0);
  EXPECT_EQ(*ok.m, 1.0);
}

TEST(Estimators, TooShortSeriesThrows) {
  EXPECT_THROW(lse_theta_m(series({0, 1})), std::invalid_argument);
  EXPECT_THROW(lse_theta_known_m(series({0}), 1.0), std::invalid_argument);
}

TEST(Estimators, KindNames) {
  EXPECT_EQ(to_string(EstimatorKind::LseTheta), "LSE_theta");
  EXPECT_EQ(to_string(EstimatorKind::LseThetaM), "LSE_theta_m");
  EXPECT_EQ(to_string(EstimatorKind::ClseGammaDelta), "CLSE_gamma_delta");
  EXPECT_EQ(to_string(EstimatorKind::ClseThetaM), "CLSE_theta_m");
}

// Long-double evaluation of the defining rational expressions.
TEST(Estimators, MatchExtendedPrecisionOracle) {
  std::mt19937_64 gen(21);
  for (int rep = 0; rep < 2000; ++rep) {
    const auto obs = random_walk(gen, 2 + gen() % 300);
    long double sp = 0, sp2 = 0, sc = 0, spc = 0, sd = 0, sdp = 0;
    const std::size_t n = obs.n();
    for (std::size_t i = 1; i <= n; ++i) {
      const long double p = obs.x[i - 1], c = obs.x[i];
      sp += p;
      sp2 += p * p;
      sc += c;
      spc += p * c;
      sd += c - p;
      sdp += (c - p) * p;
    }
    const long double d = n * sp2 - sp * sp;
    const auto lse = lse_theta_m(obs);
    const auto clse = clse_gamma_delta(obs);
    const auto known = lse_theta_known_m(obs, 0.7);
    EXPECT_LT(rel_gap(*lse.theta, static_cast<double>(-(n * sdp - sp * sd) / d)), 1e-9);
    EXPECT_LT(rel_gap(*lse.m, static_cast<double>((sp2 * sd - sp * sdp) / d)), 1e-9);
    EXPECT_LT(rel_gap(*clse.gamma, static_cast<double>((n * spc - sp * sc) / d)), 1e-9);
    EXPECT_LT(rel_gap(*clse.delta, static_cast<double>((sp2 * sc - sp * spc) / d)), 1e-9);
    EXPECT_LT(rel_gap(*known.theta, static_cast<double>(-(sdp - 0.7L * sp) / sp2)), 1e-9);
  }
}

TEST(Estimators, DiscreteItoIdentity) {
  std::mt19937_64 gen(4);
  for (int rep = 0; rep < 10000; ++rep) {
    const auto obs = random_walk(gen, 2 + gen() % 100);
    const auto s = series_sums(obs);
    const double lhs = s.incr_prev;
    const double rhs = 0.5 * (obs.x.back() * obs.x.back() - obs.x.front() * obs.x.front() - s.incr_sq);
    const double scale = std::max({1.0, std::abs(lhs), 0.5 * s.incr_sq, 0.5 * obs.x.back() * obs.x.back()});
    ASSERT_LE(std::abs(lhs - rhs), 1e-10 * scale);
  }
}

TEST(Estimators, ClseAndLseAreLinkedExactly) {
  std::mt19937_64 gen(9);
  for (int rep = 0; rep < 10000; ++rep) {
    const auto obs = random_walk(gen, 2 + gen() % 100);
    const auto lse = lse_theta_m(obs);
    const auto clse = clse_gamma_delta(obs);
    ASSERT_FALSE(lse.diagnostics.degenerate);
    const double g = *clse.gamma, t = *lse.theta;
    ASSERT_LE(std::abs(g + t - 1.0), 1e-10 * std::max({1.0, std::abs(g), std::abs(t)}));
    ASSERT_LE(rel_gap(*clse.delta, *lse.m), 1e-10);
  }
}

TEST(Estimators, KnownDriftShiftCovariance) {
  std::mt19937_64 gen(13);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 1000; ++rep) {
    const auto obs = random_walk(gen, 2 + gen() % 100);
    const double m = z(gen);
    const auto s = series_sums(obs);
    const double shift = *lse_theta_known_m(obs, m).theta - *lse_theta_known_m(obs, 0.0).theta;
    ASSERT_LE(rel_gap(shift, m * s.prev / s.prev_sq), 1e-10);
  }
}

// With theta = 0 every estimator is O(1/n): median |theta_hat| <= 10 / n.
TEST(Estimators, ConsistentAtZeroMeanReversion) {
  SeriesBatchSpec spec;
  spec.params = {1.0, 0.0, 1.0, 0.0};
  spec.n_obs = 2000;
  spec.steps_per_unit = 8;
  const auto batch = estimator_batch(spec, 77, 0, 500, {});
  auto median_abs = [&](double EstimatorSample::*field) {
    std::vector<double> v;
    for (const auto& s : batch) v.push_back(std::abs(s.*field) / 2000.0);
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  EXPECT_LE(median_abs(&EstimatorSample::n_theta_known_m), 10.0 / 2000);
  EXPECT_LE(median_abs(&EstimatorSample::n_theta_lse), 10.0 / 2000);
  EXPECT_LE(median_abs(&EstimatorSample::n_theta_clse), 10.0 / 2000);
}
