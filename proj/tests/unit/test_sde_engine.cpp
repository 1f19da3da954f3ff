#include <gtest/gtest.h>

#include "affinelab/kernels.hpp"
#include "affinelab/sde_engine.hpp"
#include "affinelab/stats_kit.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

using namespace affinelab;

namespace {

template <class Draw>
std::vector<double> draws(std::size_t n, Draw&& draw) {
  std::vector<double> out(n);
  for (std::size_t r = 0; r < n; ++r) {
    RngStream rng(2024, r);
    out[r] = draw(rng);
  }
  return out;
}

// max_k |X_k - mild-form value| where the mild form reuses the normals
// recovered from the Euler increments.
double mild_form_discrepancy(const ModelParams& p, const SamplePath& path) {
  const double dt = path.grid.dt();
  double noise = 0.0;  // sum_j e^{theta t_j} sqrt(Y_j dt) z_j
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < path.x.size(); ++k) {
    const double xk = path.x[k];
    const double sd = std::sqrt(path.y[k] * dt);
    const double z = (path.x[k + 1] - xk - (p.m - p.theta * xk) * dt) / sd;
    noise += std::exp(p.theta * path.grid.time(k)) * sd * z;
    const double t = path.grid.time(k + 1);
    const double drift = p.theta == 0.0 ? p.m * t : p.m * std::expm1(p.theta * t) / p.theta;
    const double mild = std::exp(-p.theta * t) * (path.x[0] + drift + noise);
    worst = std::max(worst, std::abs(path.x[k + 1] - mild));
  }
  return worst;
}

}  // namespace

TEST(CirTransition, ZeroTimeIsIdentity) {
  RngStream rng(1, 1);
  EXPECT_EQ(cir_transition_sample(1.7, 1.0, 0.0, 0.0, rng), 1.7);
}

TEST(CirTransition, RejectsNonpositiveDrift) {
  RngStream rng(1, 1);
  try {
    cir_transition_sample(1.0, 0.0, 0.0, 1.0, rng);
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "immigration drift must be positive");
  }
}

TEST(CirTransition, MeanFromUnitStart) {
  const auto v = draws(100000, [](RngStream& r) { return cir_transition_sample(1.0, 1.0, 0.0, 2.0, r); });
  const auto s = moment_summary(v);
  EXPECT_LE(std::abs(s.mean - 3.0), 4.0 * s.se_mean);
}

TEST(CirTransition, VarianceFromZero) {
  // d E(Y^2)/dt = (2a + 1) E Y gives Var Y_t = a t^2 / 2 from Y_0 = 0.
  const auto v = draws(100000, [](RngStream& r) { return cir_transition_sample(0.0, 2.0, 0.0, 1.0, r); });
  const auto s = moment_summary(v);
  EXPECT_LE(std::abs(s.variance - 1.0), 4.0 * s.se_variance);
}

TEST(CirTransition, MeanAndVarianceWithMeanReversion) {
  // Var Y_t = y0 (e^{-bt} - e^{-2bt}) / b + a (1 - e^{-bt})^2 / (2 b^2) for unit volatility.
  for (double b : {0.7, -0.3}) {
    const double y0 = 0.5, a = 1.5, t = 1.3;
    const auto v = draws(100000, [&](RngStream& r) { return cir_transition_sample(y0, a, b, t, r); });
    const auto s = moment_summary(v);
    const double e = std::exp(-b * t);
    const double mean = y0 * e + a * (1.0 - e) / b;
    const double var = y0 * (e - e * e) / b + a * (1.0 - e) * (1.0 - e) / (2.0 * b * b);
    EXPECT_LE(std::abs(s.mean - mean), 4.0 * s.se_mean) << b;
    EXPECT_LE(std::abs(s.variance - var), 4.0 * s.se_variance) << b;
  }
}

TEST(CirTransition, ScaledVolatility) {
  // sigma2 * CIR(y0/sigma2, a/sigma2) has mean y0 + a t and variance sigma2 (y0 t + a t^2 / 2) at b = 0.
  const double sigma2 = 0.7, y0 = 0.4, a = 1.5, t = 2.0;
  const auto v = draws(100000, [&](RngStream& r) { return cir_transition_sample_scaled(y0, a, 0.0, sigma2, t, r); });
  const auto s = moment_summary(v);
  EXPECT_LE(std::abs(s.mean - (y0 + a * t)), 4.0 * s.se_mean);
  EXPECT_LE(std::abs(s.variance - sigma2 * (y0 * t + 0.5 * a * t * t)), 4.0 * s.se_variance);
  RngStream rng(0, 0);
  EXPECT_EQ(cir_transition_sample_scaled(1.0, 2.0, 0.0, 0.0, 0.5, rng), 2.0);
}

TEST(NoncentralChi2, SmallDegreesOfFreedomUsePoissonMixture) {
  const double df = 0.6, nc = 2.5;
  const auto v = draws(100000, [&](RngStream& r) { return noncentral_chi2_sample(df, nc, r); });
  const auto s = moment_summary(v);
  EXPECT_LE(std::abs(s.mean - (df + nc)), 4.0 * s.se_mean);
  EXPECT_LE(std::abs(s.variance - 2.0 * (df + 2.0 * nc)), 4.0 * s.se_variance);
}

TEST(JointPath, DegenerateDiffusionIsFrozen) {
  JointPathOptions opts;
  opts.allow_zero_immigration = true;
  RngStream rng(3, 3);
  const auto path = simulate_joint_path({0.0, 0.0, 0.0, 0.0}, {0.0, 2.5}, {0.0, 4.0, 64}, rng, opts);
  for (std::size_t k = 0; k < path.y.size(); ++k) {
    ASSERT_EQ(path.y[k], 0.0);
    ASSERT_EQ(path.x[k], 2.5);
  }
  RngStream rng2(3, 3);
  EXPECT_THROW(simulate_joint_path({0.0, 0.0, 0.0, 0.0}, {0.0, 2.5}, {0.0, 4.0, 64}, rng2), std::invalid_argument);
}

TEST(JointPath, MomentsAtTimeThree) {
  const TimeGrid grid{0.0, 3.0, 3 * 128};
  const auto ends = terminal_state_batch({1.0, 0.0, 2.0, 0.0}, {1.0, 0.0}, grid, {}, 99, 0, 100000, {});
  std::vector<double> xs;
  for (const auto& e : ends) xs.push_back(e.x);
  const auto s = moment_summary(xs);
  EXPECT_LE(std::abs(s.mean - 6.0), 4.0 * s.se_mean);
  EXPECT_LE(std::abs(s.variance - 7.5), 4.0 * s.se_variance);
}

TEST(JointPath, NonnegativeForRandomParameters) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> a(1e-3, 5.0), b(-2.0, 4.0), y0(0.0, 3.0);
  for (std::uint64_t rep = 0; rep < 1000; ++rep) {
    RngStream rng(6, rep);
    const auto path = simulate_joint_path({a(gen), b(gen), 0.3, 0.5}, {y0(gen), 0.0}, {0.0, 2.0, 50}, rng);
    for (double y : path.y) ASSERT_GE(y, 0.0);
  }
}

TEST(JointPath, DeterministicPerStream) {
  RngStream r1(8, 8), r2(8, 8);
  const ModelParams p{1.0, 0.2, 1.0, 0.1};
  const auto a = simulate_joint_path(p, {0.5, 0.0}, {0.0, 5.0, 40}, r1);
  const auto b = simulate_joint_path(p, {0.5, 0.0}, {0.0, 5.0, 40}, r2);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.x, b.x);
}

TEST(JointPath, StreamingObservationsMatchStoredPath) {
  const ModelParams p{1.3, 0.0, 0.8, 0.0};
  for (auto rule : {VarianceRule::LeftEndpoint, VarianceRule::Trapezoid}) {
    JointPathOptions opts;
    opts.variance = rule;
    RngStream r1(4, 12), r2(4, 12);
    const auto path = simulate_joint_path(p, {0.2, 1.0}, {0.0, 50.0, 50 * 8}, r1, opts);
    const auto obs = simulate_observations(p, {0.2, 1.0}, 50, 8, r2, opts);
    EXPECT_EQ(subsample_integer_times(path).x, obs.x);
  }
}

TEST(JointPath, MildFormIsTheSchemeWithoutReversion) {
  const ModelParams p{1.0, 0.0, 1.5, 0.0};
  RngStream rng(10, 0);
  const auto path = simulate_joint_path(p, {1.0, 2.0}, {0.0, 1.0, 128}, rng);
  EXPECT_LE(mild_form_discrepancy(p, path), 1e-12);
}

TEST(JointPath, MildFormDiscrepancyIsFirstOrder) {
  const ModelParams p{1.0, 0.0, 5.0, 1.0};
  RngStream r1(10, 1), r2(10, 1);
  const auto coarse = simulate_joint_path(p, {1.0, 100.0}, {0.0, 1.0, 64}, r1);
  const auto fine = simulate_joint_path(p, {1.0, 100.0}, {0.0, 1.0, 128}, r2);
  const double ratio = mild_form_discrepancy(p, coarse) / mild_form_discrepancy(p, fine);
  EXPECT_GE(ratio, 1.5);
  EXPECT_LE(ratio, 3.0);
}

TEST(JointPath, HalvingTheStepBarelyMovesTheLaw) {
  const ModelParams p{1.0, 0.0, 1.0, 0.0};
  auto x1 = [&](std::size_t steps, std::uint64_t arm) {
    const auto ends = terminal_state_batch(p, {0.0, 0.0}, {0.0, 1.0, steps}, {}, 5, arm, 20000, {});
    std::vector<double> xs;
    for (const auto& e : ends) xs.push_back(e.x);
    return xs;
  };
  EXPECT_LE(ks_two_sample(x1(1024, 0), x1(2048, 1)), 0.02);
}

TEST(Subsample, Examples) {
  SamplePath path;
  path.grid = {0.0, 2.0, 4};
  path.x = {0, 1, 2, 3, 4};
  path.y.assign(5, 0.0);
  EXPECT_EQ(subsample_integer_times(path).x, (std::vector<double>{0, 2, 4}));

  SamplePath one;
  one.grid = {0.0, 1.0, 1};
  one.x = {5, 7};
  one.y = {0, 0};
  EXPECT_EQ(subsample_integer_times(one).x, (std::vector<double>{5, 7}));

  SamplePath bad;
  bad.grid = {0.0, 2.0, 3};
  bad.x = {0, 1, 2, 3};
  bad.y.assign(4, 0.0);
  EXPECT_THROW(subsample_integer_times(bad), std::invalid_argument);
  bad.grid = {0.0, 1.5, 3};
  EXPECT_THROW(subsample_integer_times(bad), std::invalid_argument);
}

TEST(TimeGrid, Validation) {
  EXPECT_THROW((TimeGrid{1.0, 1.0, 4}.validate()), std::invalid_argument);
  EXPECT_THROW((TimeGrid{0.0, 1.0, 0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((TimeGrid{0.0, 1.0, 1}.validate()));
  EXPECT_DOUBLE_EQ((TimeGrid{1.0, 3.0, 4}.time(2)), 2.0);
}

TEST(CbiPath, DeterministicDrift) {
  CbiParams p;
  p.b_imm = 1.0;
  RngStream rng(1, 0);
  const auto path = simulate_cbi_path(p, 0.0, {0.0, 2.0, 128}, rng);
  EXPECT_DOUBLE_EQ(path.y.back(), 2.0);
  EXPECT_TRUE(path.x.empty());
}

TEST(CbiPath, ImmigrationJumpMean) {
  CbiParams p;
  p.n_meas = JumpMeasure::point_mass(1.0, {1.0});
  const double t = 2.0;
  const auto v = draws(100000, [&](RngStream& r) { return simulate_cbi_path(p, 0.5, {0.0, t, 32}, r).y.back(); });
  const auto s = moment_summary(v);
  EXPECT_LE(std::abs(s.mean - (0.5 + t)), 4.0 * s.se_mean);
}

TEST(CbiPath, CompensatedBranchingIsAMartingale) {
  CbiParams p;
  p.p_meas = JumpMeasure::point_mass(1.0, {1.0});
  const auto v = draws(100000, [&](RngStream& r) { return simulate_cbi_path(p, 1.0, {0.0, 1.0, 64}, r).y.back(); });
  const auto s = moment_summary(v);
  EXPECT_LE(std::abs(s.mean - 1.0), 4.0 * s.se_mean);
}

TEST(CbiPath, RejectsNegativeRates) {
  CbiParams p;
  p.p_meas = JumpMeasure::point_mass(-1.0, {1.0});
  RngStream rng(1, 0);
  EXPECT_THROW(simulate_cbi_path(p, 0.0, {0.0, 1.0, 8}, rng), std::invalid_argument);
}

TEST(PathCsv, HeadersAndRoundTrip) {
  RngStream rng(2, 2);
  const auto path = simulate_joint_path({1.0, 0.0, 1.0, 0.0}, {0.3, 0.0}, {0.0, 3.0, 6}, rng);
  std::ostringstream out;
  write_path_csv(out, path);
  EXPECT_EQ(out.str().substr(0, 6), "t,Y,X\n");

  const auto obs = subsample_integer_times(path);
  std::ostringstream csv;
  write_observations_csv(csv, obs);
  EXPECT_EQ(csv.str().substr(0, 4), "i,X\n");
  std::istringstream in(csv.str());
  EXPECT_EQ(read_observations_csv(in).x, obs.x);

  std::istringstream bad("j,X\n0,1\n");
  EXPECT_THROW(read_observations_csv(bad), std::runtime_error);

  SamplePath ypath;
  ypath.grid = {0.0, 1.0, 1};
  ypath.y = {0.0, 1.0};
  std::ostringstream yout;
  write_path_csv(yout, ypath);
  EXPECT_EQ(yout.str(), "t,Y\n0,0\n1,1\n");
}
