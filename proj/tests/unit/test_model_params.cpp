#include <gtest/gtest.h>

#include "affinelab/model_params.hpp"
#include "affinelab/rng.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace affinelab;

namespace {

AdmissibleParams diffusion_params(double a, double m) {
  AdmissibleParams p;
  p.a_mat = Eigen::MatrixXd::Zero(2, 2);
  p.alpha = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  p.b_vec = Eigen::Vector2d(a, m);
  p.beta = Eigen::MatrixXd::Zero(2, 2);
  return p;
}

JumpMeasure random_measure(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::normal_distribution<double> z;
  DiscreteJumpLaw law;
  const int k = 1 + static_cast<int>(gen() % 4);
  for (int i = 0; i < k; ++i) law.points.push_back({{u(gen) + 0.01, z(gen)}, 1.0 / k});
  JumpMeasure meas;
  meas.rate = u(gen);
  meas.law = law;
  return meas;
}

}  // namespace

TEST(ConditionC, Examples) {
  EXPECT_TRUE(validate_condition_c({1, 0, 2, 0}, {0.5, 0}).ok());
  EXPECT_TRUE(validate_condition_c({1, 0, 2, 1}, {0.5, 0}).has("theta nonzero"));
  EXPECT_TRUE(validate_condition_c({0, 0, 2, 0}, {0.5, 0}).has("a not strictly positive"));
  EXPECT_TRUE(validate_condition_c({1, 0.5, 2, 0}, {0.5, 0}).has("b nonzero"));
  EXPECT_TRUE(validate_condition_c({1, 0, 2, 0}, {-0.5, 0}).has("y0 negative"));
}

TEST(Criticality, Examples) {
  EXPECT_EQ(classify_criticality(1, 1), CriticalityClass::Subcritical);
  EXPECT_EQ(classify_criticality(0, 2), CriticalityClass::Critical);
  EXPECT_EQ(classify_criticality(-1, 5), CriticalityClass::Supercritical);
  EXPECT_EQ(classify_criticality(3, 0), CriticalityClass::Critical);
}

TEST(Criticality, PartitionsThePlane) {
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<int> pick(0, 3);
  std::normal_distribution<double> z;
  for (int i = 0; i < 10000; ++i) {
    // Hit the axes often: zero is where the classes meet.
    const double b = pick(gen) == 0 ? 0.0 : z(gen);
    const double theta = pick(gen) == 0 ? 0.0 : z(gen);
    const bool sub = b > 0 && theta > 0;
    const bool crit = (b == 0 && theta >= 0) || (b >= 0 && theta == 0);
    const bool super = b < 0 || theta < 0;
    ASSERT_EQ(sub + crit + super, 1) << b << " " << theta;
    const auto c = classify_criticality(b, theta);
    ASSERT_EQ(c == CriticalityClass::Subcritical, sub);
    ASSERT_EQ(c == CriticalityClass::Critical, crit);
    ASSERT_EQ(c == CriticalityClass::Supercritical, super);
  }
}

TEST(Admissible, DiffusionParametersAreAdmissible) {
  EXPECT_TRUE(validate_admissible(diffusion_params(1.0, 2.0)).ok());
}

TEST(Admissible, NamedViolations) {
  auto p = diffusion_params(1.0, 2.0);
  p.a_mat(0, 0) = 1.0;
  EXPECT_TRUE(validate_admissible(p).has("(i) a_{1,1}=0"));

  p = diffusion_params(1.0, 2.0);
  p.beta(0, 1) = 1.0;
  EXPECT_TRUE(validate_admissible(p).has("(iv) β_{1,j}=0"));

  p = diffusion_params(-1.0, 2.0);
  EXPECT_TRUE(validate_admissible(p).has("(iii) b_1>=0"));

  p = diffusion_params(1.0, 2.0);
  p.alpha(1, 1) = -1.0;
  EXPECT_TRUE(validate_admissible(p).has("(ii) alpha positive semidefinite"));

  p = diffusion_params(1.0, 2.0);
  p.a_mat(1, 0) = 0.3;
  EXPECT_TRUE(validate_admissible(p).has("(i) a symmetric"));

  p = diffusion_params(1.0, 2.0);
  p.mu_meas = JumpMeasure::point_mass(1.0, {0.0, 0.0});
  EXPECT_TRUE(validate_admissible(p).has("(vi) mu"));

  p = diffusion_params(1.0, 2.0);
  p.m_meas = JumpMeasure::point_mass(1.0, {-1.0, 0.0});
  EXPECT_TRUE(validate_admissible(p).has("(v) m"));
}

TEST(Admissible, DimensionMismatchThrows) {
  auto p = diffusion_params(1.0, 2.0);
  p.b_vec = Eigen::Vector3d(1, 2, 3);
  EXPECT_THROW(validate_admissible(p), std::invalid_argument);
}

TEST(Admissible, PsdToleranceIsFixed) {
  auto p = diffusion_params(1.0, 2.0);
  p.alpha(1, 1) = -5e-11;
  EXPECT_FALSE(validate_admissible(p).has("(ii)"));
  p.alpha(1, 1) = -5e-10;
  EXPECT_TRUE(validate_admissible(p).has("(ii)"));
}

TEST(JumpMeasureValidation, ProbabilitiesAndRate) {
  JumpMeasure meas;
  meas.rate = 1.0;
  meas.law = DiscreteJumpLaw{{{{1.0}, 0.5}, {{2.0}, 0.4}}};
  EXPECT_TRUE(validate_jump_measure(meas, 1, "n").has("sum to 1"));
  meas.rate = -1.0;
  EXPECT_TRUE(validate_jump_measure(meas, 1, "n").has("rate"));
}

TEST(LimitParameters, Examples) {
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2, 2);
  Eigen::MatrixXd alpha = zero;
  alpha(0, 0) = 0.1;
  const auto out = limit_parameters(zero, alpha, Eigen::Vector2d(0.3, 0.0), zero, JumpMeasure::point_mass(1.0, {1.0, 0.0}),
                                    JumpMeasure::point_mass(2.0, {0.5, 0.0}));
  EXPECT_DOUBLE_EQ(out.alpha(0, 0), 0.1 + 0.5 * 2.0 * 0.25);
  EXPECT_DOUBLE_EQ(out.b_vec(0), 1.3);
  EXPECT_EQ(out.b_vec(1), 0.0);
  EXPECT_TRUE(out.m_meas.empty());
  EXPECT_TRUE(out.mu_meas.empty());

  const auto plain = limit_parameters(zero, alpha, Eigen::Vector2d(0.3, 0.7), zero, JumpMeasure::none(),
                                      JumpMeasure::none());
  EXPECT_EQ(plain.alpha, alpha);
  EXPECT_EQ(plain.b_vec, Eigen::Vector2d(0.3, 0.7));
}

TEST(LimitParameters, OutputIsAdmissibleAndAlphaGrowsPsd) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 200; ++rep) {
    auto p = diffusion_params(std::abs(z(gen)), z(gen));
    p.m_meas = random_measure(gen);
    p.mu_meas = random_measure(gen);
    ASSERT_TRUE(validate_admissible(p).ok());
    const auto out = limit_parameters(p.a_mat, p.alpha, p.b_vec, p.beta, p.m_meas, p.mu_meas);
    EXPECT_TRUE(validate_admissible(out).ok());
    const Eigen::MatrixXd gap = out.alpha - p.alpha;
    for (int k = 0; k < 100; ++k) {
      const Eigen::Vector2d v(z(gen), z(gen));
      EXPECT_GE(v.dot(gap * v), -1e-12);
    }
  }
}

TEST(LimitParameters, FamilyUsesLargestScaleNormalisation) {
  std::vector<ScaledFamilyMember> family;
  for (double theta : {4.0, 64.0, 16.0}) {
    auto p = diffusion_params(2.0, 1.0);
    p.beta = Eigen::MatrixXd::Identity(2, 2) * (-1.0 / theta);
    p.a_mat = Eigen::MatrixXd::Zero(2, 2);
    p.a_mat(1, 1) = 3.0 * theta;
    family.push_back({theta, p});
  }
  const auto out = limit_parameters(std::span<const ScaledFamilyMember>(family));
  EXPECT_DOUBLE_EQ(out.a_mat(1, 1), 3.0);
  EXPECT_DOUBLE_EQ(out.beta(0, 0), -1.0);
  EXPECT_THROW(limit_parameters(std::span<const ScaledFamilyMember>()), std::invalid_argument);
}

TEST(JumpMeasure, ExponentialMomentsAndSampling) {
  JumpMeasure meas;
  meas.rate = 2.0;
  meas.law = ExponentialJumpLaw{0.5};
  EXPECT_DOUBLE_EQ(meas.first_moment(1)(0), 1.0);
  EXPECT_DOUBLE_EQ(meas.second_moment(1)(0, 0), 2.0 * 2.0 * 0.25);
  // Quadrature oracle for int min(u, u^2) rate * exp density.
  double q = 0.0;
  const int n = 200000;
  const double upper = 40.0, h = upper / n;
  for (int i = 0; i < n; ++i) {
    const double u = (i + 0.5) * h;
    q += std::min(u, u * u) * std::exp(-u / 0.5) / 0.5 * h;
  }
  EXPECT_NEAR(meas.condition_vi_integral(), 2.0 * q, 1e-8);

  RngStream rng(1, 2);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) sum += meas.sample_size(rng);
  EXPECT_NEAR(sum / 100000, 0.5, 4.0 * 0.5 / std::sqrt(100000.0));
}

TEST(JumpMeasure, DiscreteSamplingFrequencies) {
  JumpMeasure meas;
  meas.rate = 1.0;
  meas.law = DiscreteJumpLaw{{{{1.0}, 0.25}, {{3.0}, 0.75}}};
  RngStream rng(5, 0);
  int threes = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) threes += meas.sample_size(rng) == 3.0;
  EXPECT_NEAR(threes / double(n), 0.75, 4.0 * std::sqrt(0.75 * 0.25 / n));
}

TEST(Cbi, ValidationAndMoments) {
  CbiParams p;
  p.n_meas = JumpMeasure::point_mass(1.0, {2.0});
  p.p_meas = JumpMeasure::point_mass(3.0, {0.5});
  EXPECT_TRUE(validate_cbi(p).ok());
  EXPECT_DOUBLE_EQ(p.immigration_jump_mean(), 2.0);
  EXPECT_DOUBLE_EQ(p.branching_second_moment(), 0.75);
  p.p_meas.rate = -1.0;
  EXPECT_FALSE(validate_cbi(p).ok());
}
