#include "affinelab/model_params.hpp"

#include "affinelab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace affinelab {

namespace {

constexpr double kPsdTolerance = -1e-10;
constexpr double kSymmetryTolerance = 1e-10;
constexpr double kProbabilityTolerance = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

bool is_symmetric(const Eigen::MatrixXd& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTolerance * scale;
}

double head_norm_term(const std::vector<double>& xi) {
  double tail_sq = 0.0;
  for (std::size_t i = 1; i < xi.size(); ++i) tail_sq += xi[i] * xi[i];
  const double tail = std::sqrt(tail_sq);
  return xi.front() + std::min(tail, tail_sq);
}

double full_norm_term(const std::vector<double>& xi) {
  double sq = 0.0;
  for (double v : xi) sq += v * v;
  return std::min(std::sqrt(sq), sq);
}

}  // namespace

bool ValidationReport::has(const std::string& fragment) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const std::string& v) { return v.find(fragment) != std::string::npos; });
}

JumpMeasure JumpMeasure::point_mass(double rate, std::vector<double> xi) {
  JumpMeasure meas;
  meas.rate = rate;
  meas.law = DiscreteJumpLaw{{JumpPoint{std::move(xi), 1.0}}};
  return meas;
}

bool JumpMeasure::empty() const {
  if (rate == 0.0) return true;
  if (const auto* d = std::get_if<DiscreteJumpLaw>(&law)) return d->points.empty();
  return false;
}

Eigen::VectorXd JumpMeasure::first_moment(Eigen::Index dim) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
  if (empty()) return out;
  std::visit(Overloaded{[&](const DiscreteJumpLaw& d) {
                          for (const auto& p : d.points)
                            for (Eigen::Index i = 0; i < dim && i < static_cast<Eigen::Index>(p.xi.size()); ++i)
                              out(i) += p.prob * p.xi[static_cast<std::size_t>(i)];
                        },
                        [&](const ExponentialJumpLaw& e) {
                          if (dim > 0) out(0) = e.mean;
                        }},
             law);
  return rate * out;
}

Eigen::MatrixXd JumpMeasure::second_moment(Eigen::Index dim) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  if (empty()) return out;
  std::visit(Overloaded{[&](const DiscreteJumpLaw& d) {
                          for (const auto& p : d.points) {
                            Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
                            for (Eigen::Index i = 0; i < dim && i < static_cast<Eigen::Index>(p.xi.size()); ++i)
                              v(i) = p.xi[static_cast<std::size_t>(i)];
                            out += p.prob * v * v.transpose();
                          }
                        },
                        [&](const ExponentialJumpLaw& e) {
                          if (dim > 0) out(0, 0) = 2.0 * e.mean * e.mean;
                        }},
             law);
  return rate * out;
}

double JumpMeasure::condition_v_integral() const {
  if (empty()) return 0.0;
  return std::visit(Overloaded{[&](const DiscreteJumpLaw& d) {
                                 double s = 0.0;
                                 for (const auto& p : d.points) s += p.prob * head_norm_term(p.xi);
                                 return rate * s;
                               },
                               [&](const ExponentialJumpLaw& e) { return rate * e.mean; }},
                    law);
}

double JumpMeasure::condition_vi_integral() const {
  if (empty()) return 0.0;
  return std::visit(Overloaded{[&](const DiscreteJumpLaw& d) {
                                 double s = 0.0;
                                 for (const auto& p : d.points) s += p.prob * full_norm_term(p.xi);
                                 return rate * s;
                               },
                               [&](const ExponentialJumpLaw& e) {
                                 // E min(U, U^2) for U ~ Exp(mean mu):
                                 // int_0^1 u^2 f + int_1^inf u f.
                                 const double mu = e.mean;
                                 const double tail = std::exp(-1.0 / mu);
                                 const double below = 2.0 * mu * mu - tail * (1.0 + 2.0 * mu + 2.0 * mu * mu);
                                 const double above = tail * (1.0 + mu);
                                 return rate * (below + above);
                               }},
                    law);
}

double JumpMeasure::sample_size(RngStream& rng) const {
  return std::visit(Overloaded{[&](const DiscreteJumpLaw& d) {
                                 const double u = rng.uniform();
                                 double acc = 0.0;
                                 for (const auto& p : d.points) {
                                   acc += p.prob;
                                   if (u < acc) return p.xi.front();
                                 }
                                 return d.points.back().xi.front();
                               },
                               [&](const ExponentialJumpLaw& e) { return -e.mean * std::log(rng.uniform()); }},
                    law);
}

ValidationReport validate_jump_measure(const JumpMeasure& meas, Eigen::Index dim, const std::string& name) {
  ValidationReport report;
  if (!(meas.rate >= 0.0) || !std::isfinite(meas.rate))
    report.violations.push_back(name + ": rate must be finite and nonnegative");
  std::visit(Overloaded{[&](const DiscreteJumpLaw& d) {
                          if (meas.rate > 0.0 && d.points.empty())
                            report.violations.push_back(name + ": positive rate with empty jump law");
                          double total = 0.0;
                          for (const auto& p : d.points) {
                            total += p.prob;
                            if (!(p.prob >= 0.0)) report.violations.push_back(name + ": negative probability");
                            if (static_cast<Eigen::Index>(p.xi.size()) != dim) {
                              report.violations.push_back(name + ": support point has wrong dimension");
                              continue;
                            }
                            if (p.xi.front() < 0.0)
                              report.violations.push_back(name + ": support point outside R_+ x R^d");
                            if (std::all_of(p.xi.begin(), p.xi.end(), [](double v) { return v == 0.0; }))
                              report.violations.push_back(name + ": support point at the origin");
                          }
                          if (!d.points.empty() && std::abs(total - 1.0) > kProbabilityTolerance)
                            report.violations.push_back(name + ": probabilities do not sum to 1");
                        },
                        [&](const ExponentialJumpLaw& e) {
                          if (dim != 1) report.violations.push_back(name + ": exponential law is one-dimensional");
                          if (!(e.mean > 0.0)) report.violations.push_back(name + ": exponential mean must be positive");
                        }},
             meas.law);
  return report;
}

double CbiParams::immigration_jump_mean() const { return n_meas.first_moment(1)(0); }

double CbiParams::branching_second_moment() const { return p_meas.second_moment(1)(0, 0); }

ValidationReport validate_cbi(const CbiParams& p) {
  ValidationReport report;
  if (!(p.alpha >= 0.0)) report.violations.push_back("alpha must be nonnegative");
  if (!(p.b_imm >= 0.0)) report.violations.push_back("b_imm must be nonnegative");
  if (!std::isfinite(p.beta)) report.violations.push_back("beta must be finite");
  for (auto& v : validate_jump_measure(p.n_meas, 1, "n").violations) report.violations.push_back(v);
  for (auto& v : validate_jump_measure(p.p_meas, 1, "p").violations) report.violations.push_back(v);
  return report;
}

std::string to_string(CriticalityClass c) {
  switch (c) {
    case CriticalityClass::Subcritical: return "subcritical";
    case CriticalityClass::Critical: return "critical";
    case CriticalityClass::Supercritical: return "supercritical";
  }
  return "unknown";
}

ValidationReport validate_condition_c(const ModelParams& params, const InitialLaw& init) {
  ValidationReport report;
  if (params.b != 0.0) report.violations.push_back("b nonzero");
  if (params.theta != 0.0) report.violations.push_back("theta nonzero");
  if (!(params.a > 0.0)) report.violations.push_back("a not strictly positive");
  if (!(init.y0 >= 0.0)) report.violations.push_back("y0 negative");
  if (!std::isfinite(init.y0) || !std::isfinite(init.x0))
    report.violations.push_back("initial state not finite");
  return report;
}

CriticalityClass classify_criticality(double b, double theta) {
  if (b < 0.0 || theta < 0.0) return CriticalityClass::Supercritical;
  if (b > 0.0 && theta > 0.0) return CriticalityClass::Subcritical;
  return CriticalityClass::Critical;
}

double min_symmetric_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

ValidationReport validate_admissible(const AdmissibleParams& p) {
  const Eigen::Index n = p.a_mat.rows();
  if (n < 1 || p.a_mat.cols() != n || p.alpha.rows() != n || p.alpha.cols() != n || p.beta.rows() != n ||
      p.beta.cols() != n || p.b_vec.size() != n)
    throw std::invalid_argument("admissible parameters: inconsistent dimensions");

  ValidationReport report;
  auto& v = report.violations;

  if (!is_symmetric(p.a_mat)) v.push_back("(i) a symmetric");
  if (min_symmetric_eigenvalue(p.a_mat) < kPsdTolerance) v.push_back("(i) a positive semidefinite");
  if (p.a_mat(0, 0) != 0.0) v.push_back("(i) a_{1,1}=0");

  if (!is_symmetric(p.alpha)) v.push_back("(ii) alpha symmetric");
  if (min_symmetric_eigenvalue(p.alpha) < kPsdTolerance) v.push_back("(ii) alpha positive semidefinite");

  if (!(p.b_vec(0) >= 0.0)) v.push_back("(iii) b_1>=0");

  for (Eigen::Index j = 1; j < n; ++j) {
    if (p.beta(0, j) != 0.0) {
      v.push_back("(iv) β_{1,j}=0");
      break;
    }
  }

  for (auto& s : validate_jump_measure(p.m_meas, n, "(v) m").violations) v.push_back(s);
  if (!std::isfinite(p.m_meas.condition_v_integral())) v.push_back("(v) m moment condition");
  for (auto& s : validate_jump_measure(p.mu_meas, n, "(vi) mu").violations) v.push_back(s);
  if (!std::isfinite(p.mu_meas.condition_vi_integral())) v.push_back("(vi) mu moment condition");

  return report;
}

AdmissibleParams limit_parameters(const Eigen::MatrixXd& a_mat, const Eigen::MatrixXd& alpha,
                                  const Eigen::VectorXd& b_vec, const Eigen::MatrixXd& beta,
                                  const JumpMeasure& m_meas, const JumpMeasure& mu_meas) {
  const Eigen::Index n = a_mat.rows();
  AdmissibleParams out;
  out.a_mat = a_mat;
  Eigen::MatrixXd alpha_bar = alpha + 0.5 * mu_meas.second_moment(n);
  out.alpha = 0.5 * (alpha_bar + alpha_bar.transpose());
  out.b_vec = b_vec;
  out.b_vec(0) += m_meas.first_moment(n)(0);
  out.beta = beta;
  return out;
}

AdmissibleParams limit_parameters(std::span<const ScaledFamilyMember> family) {
  if (family.empty()) throw std::invalid_argument("limit_parameters: empty family");
  const auto& last = *std::max_element(family.begin(), family.end(), [](const auto& l, const auto& r) {
    return l.theta < r.theta;
  });
  const auto& p = last.params;
  return limit_parameters(p.a_mat / last.theta, p.alpha, p.b_vec, last.theta * p.beta, p.m_meas, p.mu_meas);
}

}  // namespace affinelab
