#include "valuegap/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "valuegap/asymptotics.hpp"
#include "valuegap/csv.hpp"
#include "valuegap/decoupled.hpp"
#include "valuegap/errors.hpp"
#include "valuegap/estimators.hpp"
#include "valuegap/linalg.hpp"
#include "valuegap/linear_systems.hpp"
#include "valuegap/mrp.hpp"

namespace valuegap {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double relative(double diff, double scale) { return diff / std::max(scale, 1e-12); }

CheckResult make_check(std::string name, double discrepancy, double tolerance,
                       std::string detail = {}) {
  CheckResult c;
  c.name = std::move(name);
  c.discrepancy = discrepancy;
  c.tolerance = tolerance;
  c.passed = std::isfinite(discrepancy) && discrepancy <= tolerance;
  c.detail = std::move(detail);
  return c;
}

// --- equivalences ----------------------------------------------------------

CheckResult lstd_equals_linear_model(RngSeed seed) {
  constexpr int kCases = 100;
  Rng rng(derive_seed(seed, 101));
  double worst = 0.0;
  int compared = 0;
  int skipped = 0;
  for (std::uint64_t k = 0; compared < kCases; ++k) {
    const int d = 1 + static_cast<int>(rng.uniform() * 10.0);
    const long n = d + 5 + static_cast<long>(rng.uniform() * (1000 - d - 5));
    const MatrixXd a = random_stable_matrix(d, 0.2 + 0.7 * rng.uniform(), derive_seed(seed, 2000 + k));
    const LinearSystem sys = LinearSystem::linear(a, rng.normal_vector(d), 1.0, 0.9);
    const TransitionDataset data = simulate_linear(sys, n, derive_seed(seed, 3000 + k));
    try {
      const VectorXd mb = mb_linear(data, 0.9, DynamicsConstraint::Unconstrained).linear().beta;
      const VectorXd mf = lstd_linear(data, 0.9).linear().beta;
      worst = std::max(worst, relative((mf - mb).norm(), mb.norm()));
      ++compared;
    } catch (const UnstableModelError&) {
      ++skipped;
    }
  }
  return make_check("lstd-linear equals mb-linear", worst, 1e-8,
                    std::to_string(compared) + " datasets, " + std::to_string(skipped) +
                        " skipped with unstable fitted dynamics");
}

CheckResult lstd_equals_lifted_model(RngSeed seed) {
  constexpr int kCases = 50;
  Rng rng(derive_seed(seed, 102));
  double worst = 0.0;
  for (int k = 0; k < kCases; ++k) {
    const int d = 1 + k % 4;
    const long n = d * d + 10 + static_cast<long>(rng.uniform() * 500);
    const MatrixXd a = random_stable_matrix(d, 0.3 + 0.6 * rng.uniform(), derive_seed(seed, 4000 + k));
    const MatrixXd q = rng.normal_matrix(d, d);
    const LinearSystem sys = LinearSystem::lqr(a, q, 1.0, 0.9);
    const TransitionDataset data = simulate_linear(sys, n, derive_seed(seed, 5000 + k));
    const MatrixXd mf = lstd_quadratic(data, 0.9).quadratic().p;
    const MatrixXd mb = mb_lifted_lqr(data, 0.9).quadratic().p;
    worst = std::max(worst, relative((mf - mb).norm(), mb.norm()));
  }
  return make_check("lstd-quadratic equals mb-lifted-lqr", worst, 1e-6,
                    std::to_string(kCases) + " datasets, d in 1..4");
}

CheckResult separable_estimators_agree_single_component(RngSeed seed) {
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const DecoupledMRP inst = random_decoupled_instance(1, 3 + k % 4, 0.9, derive_seed(seed, 6000 + k));
    const TransitionDataset data = simulate_decoupled(inst, 400, derive_seed(seed, 6100 + k));
    const std::vector<int> sizes = inst.sizes();
    const VectorXd mf = lstd_separable(data, sizes, 0.9).separable().tables[0];
    const VectorXd mb = mb_decoupled(data, sizes, 0.9).separable().tables[0];
    worst = std::max(worst, relative((mf - mb).lpNorm<Eigen::Infinity>(),
                                     mb.lpNorm<Eigen::Infinity>()));
  }
  return make_check("lstd-separable equals mb-decoupled with one component", worst, 1e-8);
}

CheckResult separable_values_realizable(RngSeed seed) {
  constexpr int kCases = 20;
  Rng rng(derive_seed(seed, 103));
  double worst = 0.0;
  for (int k = 0; k < kCases; ++k) {
    const int components = 2 + k % 2;
    const int states = 3 + (k / 2) % 3;
    const std::vector<int> sizes(static_cast<std::size_t>(components), states);
    const Index joint = static_cast<Index>(joint_size(sizes));
    MatrixXd p(joint, joint);
    for (Index i = 0; i < joint; ++i) {
      for (Index j = 0; j < joint; ++j) p(i, j) = 0.05 + rng.uniform();
      p.row(i) /= p.row(i).sum();
    }
    SeparableValue v;
    for (int c = 0; c < components; ++c) v.tables.push_back(rng.normal_vector(states));
    const VectorXd target = expand_separable(v);
    const VectorXd r = reward_from_value(p, target, 0.9);
    const VectorXd realized = exact_value(TabularMRP(p, r, 0.9));
    worst = std::max(worst, (realized - target).lpNorm<Eigen::Infinity>());
  }
  return make_check("dense kernels realize separable values", worst, 1e-9,
                    std::to_string(kCases) + " cases, 9 to 125 joint states");
}

// --- asymptotics -----------------------------------------------------------

// n·E‖β̂ − β‖² estimated from `reps` trajectories of length n.
double scaled_mse(const LinearSystem& sys, DynamicsConstraint constraint, bool model_free,
                  long n, int reps, RngSeed seed) {
  const VectorXd beta = true_beta(sys.dynamics(), sys.theta(), sys.gamma());
  double total = 0.0;
  for (int r = 0; r < reps; ++r) {
    const TransitionDataset data = simulate_linear(sys, n, derive_seed(seed, static_cast<std::uint64_t>(r)));
    const VectorXd est = model_free ? lstd_linear(data, sys.gamma()).linear().beta
                                    : mb_linear(data, sys.gamma(), constraint).linear().beta;
    total += (est - beta).squaredNorm();
  }
  return static_cast<double>(n) * total / reps;
}

CheckResult monte_carlo_general(RngSeed seed) {
  const MatrixXd a = random_stable_matrix(3, 0.8, derive_seed(seed, 201));
  const LinearSystem sys = LinearSystem::linear(a, VectorXd::Ones(3), 1.0, 0.9);
  const double theory = asymptotic_mse_general(a, sys.theta(), 0.9, 1.0).value;
  const double empirical =
      scaled_mse(sys, DynamicsConstraint::Unconstrained, true, 100000, 200, derive_seed(seed, 202));
  return make_check("lstd-linear n*MSE matches the general asymptotic formula",
                    std::abs(empirical / theory - 1.0), 0.15,
                    "empirical " + csv::format_number(empirical) + ", asymptotic " +
                        csv::format_number(theory));
}

CheckResult monte_carlo_diagonal(RngSeed seed) {
  const LinearSystem sys =
      LinearSystem::diagonal(VectorXd::Constant(3, 0.8), VectorXd::Ones(3), 1.0, 0.9);
  const double theory = asymptotic_mse_diag(sys.dynamics(), sys.theta(), 0.9, 1.0).value;
  const double empirical =
      scaled_mse(sys, DynamicsConstraint::Diagonal, false, 100000, 200, derive_seed(seed, 203));
  return make_check("mb-diag n*MSE matches the diagonal asymptotic formula",
                    std::abs(empirical / theory - 1.0), 0.15,
                    "empirical " + csv::format_number(empirical) + ", asymptotic " +
                        csv::format_number(theory));
}

CheckResult gap_ratio_identity() {
  double worst = 0.0;
  for (int d = 1; d <= 50; ++d) {
    for (int li = 1; li <= 19; ++li) {
      for (int gi = 1; gi <= 19; ++gi) {
        const double lambda = 0.05 * li;
        const double gamma = 0.05 * gi;
        const MatrixXd a = lambda * MatrixXd::Identity(d, d);
        const VectorXd theta = VectorXd::Ones(d);
        const double general = asymptotic_mse_general(a, theta, gamma, 1.0).value;
        const double diag = asymptotic_mse_diag(a, theta, gamma, 1.0).value;
        const double ratio = dls_gap_ratio(d, lambda, gamma);
        worst = std::max(worst, std::abs(general / diag - ratio) / ratio);
      }
    }
  }
  return make_check("gap ratio equals the quotient of the asymptotic formulas", worst, 1e-10);
}

// --- oracles ---------------------------------------------------------------

// Unbiased rollout estimate of Σ_{t≥1} γ^t r(S_t): the chain is killed with
// probability 1 − γ before every step and undiscounted rewards are summed.
CheckResult tabular_rollouts(RngSeed seed) {
  constexpr int kRollouts = 100000;
  Rng rng(derive_seed(seed, 301));
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const int states = 2 + k % 9;
    MatrixXd p(states, states);
    for (int i = 0; i < states; ++i) {
      for (int j = 0; j < states; ++j) p(i, j) = rng.uniform() + 1e-3;
      p.row(i) /= p.row(i).sum();
    }
    const TabularMRP mrp(p, rng.normal_vector(states), 0.9);
    const VectorXd exact = exact_value(mrp);
    const int start = static_cast<int>(rng.uniform() * states);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int r = 0; r < kRollouts; ++r) {
      int s = start;
      double g = 0.0;
      while (rng.uniform() < mrp.gamma()) {
        s = rng.categorical(p.row(s));
        g += mrp.reward()(s);
      }
      sum += g;
      sum_sq += g * g;
    }
    const double mean = sum / kRollouts;
    const double se = std::sqrt((sum_sq / kRollouts - mean * mean) / kRollouts);
    worst = std::max(worst, std::abs(mean - exact(start)) / se);
  }
  return make_check("tabular exact values agree with rollouts (standard errors)", worst, 4.0);
}

CheckResult lqr_rollouts(RngSeed seed) {
  constexpr int kRollouts = 100000;
  Rng rng(derive_seed(seed, 302));
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const int d = 1 + k % 3;
    const MatrixXd a = random_stable_matrix(d, 0.7, derive_seed(seed, 3100 + k));
    const MatrixXd l = rng.normal_matrix(d, d);
    const MatrixXd q = l * l.transpose() / d;
    const double gamma = 0.8;
    const QuadraticValue value = lqr_value_matrix(a, q, gamma);
    const VectorXd x0 = rng.normal_vector(d);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int r = 0; r < kRollouts; ++r) {
      VectorXd x = x0;
      double g = x.dot(q * x);
      while (rng.uniform() < gamma) {
        x = a * x + rng.normal_vector(d);
        g += x.dot(q * x);
      }
      sum += g;
      sum_sq += g * g;
    }
    const double mean = sum / kRollouts;
    const double se = std::sqrt((sum_sq / kRollouts - mean * mean) / kRollouts);
    worst = std::max(worst, std::abs(mean - value.evaluate(x0)) / se);
  }
  return make_check("quadratic values agree with rollouts (standard errors)", worst, 4.0);
}

CheckResult kron_covariance_sampling(RngSeed seed) {
  constexpr int kDraws = 1000000;
  Rng rng(derive_seed(seed, 303));
  auto spd = [&rng] {
    const MatrixXd m = rng.normal_matrix(3, 3);
    return MatrixXd(m * m.transpose() + 0.5 * MatrixXd::Identity(3, 3));
  };
  const MatrixXd b = spd();
  const MatrixXd c = spd();
  const VectorXd theta = rng.normal_vector(3);
  const MatrixXd lb = b.llt().matrixL();
  const MatrixXd lc = c.llt().matrixL();
  // M = L_B Z L_Cᵀ has Cov(M_ij, M_kl) = B_ik C_jl.
  const VectorXd w = lc.transpose() * theta;
  Eigen::Matrix3d second = Eigen::Matrix3d::Zero();
  Eigen::Vector3d first = Eigen::Vector3d::Zero();
  for (int k = 0; k < kDraws; ++k) {
    const Eigen::Vector3d m_theta = lb * (rng.normal_matrix(3, 3) * w);
    first += m_theta;
    second += m_theta * m_theta.transpose();
  }
  first /= kDraws;
  const MatrixXd cov = (second - kDraws * first * first.transpose()) / (kDraws - 1);
  const MatrixXd expected = kron_cov_contract(b, c, theta);
  return make_check("covariance of M*theta under Kronecker covariance",
                    (cov - expected).norm() / expected.norm(), 0.02);
}

CheckResult lyapunov_residuals(RngSeed seed) {
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const int d = 1 + k % 6;
    const MatrixXd a = random_stable_matrix(d, 0.95, derive_seed(seed, 3300 + k));
    const MatrixXd p = stationary_covariance(a, 1.0);
    const MatrixXd id = MatrixXd::Identity(d, d);
    worst = std::max(worst, (a * p * a.transpose() - p + id).norm() / id.norm());
  }
  return make_check("stationary covariance solves its Lyapunov equation", worst, 1e-10);
}

}  // namespace

std::optional<VerifySuite> parse_verify_suite(std::string_view name) {
  if (name == "equivalences") return VerifySuite::Equivalences;
  if (name == "asymptotics") return VerifySuite::Asymptotics;
  if (name == "oracles") return VerifySuite::Oracles;
  if (name == "all") return VerifySuite::All;
  return std::nullopt;
}

std::vector<CheckResult> run_verify(VerifySuite suite, RngSeed seed) {
  std::vector<CheckResult> out;
  const bool all = suite == VerifySuite::All;
  if (all || suite == VerifySuite::Equivalences) {
    out.push_back(lstd_equals_linear_model(seed));
    out.push_back(lstd_equals_lifted_model(seed));
    out.push_back(separable_estimators_agree_single_component(seed));
    out.push_back(separable_values_realizable(seed));
  }
  if (all || suite == VerifySuite::Asymptotics) {
    out.push_back(gap_ratio_identity());
    out.push_back(monte_carlo_general(seed));
    out.push_back(monte_carlo_diagonal(seed));
  }
  if (all || suite == VerifySuite::Oracles) {
    out.push_back(tabular_rollouts(seed));
    out.push_back(lqr_rollouts(seed));
    out.push_back(kron_covariance_sampling(seed));
    out.push_back(lyapunov_residuals(seed));
  }
  return out;
}

}  // namespace valuegap
