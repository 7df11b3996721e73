#include "valuegap/mrp.hpp"

#include <cmath>
#include <string>

#include "valuegap/errors.hpp"

namespace valuegap {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void validate_stochastic(const MatrixXd& p, double tolerance) {
  if (p.rows() == 0 || p.rows() != p.cols()) {
    throw ValidationError("transition matrix must be square and nonempty");
  }
  if (!p.allFinite() || (p.array() < 0.0).any()) {
    throw ValidationError("transition matrix has negative or non-finite entries");
  }
  for (Index i = 0; i < p.rows(); ++i) {
    const double sum = p.row(i).sum();
    if (std::abs(sum - 1.0) > tolerance) {
      throw ValidationError("transition row " + std::to_string(i) + " sums to " +
                            std::to_string(sum));
    }
  }
}

TabularMRP::TabularMRP(MatrixXd transition, VectorXd reward, double gamma)
    : transition_(std::move(transition)), reward_(std::move(reward)), gamma_(gamma) {
  validate_stochastic(transition_);
  if (reward_.size() != transition_.rows()) {
    throw ValidationError("reward vector size does not match the number of states");
  }
  if (!reward_.allFinite()) throw ValidationError("reward vector has non-finite entries");
  if (!(gamma_ > 0.0 && gamma_ < 1.0)) {
    throw ValidationError("gamma must lie strictly inside (0, 1)");
  }
}

VectorXd exact_value(const TabularMRP& mrp) {
  const Index s = mrp.num_states();
  const MatrixXd& p = mrp.transition();
  const double gamma = mrp.gamma();
  const MatrixXd lhs = MatrixXd::Identity(s, s) - gamma * p;
  const VectorXd rhs = gamma * (p * mrp.reward());
  const VectorXd v = lhs.partialPivLu().solve(rhs);
  const double residual = (lhs * v - rhs).lpNorm<Eigen::Infinity>();
  const double r_inf = mrp.reward().lpNorm<Eigen::Infinity>();
  if (!v.allFinite() || residual > 1e-10 * (1.0 + r_inf)) {
    throw NumericalError("exact_value: linear solve failed (residual " +
                         std::to_string(residual) + ")");
  }
  return v;
}

TransitionDataset simulate_trajectory(const TabularMRP& mrp, int start, Index n,
                                      double noise_sd, RngSeed seed) {
  if (n < 1) throw ValidationError("simulate_trajectory: n must be at least 1");
  if (!(noise_sd >= 0.0)) throw ValidationError("simulate_trajectory: noise_sd must be >= 0");
  if (start < 0 || start >= mrp.num_states()) {
    throw ValidationError("simulate_trajectory: start state out of range");
  }
  Rng rng(seed);
  Eigen::MatrixXi states(1, n);
  Eigen::MatrixXi next(1, n);
  VectorXd rewards(n);
  int s = start;
  for (Index t = 0; t < n; ++t) {
    states(0, t) = s;
    const double noise = noise_sd > 0.0 ? noise_sd * rng.normal() : 0.0;
    rewards(t) = mrp.reward()(s) + noise;
    s = rng.categorical(mrp.transition().row(s));
    next(0, t) = s;
  }
  return TransitionDataset::from_tabular(std::move(states), std::move(rewards), std::move(next));
}

VectorXd stationary_distribution(const MatrixXd& p) {
  validate_stochastic(p, 1e-10);
  const Index s = p.rows();
  // Three starting distributions iterated together: two point masses at the
  // ends and a skewed profile. A periodic chain keeps oscillating; a chain
  // with several closed classes sends them to different limits.
  MatrixXd dist = MatrixXd::Zero(3, s);
  dist(0, 0) = 1.0;
  dist(1, s - 1) = 1.0;
  for (Index i = 0; i < s; ++i) dist(2, i) = static_cast<double>(i + 1);
  dist.row(2) /= dist.row(2).sum();

  constexpr int kMaxIterations = 100'000;
  constexpr double kStep = 1e-14;
  bool settled = false;
  for (int it = 0; it < kMaxIterations; ++it) {
    MatrixXd next = dist * p;
    const double change = (next - dist).cwiseAbs().rowwise().sum().maxCoeff();
    dist = std::move(next);
    if (change <= kStep) {
      settled = true;
      break;
    }
  }
  if (!settled) {
    throw ConvergenceError("stationary_distribution: power iteration did not converge "
                           "(periodic or nearly decomposable chain)");
  }
  const double spread = std::max((dist.row(0) - dist.row(1)).cwiseAbs().sum(),
                                 (dist.row(0) - dist.row(2)).cwiseAbs().sum());
  if (spread > 1e-8) {
    throw ConvergenceError("stationary_distribution: limits depend on the start (reducible chain)");
  }
  VectorXd pi = dist.row(0).transpose();
  pi /= pi.sum();
  if ((pi.transpose() * p - pi.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw NumericalError("stationary_distribution: fixed-point residual too large");
  }
  return pi;
}

}  // namespace valuegap
