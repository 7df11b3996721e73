#pragma once

#include <Eigen/Dense>

#include "valuegap/dataset.hpp"
#include "valuegap/random.hpp"

namespace valuegap {

// Finite-state Markov reward process with state-indexed mean rewards.
//
// Value convention used throughout the library for tabular processes: the
// reward collected at the start state is excluded,
//
//   V(s) = E[ Σ_{t≥1} γ^t r(S_t) | S_0 = s ],   i.e.  (I − γP) V = γ P r.
class TabularMRP {
 public:
  // Throws ValidationError unless P is square and row-stochastic (1e-12),
  // r is finite with matching size, and gamma lies strictly inside (0, 1).
  TabularMRP(Eigen::MatrixXd transition, Eigen::VectorXd reward, double gamma);

  const Eigen::MatrixXd& transition() const { return transition_; }
  const Eigen::VectorXd& reward() const { return reward_; }
  double gamma() const { return gamma_; }
  Eigen::Index num_states() const { return reward_.size(); }

 private:
  Eigen::MatrixXd transition_;
  Eigen::VectorXd reward_;
  double gamma_;
};

// Throws ValidationError if p is not a square row-stochastic matrix.
void validate_stochastic(const Eigen::MatrixXd& p, double tolerance = 1e-12);

Eigen::VectorXd exact_value(const TabularMRP& mrp);

// Single trajectory of n triples starting at `start`. The reward of a triple
// is N(r(state), noise_sd²).
TransitionDataset simulate_trajectory(const TabularMRP& mrp, int start, Eigen::Index n,
                                      double noise_sd, RngSeed seed);

// Stationary distribution by power iteration. Throws ConvergenceError when
// the iteration does not settle (periodic chain) or when different starting
// distributions settle on different limits (reducible chain).
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& p);

}  // namespace valuegap
