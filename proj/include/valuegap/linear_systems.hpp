#pragma once

#include <Eigen/Dense>

#include "valuegap/dataset.hpp"
#include "valuegap/random.hpp"

namespace valuegap {

enum class LinearKind { GeneralLinear, DiagonalLinear, Lqr };

// X' = A X + ε, ε ~ N(0, σ² I), with reward f(X) + η, η ~ N(0, σ²), where
// f(x) = θᵀx for the linear kinds and xᵀQx for LQR (Q need not be symmetric).
class LinearSystem {
 public:
  // Throws ValidationError unless ρ(A) < 1, σ > 0, γ ∈ (0, 1) and dimensions
  // agree; the diagonal kind additionally requires a diagonal A.
  static LinearSystem linear(Eigen::MatrixXd dynamics, Eigen::VectorXd theta, double sigma,
                             double gamma);
  static LinearSystem diagonal(Eigen::VectorXd dynamics_diagonal, Eigen::VectorXd theta,
                               double sigma, double gamma);
  static LinearSystem lqr(Eigen::MatrixXd dynamics, Eigen::MatrixXd reward_matrix, double sigma,
                          double gamma);

  LinearKind kind() const { return kind_; }
  Eigen::Index dim() const { return dynamics_.rows(); }
  const Eigen::MatrixXd& dynamics() const { return dynamics_; }
  const Eigen::VectorXd& theta() const;          // linear kinds
  const Eigen::MatrixXd& reward_matrix() const;  // lqr
  double sigma() const { return sigma_; }
  double gamma() const { return gamma_; }

  double mean_reward(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  LinearSystem() = default;
  void validate() const;

  LinearKind kind_ = LinearKind::GeneralLinear;
  Eigen::MatrixXd dynamics_;
  Eigen::VectorXd theta_;
  Eigen::MatrixXd reward_matrix_;
  double sigma_ = 1.0;
  double gamma_ = 0.9;
};

// Quadratic value x ↦ tr((xxᵀ + γ/(1−γ)·I) P) = xᵀPx + γ/(1−γ)·tr(P). The
// constant term assumes unit noise variance, the setting of every experiment.
struct QuadraticValue {
  Eigen::MatrixXd p;
  double gamma = 0.9;

  double evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

// Single trajectory of n triples; X(0) is drawn from N(0, P∞).
TransitionDataset simulate_linear(const LinearSystem& sys, Eigen::Index n, RngSeed seed);

// β = (I − γAᵀ)⁻¹θ, the coefficient of the linear value x ↦ βᵀx.
Eigen::VectorXd true_beta(const Eigen::MatrixXd& a, const Eigen::VectorXd& theta, double gamma);

// P∞ solving A P∞ Aᵀ − P∞ + σ² I = 0.
Eigen::MatrixXd stationary_covariance(const Eigen::MatrixXd& a, double sigma);

// P solving (√γ A)ᵀ P (√γ A) − P + Q = 0.
QuadraticValue lqr_value_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q, double gamma);

// z = vec(x xᵀ), column-stacking. x and −x have the same image.
Eigen::VectorXd lift_state(const Eigen::Ref<const Eigen::VectorXd>& x);
TransitionDataset lift_dataset(const TransitionDataset& data);

// M = A ⊗ A, so that M·vec(xxᵀ) = vec(A xxᵀ Aᵀ).
Eigen::MatrixXd kron_dynamics(const Eigen::MatrixXd& a);

// Gaussian matrix rescaled to spectral radius `target_radius` (zero draws are
// redrawn).
Eigen::MatrixXd random_stable_matrix(Eigen::Index d, double target_radius, RngSeed seed);

// Diagonal with Gaussian entries rescaled so the largest magnitude equals
// `target_radius`.
Eigen::VectorXd random_stable_diagonal(Eigen::Index d, double target_radius, RngSeed seed);

}  // namespace valuegap
