#pragma once

#include <string>

#include <Eigen/Dense>

namespace valuegap {

// Limit of n·E‖β̂ − β‖² for an estimator on a given instance.
struct AsymptoticMse {
  double value = 0.0;
  std::string estimator;
  std::string instance;
};

// Unconstrained plug-in (equivalently LSTD):
//   σ² (γ² ‖(I − γAᵀ)⁻¹θ‖² + 1) ‖P∞^{-1/2} (I − γA)⁻¹‖²_F.
AsymptoticMse asymptotic_mse_general(const Eigen::MatrixXd& a, const Eigen::VectorXd& theta,
                                     double gamma, double sigma);

// Diagonal-constrained plug-in:
//   Σ_i σ² (γ²θ_i²/(1 − γa_i)² + 1) / (P∞,ii (1 − γa_i)²),  P∞,ii = σ²/(1 − a_i²).
// σ cancels, leaving Σ_i (γ²θ_i²/(1 − γa_i)² + 1)(1 − a_i²)/(1 − γa_i)².
AsymptoticMse asymptotic_mse_diag(const Eigen::MatrixXd& a, const Eigen::VectorXd& theta,
                                  double gamma, double sigma);

// Limiting MSE ratio of LSTD to the diagonal plug-in for A = λI, θ = 𝟙_d:
//   (dγ²/(1 − γλ)² + 1) / (γ²/(1 − γλ)² + 1).
double dls_gap_ratio(int d, double lambda, double gamma);

// Cov(Mθ) = (θᵀCθ)·B for a random matrix M with Cov(vec(Mᵀ)) = B ⊗ C.
Eigen::MatrixXd kron_cov_contract(const Eigen::MatrixXd& b, const Eigen::MatrixXd& c,
                                  const Eigen::VectorXd& theta);

}  // namespace valuegap
