#pragma once

#include <Eigen/Dense>

namespace valuegap {

// Singular-value cutoff, relative to the largest pivot, below which a
// direction is treated as numerically null.
inline constexpr double kRankCutoff = 1e-10;

struct MinNormSolution {
  Eigen::MatrixXd x;
  Eigen::Index rank = 0;
};

// Minimum-norm least-squares solution of a·x = b using a complete orthogonal
// decomposition. Works for square, tall, wide and rank-deficient systems.
MinNormSolution min_norm_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

double spectral_radius(const Eigen::MatrixXd& a);

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Column-stacking vectorization and its inverse.
Eigen::VectorXd vec(const Eigen::MatrixXd& m);
Eigen::MatrixXd unvec(const Eigen::VectorXd& v, Eigen::Index rows);

// Solves X = F X Fᵀ + Q for X by the doubling iteration. Requires ρ(F) < 1;
// throws ConvergenceError otherwise. The returned X satisfies the residual
// bound ‖F X Fᵀ − X + Q‖_F ≤ 1e-10·max(‖Q‖_F, tiny) or the call throws.
Eigen::MatrixXd solve_discrete_lyapunov(const Eigen::MatrixXd& f, const Eigen::MatrixXd& q);

}  // namespace valuegap
