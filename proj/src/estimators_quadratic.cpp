#include <cmath>

#include "valuegap/errors.hpp"
#include "valuegap/estimators.hpp"
#include "valuegap/linalg.hpp"

namespace valuegap {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct LiftedFeatures {
  MatrixXd phi;       // d² × n, columns vec(x xᵀ) + c·vec(I)
  MatrixXd phi_next;  // d² × n
  Index d = 0;
};

// c = γ/(1−γ) folds the noise-driven constant of the value into the features.
LiftedFeatures lifted_features(const TransitionDataset& data, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in [0, 1)");
  const TransitionDataset lifted = lift_dataset(data);
  LiftedFeatures f;
  f.d = data.state_dim();
  const VectorXd offset = gamma / (1.0 - gamma) * vec(MatrixXd::Identity(f.d, f.d));
  f.phi = lifted.real_states().colwise() + offset;
  f.phi_next = lifted.real_next_states().colwise() + offset;
  return f;
}

// Symmetric matrices span the lifted features, so this is the best rank any
// quadratic design can reach.
Index symmetric_rank(Index d) { return d * (d + 1) / 2; }

}  // namespace

LiftedModelFit fit_lifted_model(const TransitionDataset& data, double gamma) {
  const LiftedFeatures f = lifted_features(data, gamma);
  const Index k = f.phi.rows();
  MatrixXd rhs(f.phi.cols(), k + 1);
  rhs.leftCols(k) = f.phi_next.transpose();
  rhs.col(k) = data.rewards();
  const MinNormSolution sol = min_norm_solve(f.phi.transpose(), rhs);
  if (sol.rank < symmetric_rank(f.d)) {
    throw RankDeficientError("fit_lifted_model: lifted design is rank deficient", sol.rank,
                             symmetric_rank(f.d));
  }
  return LiftedModelFit{sol.x.leftCols(k).transpose(), sol.x.col(k)};
}

LqrModelFit fit_lqr_model(const TransitionDataset& data) {
  const LinearModelFit linear = fit_linear_model(data, DynamicsConstraint::Unconstrained);
  const TransitionDataset lifted = lift_dataset(data);
  const Index d = data.state_dim();
  const MinNormSolution sol = min_norm_solve(lifted.real_states().transpose(), data.rewards());
  if (sol.rank < symmetric_rank(d)) {
    throw RankDeficientError("fit_lqr_model: lifted design is rank deficient", sol.rank,
                             symmetric_rank(d));
  }
  return LqrModelFit{linear.dynamics, unvec(sol.x.col(0), d)};
}

ValueEstimate lstd_quadratic(const TransitionDataset& data, double gamma) {
  const LiftedFeatures f = lifted_features(data, gamma);
  const MatrixXd lstd = f.phi * (f.phi - gamma * f.phi_next).transpose();
  const VectorXd b = f.phi * data.rewards();
  const MinNormSolution sol = min_norm_solve(lstd, b);
  if (sol.rank < symmetric_rank(f.d)) {
    throw RankDeficientError("lstd_quadratic: LSTD matrix is rank deficient", sol.rank,
                             symmetric_rank(f.d));
  }
  return ValueEstimate{QuadraticValue{unvec(sol.x.col(0), f.d), gamma}, "lstd-quadratic",
                       data.size()};
}

ValueEstimate mb_lqr(const TransitionDataset& data, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in (0, 1)");
  const LqrModelFit fit = fit_lqr_model(data);
  const double rho = std::sqrt(gamma) * spectral_radius(fit.dynamics);
  if (!(rho < 1.0)) {
    throw UnstableModelError("mb_lqr: fitted discounted dynamics are not contracting", rho);
  }
  return ValueEstimate{lqr_value_matrix(fit.dynamics, fit.reward_matrix, gamma), "mb-lqr",
                       data.size()};
}

ValueEstimate mb_lifted_lqr(const TransitionDataset& data, double gamma) {
  const LiftedModelFit fit = fit_lifted_model(data, gamma);
  const Index k = fit.dynamics.rows();
  const Index d = data.state_dim();
  const MatrixXd lhs = MatrixXd::Identity(k, k) - gamma * fit.dynamics.transpose();
  Eigen::FullPivLU<MatrixXd> lu(lhs);
  if (!lu.isInvertible()) {
    throw RankDeficientError("mb_lifted_lqr: I - gamma M^T is singular", lu.rank(), k);
  }
  const VectorXd p = lu.solve(fit.theta);
  return ValueEstimate{QuadraticValue{unvec(p, d), gamma}, "mb-lifted-lqr", data.size()};
}

}  // namespace valuegap
