#include <cmath>

#include "valuegap/errors.hpp"
#include "valuegap/estimators.hpp"
#include "valuegap/linalg.hpp"

namespace valuegap {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void require_discount(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in [0, 1)");
}

void require_samples(const TransitionDataset& data, Index needed, const char* who) {
  if (data.size() < needed) {
    throw ValidationError(std::string(who) + ": needs at least " + std::to_string(needed) +
                          " transitions, got " + std::to_string(data.size()));
  }
}

}  // namespace

LinearModelFit fit_linear_model(const TransitionDataset& data, DynamicsConstraint constraint) {
  const MatrixXd& x = data.real_states();
  const MatrixXd& xn = data.real_next_states();
  const Index d = x.rows();
  require_samples(data, d, "fit_linear_model");

  // Regressions are on the n×d design Xᵀ: Âᵀ = argmin ‖Xᵀ Aᵀ − X'ᵀ‖, θ̂ likewise.
  const MatrixXd design = x.transpose();
  LinearModelFit fit;
  if (constraint == DynamicsConstraint::Unconstrained) {
    MatrixXd rhs(x.cols(), d + 1);
    rhs.leftCols(d) = xn.transpose();
    rhs.col(d) = data.rewards();
    const MinNormSolution sol = min_norm_solve(design, rhs);
    if (sol.rank < d) {
      throw RankDeficientError("fit_linear_model: state design matrix is singular", sol.rank, d);
    }
    fit.dynamics = sol.x.leftCols(d).transpose();
    fit.theta = sol.x.col(d);
  } else {
    fit.dynamics = MatrixXd::Zero(d, d);
    for (Index i = 0; i < d; ++i) {
      const double energy = x.row(i).squaredNorm();
      if (!(energy > 0.0)) {
        throw RankDeficientError("fit_linear_model: coordinate " + std::to_string(i) +
                                     " is never excited",
                                 i, d);
      }
      fit.dynamics(i, i) = xn.row(i).dot(x.row(i)) / energy;
    }
    fit.theta = min_norm_solve(design, data.rewards()).x;
  }
  return fit;
}

ValueEstimate lstd_linear(const TransitionDataset& data, double gamma) {
  require_discount(gamma);
  const MatrixXd& x = data.real_states();
  const MatrixXd& xn = data.real_next_states();
  const Index d = x.rows();
  require_samples(data, d, "lstd_linear");

  const MatrixXd lstd = x * (x - gamma * xn).transpose();
  const VectorXd b = x * data.rewards();
  const MinNormSolution sol = min_norm_solve(lstd, b);
  if (sol.rank < d) {
    throw RankDeficientError("lstd_linear: LSTD matrix is singular", sol.rank, d);
  }
  return ValueEstimate{LinearValue{sol.x.col(0)}, "lstd-linear", data.size()};
}

ValueEstimate mb_linear(const TransitionDataset& data, double gamma,
                        DynamicsConstraint constraint) {
  require_discount(gamma);
  const LinearModelFit fit = fit_linear_model(data, constraint);
  const Index d = fit.dynamics.rows();
  const double rho = gamma * spectral_radius(fit.dynamics);
  if (!(rho < 1.0)) {
    throw UnstableModelError("mb_linear: fitted discounted dynamics are not contracting", rho);
  }
  VectorXd beta;
  if (constraint == DynamicsConstraint::Diagonal) {
    beta = fit.theta.array() / (1.0 - gamma * fit.dynamics.diagonal().array());
  } else {
    const MatrixXd lhs = MatrixXd::Identity(d, d) - gamma * fit.dynamics.transpose();
    beta = lhs.partialPivLu().solve(fit.theta);
  }
  const char* name = constraint == DynamicsConstraint::Diagonal ? "mb-diag" : "mb-linear";
  return ValueEstimate{LinearValue{std::move(beta)}, name, data.size()};
}

}  // namespace valuegap
