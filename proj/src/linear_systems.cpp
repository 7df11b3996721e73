#include "valuegap/linear_systems.hpp"

#include <cmath>

#include "valuegap/errors.hpp"
#include "valuegap/linalg.hpp"

namespace valuegap {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void require_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie strictly inside (0, 1)");
}

void require_square(const MatrixXd& a, const char* what) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    throw ValidationError(std::string(what) + ": dynamics matrix must be square and nonempty");
  }
}

}  // namespace

LinearSystem LinearSystem::linear(MatrixXd dynamics, VectorXd theta, double sigma, double gamma) {
  LinearSystem sys;
  sys.kind_ = LinearKind::GeneralLinear;
  sys.dynamics_ = std::move(dynamics);
  sys.theta_ = std::move(theta);
  sys.sigma_ = sigma;
  sys.gamma_ = gamma;
  sys.validate();
  return sys;
}

LinearSystem LinearSystem::diagonal(VectorXd dynamics_diagonal, VectorXd theta, double sigma,
                                    double gamma) {
  LinearSystem sys;
  sys.kind_ = LinearKind::DiagonalLinear;
  sys.dynamics_ = dynamics_diagonal.asDiagonal();
  sys.theta_ = std::move(theta);
  sys.sigma_ = sigma;
  sys.gamma_ = gamma;
  sys.validate();
  return sys;
}

LinearSystem LinearSystem::lqr(MatrixXd dynamics, MatrixXd reward_matrix, double sigma,
                               double gamma) {
  LinearSystem sys;
  sys.kind_ = LinearKind::Lqr;
  sys.dynamics_ = std::move(dynamics);
  sys.reward_matrix_ = std::move(reward_matrix);
  sys.sigma_ = sigma;
  sys.gamma_ = gamma;
  sys.validate();
  return sys;
}

void LinearSystem::validate() const {
  require_square(dynamics_, "LinearSystem");
  require_gamma(gamma_);
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
    throw ValidationError("LinearSystem: sigma must be positive");
  }
  if (!dynamics_.allFinite()) throw ValidationError("LinearSystem: non-finite dynamics");
  const double rho = spectral_radius(dynamics_);
  if (!(rho < 1.0)) {
    throw ValidationError("LinearSystem: dynamics are not stable (spectral radius " +
                          std::to_string(rho) + ")");
  }
  const Index d = dim();
  if (kind_ == LinearKind::Lqr) {
    if (reward_matrix_.rows() != d || reward_matrix_.cols() != d) {
      throw ValidationError("LinearSystem: reward matrix must be d x d");
    }
  } else {
    if (theta_.size() != d) throw ValidationError("LinearSystem: theta must have length d");
  }
  if (kind_ == LinearKind::DiagonalLinear) {
    MatrixXd off = dynamics_;
    off.diagonal().setZero();
    if (!off.isZero(0.0)) throw ValidationError("LinearSystem: diagonal kind needs diagonal A");
  }
}

const VectorXd& LinearSystem::theta() const {
  if (kind_ == LinearKind::Lqr) throw ValidationError("LinearSystem: lqr kind has no theta");
  return theta_;
}

const MatrixXd& LinearSystem::reward_matrix() const {
  if (kind_ != LinearKind::Lqr) throw ValidationError("LinearSystem: only lqr has a reward matrix");
  return reward_matrix_;
}

double LinearSystem::mean_reward(const Eigen::Ref<const VectorXd>& x) const {
  if (kind_ == LinearKind::Lqr) return x.dot(reward_matrix_ * x);
  return theta_.dot(x);
}

double QuadraticValue::evaluate(const Eigen::Ref<const VectorXd>& x) const {
  return x.dot(p * x) + gamma / (1.0 - gamma) * p.trace();
}

TransitionDataset simulate_linear(const LinearSystem& sys, Index n, RngSeed seed) {
  if (n < 1) throw ValidationError("simulate_linear: n must be at least 1");
  const Index d = sys.dim();
  const double sigma = sys.sigma();
  const MatrixXd& a = sys.dynamics();
  Rng rng(seed);

  const MatrixXd p_inf = stationary_covariance(a, sigma);
  Eigen::LLT<MatrixXd> chol(p_inf);
  if (chol.info() != Eigen::Success) {
    throw NumericalError("simulate_linear: stationary covariance is not positive definite");
  }
  VectorXd x = chol.matrixL() * rng.normal_vector(d);

  MatrixXd states(d, n);
  MatrixXd next(d, n);
  VectorXd rewards(n);
  for (Index t = 0; t < n; ++t) {
    states.col(t) = x;
    rewards(t) = sys.mean_reward(x) + sigma * rng.normal();
    x = a * x + sigma * rng.normal_vector(d);
    next.col(t) = x;
  }
  return TransitionDataset::from_real(std::move(states), std::move(rewards), std::move(next));
}

VectorXd true_beta(const MatrixXd& a, const VectorXd& theta, double gamma) {
  require_square(a, "true_beta");
  if (theta.size() != a.rows()) throw ValidationError("true_beta: theta must have length d");
  const Index d = a.rows();
  const MatrixXd lhs = MatrixXd::Identity(d, d) - gamma * a.transpose();
  Eigen::FullPivLU<MatrixXd> lu(lhs);
  if (!lu.isInvertible()) {
    throw NumericalError("true_beta: I - gamma A^T is singular");
  }
  VectorXd beta = lu.solve(theta);
  const double residual = (lhs * beta - theta).lpNorm<Eigen::Infinity>();
  if (!beta.allFinite() || residual > 1e-12 * std::max(1.0, theta.lpNorm<Eigen::Infinity>())) {
    throw NumericalError("true_beta: ill-conditioned solve (residual " + std::to_string(residual) +
                         ")");
  }
  return beta;
}

MatrixXd stationary_covariance(const MatrixXd& a, double sigma) {
  require_square(a, "stationary_covariance");
  const Index d = a.rows();
  MatrixXd p = solve_discrete_lyapunov(a, sigma * sigma * MatrixXd::Identity(d, d));
  return 0.5 * (p + p.transpose());
}

QuadraticValue lqr_value_matrix(const MatrixXd& a, const MatrixXd& q, double gamma) {
  require_square(a, "lqr_value_matrix");
  if (q.rows() != a.rows() || q.cols() != a.cols()) {
    throw ValidationError("lqr_value_matrix: Q must match A in size");
  }
  // P = Σ_k γ^k (Aᵀ)^k Q A^k, i.e. X = F X Fᵀ + Q with F = √γ Aᵀ.
  const MatrixXd f = std::sqrt(gamma) * a.transpose();
  return QuadraticValue{solve_discrete_lyapunov(f, q), gamma};
}

VectorXd lift_state(const Eigen::Ref<const VectorXd>& x) {
  const MatrixXd outer = x * x.transpose();
  return vec(outer);
}

TransitionDataset lift_dataset(const TransitionDataset& data) {
  const MatrixXd& x = data.real_states();
  const MatrixXd& xn = data.real_next_states();
  const Index d = x.rows();
  MatrixXd z(d * d, x.cols());
  MatrixXd zn(d * d, x.cols());
  for (Index t = 0; t < x.cols(); ++t) {
    z.col(t) = lift_state(x.col(t));
    zn.col(t) = lift_state(xn.col(t));
  }
  return TransitionDataset::from_real(std::move(z), data.rewards(), std::move(zn));
}

MatrixXd kron_dynamics(const MatrixXd& a) { return kron(a, a); }

MatrixXd random_stable_matrix(Index d, double target_radius, RngSeed seed) {
  if (d < 1) throw ValidationError("random_stable_matrix: d must be at least 1");
  if (!(target_radius > 0.0 && target_radius < 1.0)) {
    throw ValidationError("random_stable_matrix: target radius must lie in (0, 1)");
  }
  Rng rng(seed);
  for (;;) {
    MatrixXd a = rng.normal_matrix(d, d);
    const double rho = spectral_radius(a);
    if (rho > 1e-8) {
      a *= target_radius / rho;
      return a;
    }
  }
}

VectorXd random_stable_diagonal(Index d, double target_radius, RngSeed seed) {
  if (d < 1) throw ValidationError("random_stable_diagonal: d must be at least 1");
  if (!(target_radius > 0.0 && target_radius < 1.0)) {
    throw ValidationError("random_stable_diagonal: target radius must lie in (0, 1)");
  }
  Rng rng(seed);
  for (;;) {
    VectorXd a = rng.normal_vector(d);
    const double largest = a.cwiseAbs().maxCoeff();
    if (largest > 1e-8) return a * (target_radius / largest);
  }
}

}  // namespace valuegap
