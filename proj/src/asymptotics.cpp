#include "valuegap/asymptotics.hpp"

#include <cmath>
#include <string>

#include "valuegap/errors.hpp"
#include "valuegap/linalg.hpp"
#include "valuegap/linear_systems.hpp"

namespace valuegap {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void check_instance(const MatrixXd& a, const VectorXd& theta, double gamma, double sigma) {
  if (a.rows() != a.cols() || a.rows() != theta.size() || a.rows() == 0) {
    throw ValidationError("asymptotic MSE: A must be square and match theta");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in (0, 1)");
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
  if (!(spectral_radius(a) < 1.0)) throw ValidationError("asymptotic MSE: A must be stable");
}

std::string describe(const char* kind, Index d) {
  return std::string(kind) + " d=" + std::to_string(d);
}

}  // namespace

AsymptoticMse asymptotic_mse_general(const MatrixXd& a, const VectorXd& theta, double gamma,
                                     double sigma) {
  check_instance(a, theta, gamma, sigma);
  const Index d = a.rows();
  const MatrixXd p_inf = stationary_covariance(a, sigma);
  const VectorXd beta = true_beta(a, theta, gamma);
  const MatrixXd id = MatrixXd::Identity(d, d);
  const MatrixXd resolvent = (id - gamma * a).partialPivLu().inverse();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(p_inf);
  const MatrixXd whitened = eig.operatorInverseSqrt() * resolvent;
  const double value =
      sigma * sigma * (gamma * gamma * beta.squaredNorm() + 1.0) * whitened.squaredNorm();
  return AsymptoticMse{value, "lstd-linear", describe("general", d)};
}

AsymptoticMse asymptotic_mse_diag(const MatrixXd& a, const VectorXd& theta, double gamma,
                                  double sigma) {
  check_instance(a, theta, gamma, sigma);
  const Index d = a.rows();
  if (!a.isDiagonal(0.0)) throw ValidationError("asymptotic_mse_diag: A must be diagonal");
  double value = 0.0;
  for (Index i = 0; i < d; ++i) {
    const double ai = a(i, i);
    const double gap = 1.0 - gamma * ai;
    const double p_ii = sigma * sigma / (1.0 - ai * ai);
    const double bootstrap = gamma * gamma * theta(i) * theta(i) / (gap * gap) + 1.0;
    value += sigma * sigma * bootstrap / (p_ii * gap * gap);
  }
  return AsymptoticMse{value, "mb-diag", describe("diagonal", d)};
}

double dls_gap_ratio(int d, double lambda, double gamma) {
  if (d < 1) throw ValidationError("dls_gap_ratio: d must be positive");
  if (!(lambda > 0.0 && lambda < 1.0)) throw ValidationError("lambda must lie in (0, 1)");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in (0, 1)");
  const double gap = 1.0 - gamma * lambda;
  const double a = gamma * gamma / (gap * gap);
  return (d * a + 1.0) / (a + 1.0);
}

MatrixXd kron_cov_contract(const MatrixXd& b, const MatrixXd& c, const VectorXd& theta) {
  if (b.rows() != b.cols() || c.rows() != c.cols() || c.rows() != theta.size()) {
    throw ValidationError("kron_cov_contract: dimension mismatch");
  }
  return theta.dot(c * theta) * b;
}

}  // namespace valuegap
