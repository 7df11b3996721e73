#include "valuegap/linalg.hpp"

#include <cmath>
#include <limits>

#include "valuegap/errors.hpp"

namespace valuegap {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MinNormSolution min_norm_solve(const MatrixXd& a, const MatrixXd& b) {
  if (a.rows() != b.rows()) {
    throw ValidationError("min_norm_solve: row mismatch between system and right-hand side");
  }
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod;
  cod.setThreshold(kRankCutoff);
  cod.compute(a);
  MinNormSolution out;
  out.rank = cod.rank();
  if (out.rank == 0) {
    out.x = MatrixXd::Zero(a.cols(), b.cols());
  } else {
    out.x = cod.solve(b);
  }
  return out;
}

double spectral_radius(const MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() == 1) return std::abs(a(0, 0));
  Eigen::EigenSolver<MatrixXd> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("spectral_radius: eigenvalue computation failed");
  }
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

VectorXd vec(const MatrixXd& m) {
  return Eigen::Map<const VectorXd>(m.data(), m.size());
}

MatrixXd unvec(const VectorXd& v, Index rows) {
  if (rows <= 0 || v.size() % rows != 0) {
    throw ValidationError("unvec: length is not a multiple of the row count");
  }
  return Eigen::Map<const MatrixXd>(v.data(), rows, v.size() / rows);
}

MatrixXd solve_discrete_lyapunov(const MatrixXd& f, const MatrixXd& q) {
  if (f.rows() != f.cols() || q.rows() != q.cols() || f.rows() != q.rows()) {
    throw ValidationError("solve_discrete_lyapunov: F and Q must be square and of equal size");
  }
  // Doubling: after k steps X_k = Σ_{j < 2^k} F^j Q (Fᵀ)^j and F_k = F^(2^k).
  // Each step squares the contraction factor ρ(F)².
  constexpr int kMaxDoublings = 64;
  MatrixXd x = q;
  MatrixXd fk = f;
  bool converged = false;
  for (int k = 0; k < kMaxDoublings; ++k) {
    const MatrixXd increment = fk * x * fk.transpose();
    x += increment;
    fk = fk * fk;
    if (!x.allFinite()) break;
    const double scale = std::max(x.norm(), std::numeric_limits<double>::min());
    if (increment.norm() <= 1e-16 * scale && fk.norm() <= 1e-8) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw ConvergenceError(
        "solve_discrete_lyapunov: iteration did not converge (spectral radius of F >= 1?)");
  }
  const double residual = (f * x * f.transpose() - x + q).norm();
  const double bound = 1e-10 * std::max(q.norm(), std::numeric_limits<double>::min());
  if (!(residual <= bound)) {
    throw NumericalError("solve_discrete_lyapunov: residual " + std::to_string(residual) +
                         " exceeds tolerance");
  }
  return x;
}

}  // namespace valuegap
