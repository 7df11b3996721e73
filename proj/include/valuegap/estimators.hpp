#pragma once

#include <span>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "valuegap/dataset.hpp"
#include "valuegap/decoupled.hpp"
#include "valuegap/linear_systems.hpp"

namespace valuegap {

struct LinearValue {
  Eigen::VectorXd beta;

  double evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const { return beta.dot(x); }
};

struct TabularValue {
  Eigen::VectorXd values;
};

using ValuePayload = std::variant<LinearValue, QuadraticValue, TabularValue, SeparableValue>;

struct ValueEstimate {
  ValuePayload value;
  std::string estimator;
  Eigen::Index samples = 0;
  // Set by tabular model-based estimators when some state was never visited
  // and its transition row/reward had to be imputed.
  bool imputed_unvisited = false;

  const LinearValue& linear() const { return std::get<LinearValue>(value); }
  const QuadraticValue& quadratic() const { return std::get<QuadraticValue>(value); }
  const TabularValue& tabular() const { return std::get<TabularValue>(value); }
  const SeparableValue& separable() const { return std::get<SeparableValue>(value); }
};

enum class DynamicsConstraint { Unconstrained, Diagonal };

// Least-squares model of X' ≈ A X and R ≈ θᵀX.
struct LinearModelFit {
  Eigen::MatrixXd dynamics;
  Eigen::VectorXd theta;
};

// Least-squares model on shifted lifted states φ = vec(xxᵀ) + γ/(1−γ)·vec(I):
// φ' ≈ M φ and R ≈ θᵀ φ.
struct LiftedModelFit {
  Eigen::MatrixXd dynamics;
  Eigen::VectorXd theta;
};

// Least-squares A from state pairs and Q from regressing rewards on vec(xxᵀ).
struct LqrModelFit {
  Eigen::MatrixXd dynamics;
  Eigen::MatrixXd reward_matrix;
};

// --- linear features -------------------------------------------------------

LinearModelFit fit_linear_model(const TransitionDataset& data, DynamicsConstraint constraint);

// β̂ = (Σ x(x − γx')ᵀ)⁻¹ Σ r x. Throws RankDeficientError when the LSTD
// matrix is singular.
ValueEstimate lstd_linear(const TransitionDataset& data, double gamma);

// Plug-in β̂ = (I − γÂᵀ)⁻¹ θ̂. Throws UnstableModelError if ρ(γÂ) ≥ 1.
ValueEstimate mb_linear(const TransitionDataset& data, double gamma,
                        DynamicsConstraint constraint);

// --- quadratic features ----------------------------------------------------

LiftedModelFit fit_lifted_model(const TransitionDataset& data, double gamma);
LqrModelFit fit_lqr_model(const TransitionDataset& data);

// LSTD over quadratic values with features vec(xxᵀ) + γ/(1−γ)·vec(I). The
// feature map never spans antisymmetric directions, so the system is solved in
// the minimum-norm sense and the returned P̂ is symmetric. Throws
// RankDeficientError when the rank is below d(d+1)/2.
ValueEstimate lstd_quadratic(const TransitionDataset& data, double gamma);

// P̂ = lqr_value_matrix(Â, Q̂, γ). Throws UnstableModelError if ρ(√γ Â) ≥ 1.
ValueEstimate mb_lqr(const TransitionDataset& data, double gamma);

// P̂ = (I − γM̂ᵀ)⁻¹ θ̂ with M̂ the unconstrained least-squares lifted dynamics.
ValueEstimate mb_lifted_lqr(const TransitionDataset& data, double gamma);

// --- tabular features ------------------------------------------------------

// Minimum-norm regression of rewards on concatenated per-component one-hot
// features. Shared by both separable estimators.
SeparableValue fit_separable_reward(const TransitionDataset& data, std::span<const int> sizes);

// LSTD over separable values (one-hot features per component). Only the
// joint value is identified; tables are the minimum-norm slices. The start
// state reward is removed by subtracting the γ = 0 fixed point, which yields
// the library's tabular value convention.
ValueEstimate lstd_separable(const TransitionDataset& data, std::span<const int> sizes,
                             double gamma);

// Per-component certainty equivalence: empirical kernels P̂_i, shared reward
// regression r̂_i, tables exact_value(P̂_i, r̂_i, γ). Unvisited component
// states get a uniform row and zero reward, and the estimate is flagged.
ValueEstimate mb_decoupled(const TransitionDataset& data, std::span<const int> sizes,
                           double gamma);

// Certainty equivalence on a single tabular component (the joint space when
// states are joint indices). Limited to kMaxProductStates states.
ValueEstimate mb_tabular(const TransitionDataset& data, int num_states, double gamma);

}  // namespace valuegap
