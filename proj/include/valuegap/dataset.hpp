#pragma once

#include <Eigen/Dense>

namespace valuegap {

enum class StateKind { TabularIndex, RealVector };

// Sequence of (state, reward, next_state) triples. Samples are stored
// column-wise: column t of the state matrix is the state of triple t.
// Tabular states are vectors of component indices (one row per component);
// a plain finite MRP is the single-component case.
class TransitionDataset {
 public:
  static TransitionDataset from_real(Eigen::MatrixXd states, Eigen::VectorXd rewards,
                                     Eigen::MatrixXd next_states);
  static TransitionDataset from_tabular(Eigen::MatrixXi states, Eigen::VectorXd rewards,
                                        Eigen::MatrixXi next_states);

  StateKind kind() const { return kind_; }
  Eigen::Index size() const { return rewards_.size(); }
  Eigen::Index state_dim() const;

  const Eigen::VectorXd& rewards() const { return rewards_; }

  // Accessors throw ValidationError when the dataset holds the other kind.
  const Eigen::MatrixXd& real_states() const;
  const Eigen::MatrixXd& real_next_states() const;
  const Eigen::MatrixXi& tabular_states() const;
  const Eigen::MatrixXi& tabular_next_states() const;

  // True when next_state of triple t equals state of triple t+1 for all t.
  bool is_single_trajectory() const;

 private:
  TransitionDataset() = default;

  StateKind kind_ = StateKind::RealVector;
  Eigen::MatrixXd real_states_;
  Eigen::MatrixXd real_next_;
  Eigen::MatrixXi tab_states_;
  Eigen::MatrixXi tab_next_;
  Eigen::VectorXd rewards_;
};

}  // namespace valuegap
