#include "valuegap/dataset.hpp"

#include "valuegap/errors.hpp"

namespace valuegap {

TransitionDataset TransitionDataset::from_real(Eigen::MatrixXd states, Eigen::VectorXd rewards,
                                               Eigen::MatrixXd next_states) {
  if (states.rows() != next_states.rows() || states.cols() != next_states.cols() ||
      states.cols() != rewards.size()) {
    throw ValidationError("TransitionDataset: states, rewards and next states disagree in shape");
  }
  if (states.rows() == 0) throw ValidationError("TransitionDataset: zero-dimensional states");
  if (!states.allFinite() || !next_states.allFinite() || !rewards.allFinite()) {
    throw ValidationError("TransitionDataset: non-finite entries");
  }
  TransitionDataset out;
  out.kind_ = StateKind::RealVector;
  out.real_states_ = std::move(states);
  out.real_next_ = std::move(next_states);
  out.rewards_ = std::move(rewards);
  return out;
}

TransitionDataset TransitionDataset::from_tabular(Eigen::MatrixXi states, Eigen::VectorXd rewards,
                                                  Eigen::MatrixXi next_states) {
  if (states.rows() != next_states.rows() || states.cols() != next_states.cols() ||
      states.cols() != rewards.size()) {
    throw ValidationError("TransitionDataset: states, rewards and next states disagree in shape");
  }
  if (states.rows() == 0) throw ValidationError("TransitionDataset: zero-dimensional states");
  if ((states.array() < 0).any() || (next_states.array() < 0).any()) {
    throw ValidationError("TransitionDataset: negative tabular index");
  }
  if (!rewards.allFinite()) throw ValidationError("TransitionDataset: non-finite rewards");
  TransitionDataset out;
  out.kind_ = StateKind::TabularIndex;
  out.tab_states_ = std::move(states);
  out.tab_next_ = std::move(next_states);
  out.rewards_ = std::move(rewards);
  return out;
}

Eigen::Index TransitionDataset::state_dim() const {
  return kind_ == StateKind::RealVector ? real_states_.rows() : tab_states_.rows();
}

const Eigen::MatrixXd& TransitionDataset::real_states() const {
  if (kind_ != StateKind::RealVector) throw ValidationError("dataset holds tabular states");
  return real_states_;
}

const Eigen::MatrixXd& TransitionDataset::real_next_states() const {
  if (kind_ != StateKind::RealVector) throw ValidationError("dataset holds tabular states");
  return real_next_;
}

const Eigen::MatrixXi& TransitionDataset::tabular_states() const {
  if (kind_ != StateKind::TabularIndex) throw ValidationError("dataset holds real-vector states");
  return tab_states_;
}

const Eigen::MatrixXi& TransitionDataset::tabular_next_states() const {
  if (kind_ != StateKind::TabularIndex) throw ValidationError("dataset holds real-vector states");
  return tab_next_;
}

bool TransitionDataset::is_single_trajectory() const {
  const Eigen::Index n = size();
  for (Eigen::Index t = 0; t + 1 < n; ++t) {
    if (kind_ == StateKind::RealVector) {
      if (real_next_.col(t) != real_states_.col(t + 1)) return false;
    } else {
      if (tab_next_.col(t) != tab_states_.col(t + 1)) return false;
    }
  }
  return true;
}

}  // namespace valuegap
