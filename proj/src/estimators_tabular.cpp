#include <numeric>
#include <string>
#include <vector>

#include "valuegap/errors.hpp"
#include "valuegap/estimators.hpp"
#include "valuegap/linalg.hpp"
#include "valuegap/mrp.hpp"

namespace valuegap {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::MatrixXi;
using Eigen::VectorXd;

namespace {

// Column offsets of each component's block in the concatenated one-hot map.
std::vector<Index> block_offsets(const TransitionDataset& data, std::span<const int> sizes) {
  if (data.kind() != StateKind::TabularIndex) {
    throw ValidationError("separable estimators need tabular states");
  }
  if (sizes.empty()) throw ValidationError("separable estimators need at least one component");
  if (static_cast<Index>(sizes.size()) != data.state_dim()) {
    throw ValidationError("dataset has " + std::to_string(data.state_dim()) +
                          " components but " + std::to_string(sizes.size()) + " sizes were given");
  }
  std::vector<Index> offsets(sizes.size() + 1, 0);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1) throw ValidationError("component sizes must be positive");
    offsets[i + 1] = offsets[i] + sizes[i];
  }
  const MatrixXi& s = data.tabular_states();
  const MatrixXi& sn = data.tabular_next_states();
  for (Index i = 0; i < s.rows(); ++i) {
    const int n = sizes[static_cast<std::size_t>(i)];
    const bool ok = (s.row(i).array() >= 0).all() && (s.row(i).array() < n).all() &&
                    (sn.row(i).array() >= 0).all() && (sn.row(i).array() < n).all();
    if (!ok) {
      throw ValidationError("component " + std::to_string(i) + " has a state outside [0, " +
                            std::to_string(n) + ")");
    }
  }
  return offsets;
}

// Σ_t φ(s_t) (φ(s_t) − γ φ(s'_t))ᵀ and Σ_t φ(s_t) r_t for one-hot block features,
// accumulated by index so the n × p design is never formed.
void accumulate_lstd(const TransitionDataset& data, const std::vector<Index>& offsets,
                     double gamma, MatrixXd& lhs, VectorXd& rhs) {
  const Index p = offsets.back();
  const Index d = data.state_dim();
  lhs.setZero(p, p);
  rhs.setZero(p);
  const MatrixXi& s = data.tabular_states();
  const MatrixXi& sn = data.tabular_next_states();
  std::vector<Index> cur(static_cast<std::size_t>(d));
  std::vector<Index> nxt(static_cast<std::size_t>(d));
  for (Index t = 0; t < data.size(); ++t) {
    for (Index i = 0; i < d; ++i) {
      cur[static_cast<std::size_t>(i)] = offsets[static_cast<std::size_t>(i)] + s(i, t);
      nxt[static_cast<std::size_t>(i)] = offsets[static_cast<std::size_t>(i)] + sn(i, t);
    }
    const double r = data.rewards()(t);
    for (Index a : cur) {
      rhs(a) += r;
      for (Index b : cur) lhs(a, b) += 1.0;
      if (gamma != 0.0) {
        for (Index b : nxt) lhs(a, b) -= gamma;
      }
    }
  }
}

SeparableValue slice(const VectorXd& w, const std::vector<Index>& offsets) {
  SeparableValue out;
  out.tables.reserve(offsets.size() - 1);
  for (std::size_t i = 0; i + 1 < offsets.size(); ++i) {
    out.tables.emplace_back(w.segment(offsets[i], offsets[i + 1] - offsets[i]));
  }
  return out;
}

// One-hot blocks each sum to the constant feature, so d − 1 directions are
// always null.
Index effective_dim(const std::vector<Index>& offsets) {
  return offsets.back() - static_cast<Index>(offsets.size() - 2);
}

VectorXd solve_separable(const TransitionDataset& data, const std::vector<Index>& offsets,
                         double gamma, const char* who) {
  MatrixXd lhs;
  VectorXd rhs;
  accumulate_lstd(data, offsets, gamma, lhs, rhs);
  const MinNormSolution sol = min_norm_solve(lhs, rhs);
  const Index needed = effective_dim(offsets);
  if (sol.rank < needed) {
    throw RankDeficientError(std::string(who) + ": one-hot system is rank deficient", sol.rank,
                             needed);
  }
  return sol.x.col(0);
}

void require_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma must lie in (0, 1)");
}

// Row-normalized transition counts; rows of unseen states become uniform.
MatrixXd empirical_kernel(const Eigen::Ref<const Eigen::RowVectorXi>& from,
                          const Eigen::Ref<const Eigen::RowVectorXi>& to, int states,
                          std::vector<bool>& visited) {
  MatrixXd counts = MatrixXd::Zero(states, states);
  for (Index t = 0; t < from.size(); ++t) counts(from(t), to(t)) += 1.0;
  visited.assign(static_cast<std::size_t>(states), false);
  for (Index s = 0; s < states; ++s) {
    const double total = counts.row(s).sum();
    if (total > 0.0) {
      counts.row(s) /= total;
      visited[static_cast<std::size_t>(s)] = true;
    } else {
      counts.row(s).setConstant(1.0 / states);
    }
  }
  return counts;
}

}  // namespace

SeparableValue fit_separable_reward(const TransitionDataset& data, std::span<const int> sizes) {
  const std::vector<Index> offsets = block_offsets(data, sizes);
  // With γ = 0 the LSTD system is the normal equation of the reward
  // regression; its minimum-norm solution is the minimum-norm regression.
  MatrixXd gram;
  VectorXd rhs;
  accumulate_lstd(data, offsets, 0.0, gram, rhs);
  return slice(min_norm_solve(gram, rhs).x.col(0), offsets);
}

ValueEstimate lstd_separable(const TransitionDataset& data, std::span<const int> sizes,
                             double gamma) {
  require_gamma(gamma);
  const std::vector<Index> offsets = block_offsets(data, sizes);
  const Index needed = effective_dim(offsets);
  if (data.size() < needed) {
    throw RankDeficientError("lstd_separable: fewer transitions than the separable dimension",
                             data.size(), needed);
  }
  const VectorXd w = solve_separable(data, offsets, gamma, "lstd_separable");
  const VectorXd w0 = solve_separable(data, offsets, 0.0, "lstd_separable");
  return ValueEstimate{slice(w - w0, offsets), "lstd-separable", data.size()};
}

ValueEstimate mb_decoupled(const TransitionDataset& data, std::span<const int> sizes,
                           double gamma) {
  require_gamma(gamma);
  const std::vector<Index> offsets = block_offsets(data, sizes);
  const SeparableValue reward = fit_separable_reward(data, sizes);
  const MatrixXi& s = data.tabular_states();
  const MatrixXi& sn = data.tabular_next_states();

  SeparableValue value;
  bool imputed = false;
  std::vector<bool> visited;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const Index row = static_cast<Index>(i);
    const MatrixXd p = empirical_kernel(s.row(row), sn.row(row), sizes[i], visited);
    VectorXd r = reward.tables[i];
    for (std::size_t k = 0; k < visited.size(); ++k) {
      if (!visited[k]) {
        r(static_cast<Index>(k)) = 0.0;
        imputed = true;
      }
    }
    value.tables.push_back(exact_value(TabularMRP(p, std::move(r), gamma)));
  }
  ValueEstimate out{std::move(value), "mb-decoupled", data.size()};
  out.imputed_unvisited = imputed;
  return out;
}

ValueEstimate mb_tabular(const TransitionDataset& data, int num_states, double gamma) {
  require_gamma(gamma);
  if (num_states < 1 || static_cast<std::uint64_t>(num_states) > kMaxProductStates) {
    throw ValidationError("mb_tabular: state count must lie in [1, " +
                          std::to_string(kMaxProductStates) + "]");
  }
  if (data.kind() != StateKind::TabularIndex || data.state_dim() != 1) {
    throw ValidationError("mb_tabular: needs single-component tabular states");
  }
  const int sizes[] = {num_states};
  block_offsets(data, sizes);
  const MatrixXi& s = data.tabular_states();
  std::vector<bool> visited;
  const MatrixXd p = empirical_kernel(s.row(0), data.tabular_next_states().row(0), num_states,
                                      visited);
  VectorXd r = VectorXd::Zero(num_states);
  VectorXd counts = VectorXd::Zero(num_states);
  for (Index t = 0; t < data.size(); ++t) {
    r(s(0, t)) += data.rewards()(t);
    counts(s(0, t)) += 1.0;
  }
  bool imputed = false;
  for (Index k = 0; k < num_states; ++k) {
    if (counts(k) > 0.0) {
      r(k) /= counts(k);
    } else {
      imputed = true;
    }
  }
  ValueEstimate out{TabularValue{exact_value(TabularMRP(p, std::move(r), gamma))}, "mb-tabular",
                    data.size()};
  out.imputed_unvisited = imputed;
  return out;
}

}  // namespace valuegap
