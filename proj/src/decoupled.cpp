#include "valuegap/decoupled.hpp"

#include <limits>
#include <string>

#include "valuegap/errors.hpp"
#include "valuegap/linalg.hpp"

namespace valuegap {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

DecoupledMRP::DecoupledMRP(std::vector<TabularMRP> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw ValidationError("DecoupledMRP: needs at least one component");
  const double gamma = components_.front().gamma();
  for (const auto& c : components_) {
    if (c.num_states() < 2) {
      throw ValidationError("DecoupledMRP: every component needs at least two states");
    }
    if (c.gamma() != gamma) throw ValidationError("DecoupledMRP: components disagree on gamma");
  }
}

std::vector<int> DecoupledMRP::sizes() const {
  std::vector<int> out;
  out.reserve(components_.size());
  for (const auto& c : components_) out.push_back(static_cast<int>(c.num_states()));
  return out;
}

DecoupledMRP DecoupledMRP::prefix(Index k) const {
  if (k < 1 || k > num_components()) throw ValidationError("DecoupledMRP::prefix: bad length");
  return DecoupledMRP(std::vector<TabularMRP>(components_.begin(), components_.begin() + k));
}

double SeparableValue::evaluate(std::span<const int> components) const {
  if (components.size() != tables.size()) {
    throw ValidationError("SeparableValue: state has the wrong number of components");
  }
  double v = 0.0;
  for (std::size_t i = 0; i < tables.size(); ++i) v += tables[i](components[i]);
  return v;
}

double SeparableValue::evaluate(const Eigen::Ref<const Eigen::VectorXi>& components) const {
  if (static_cast<std::size_t>(components.size()) != tables.size()) {
    throw ValidationError("SeparableValue: state has the wrong number of components");
  }
  double v = 0.0;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    v += tables[i](components(static_cast<Index>(i)));
  }
  return v;
}

SeparableValue SeparableValue::operator-(const SeparableValue& other) const {
  if (tables.size() != other.tables.size()) {
    throw ValidationError("SeparableValue: component count mismatch");
  }
  SeparableValue out;
  out.tables.reserve(tables.size());
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (tables[i].size() != other.tables[i].size()) {
      throw ValidationError("SeparableValue: table size mismatch");
    }
    out.tables.push_back(tables[i] - other.tables[i]);
  }
  return out;
}

std::uint64_t joint_size(std::span<const int> sizes) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 1;
  for (int n : sizes) {
    const auto un = static_cast<std::uint64_t>(n);
    if (un != 0 && total > kMax / un) return kMax;
    total *= un;
  }
  return total;
}

Index joint_index(std::span<const int> sizes, std::span<const int> components) {
  if (sizes.size() != components.size()) throw ValidationError("joint_index: length mismatch");
  Index index = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (components[i] < 0 || components[i] >= sizes[i]) {
      throw ValidationError("joint_index: component state out of range");
    }
    index = index * sizes[i] + components[i];
  }
  return index;
}

std::vector<int> joint_components(std::span<const int> sizes, Index index) {
  std::vector<int> out(sizes.size());
  for (std::size_t k = sizes.size(); k-- > 0;) {
    out[k] = static_cast<int>(index % sizes[k]);
    index /= sizes[k];
  }
  if (index != 0) throw ValidationError("joint_components: index out of range");
  return out;
}

TabularMRP product_mrp(const DecoupledMRP& dmrp) {
  const std::vector<int> sizes = dmrp.sizes();
  const std::uint64_t total = joint_size(sizes);
  if (total > kMaxProductStates) {
    throw ValidationError("product_mrp: joint space of " + std::to_string(total) +
                          " states exceeds the limit of " + std::to_string(kMaxProductStates));
  }
  if (dmrp.num_components() == 1) return dmrp.component(0);
  // Kronecker products in component order keep component 0 most significant.
  MatrixXd p = dmrp.component(0).transition();
  VectorXd r = dmrp.component(0).reward();
  for (Index i = 1; i < dmrp.num_components(); ++i) {
    const TabularMRP& c = dmrp.component(i);
    p = kron(p, c.transition());
    VectorXd joint(r.size() * c.num_states());
    for (Index a = 0; a < r.size(); ++a) {
      joint.segment(a * c.num_states(), c.num_states()) =
          VectorXd::Constant(c.num_states(), r(a)) + c.reward();
    }
    r = std::move(joint);
  }
  // Renormalize away rounding from the repeated products.
  for (Index i = 0; i < p.rows(); ++i) p.row(i) /= p.row(i).sum();
  return TabularMRP(std::move(p), std::move(r), dmrp.gamma());
}

SeparableValue separable_value(const DecoupledMRP& dmrp) {
  SeparableValue out;
  out.tables.reserve(static_cast<std::size_t>(dmrp.num_components()));
  for (const auto& c : dmrp.components()) out.tables.push_back(exact_value(c));
  return out;
}

VectorXd expand_separable(const SeparableValue& value) {
  std::vector<int> sizes;
  for (const auto& t : value.tables) sizes.push_back(static_cast<int>(t.size()));
  const std::uint64_t total = joint_size(sizes);
  if (total > kMaxProductStates) throw ValidationError("expand_separable: joint space too large");
  VectorXd out(static_cast<Index>(total));
  for (Index j = 0; j < out.size(); ++j) out(j) = value.evaluate(joint_components(sizes, j));
  return out;
}

VectorXd reward_from_value(const MatrixXd& p, const VectorXd& v, double gamma) {
  if (p.rows() != p.cols() || p.rows() != v.size()) {
    throw ValidationError("reward_from_value: dimension mismatch");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw ValidationError("reward_from_value: gamma must lie strictly inside (0, 1)");
  }
  const Index s = p.rows();
  const MatrixXd lhs = gamma * p;
  const VectorXd rhs = (MatrixXd::Identity(s, s) - gamma * p) * v;
  VectorXd r;
  Eigen::FullPivLU<MatrixXd> lu(lhs);
  if (lu.isInvertible()) {
    r = lu.solve(rhs);
  } else {
    r = min_norm_solve(lhs, rhs).x;
  }
  const VectorXd round_trip = exact_value(TabularMRP(p, r, gamma));
  const double err = (round_trip - v).lpNorm<Eigen::Infinity>();
  if (err > 1e-9 * std::max(1.0, v.lpNorm<Eigen::Infinity>())) {
    throw NumericalError("reward_from_value: value is not realizable under this kernel "
                         "(round-trip error " + std::to_string(err) + ")");
  }
  return r;
}

TransitionDataset simulate_decoupled(const DecoupledMRP& dmrp, Index n, RngSeed seed) {
  if (n < 1) throw ValidationError("simulate_decoupled: n must be at least 1");
  const Index d = dmrp.num_components();
  Rng rng(seed);
  Eigen::VectorXi current(d);
  for (Index i = 0; i < d; ++i) {
    const VectorXd pi = stationary_distribution(dmrp.component(i).transition());
    current(i) = rng.categorical(pi);
  }
  Eigen::MatrixXi states(d, n);
  Eigen::MatrixXi next(d, n);
  VectorXd rewards(n);
  for (Index t = 0; t < n; ++t) {
    states.col(t) = current;
    double mean = 0.0;
    for (Index i = 0; i < d; ++i) mean += dmrp.component(i).reward()(current(i));
    rewards(t) = mean + rng.normal();
    for (Index i = 0; i < d; ++i) {
      current(i) = rng.categorical(dmrp.component(i).transition().row(current(i)));
    }
    next.col(t) = current;
  }
  return TransitionDataset::from_tabular(std::move(states), std::move(rewards), std::move(next));
}

double mse_uniform_separable(const SeparableValue& delta) {
  double mean_sum = 0.0;
  double var_sum = 0.0;
  for (const auto& t : delta.tables) {
    if (t.size() == 0) throw ValidationError("mse_uniform_separable: empty table");
    const double mu = t.mean();
    mean_sum += mu;
    var_sum += (t.array() - mu).square().mean();
  }
  return mean_sum * mean_sum + var_sum;
}

DecoupledMRP random_decoupled_instance(int components, int states_per_component, double gamma,
                                       RngSeed seed) {
  if (components < 1) throw ValidationError("random_decoupled_instance: need d >= 1");
  if (states_per_component < 2) throw ValidationError("random_decoupled_instance: need N >= 2");
  Rng rng(seed);
  const Index n = states_per_component;
  std::vector<TabularMRP> out;
  out.reserve(static_cast<std::size_t>(components));
  for (int c = 0; c < components; ++c) {
    MatrixXd p(n, n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        // uniform() can return exactly 0; keep kernels strictly positive.
        double u = rng.uniform();
        while (u == 0.0) u = rng.uniform();
        p(i, j) = u;
      }
      p.row(i) /= p.row(i).sum();
    }
    VectorXd r(n);
    for (Index i = 0; i < n; ++i) r(i) = rng.uniform();
    out.emplace_back(std::move(p), std::move(r), gamma);
  }
  return DecoupledMRP(std::move(out));
}

}  // namespace valuegap
