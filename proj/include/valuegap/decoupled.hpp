#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "valuegap/dataset.hpp"
#include "valuegap/mrp.hpp"
#include "valuegap/random.hpp"

namespace valuegap {

// Largest joint state space product_mrp will materialize. The product kernel
// is dense, so memory grows with the square of this number.
inline constexpr std::uint64_t kMaxProductStates = 10'000;

// Product of independent component MRPs whose rewards add up.
//
// Joint states use mixed-radix indexing with component 0 as the most
// significant digit: for sizes (N_0, …, N_{d−1}) the joint index of
// (s_0, …, s_{d−1}) is ((s_0·N_1 + s_1)·N_2 + s_2)… .
class DecoupledMRP {
 public:
  // Throws ValidationError when empty, when a component has fewer than two
  // states, or when the components disagree on gamma.
  explicit DecoupledMRP(std::vector<TabularMRP> components);

  Eigen::Index num_components() const { return static_cast<Eigen::Index>(components_.size()); }
  const TabularMRP& component(Eigen::Index i) const { return components_.at(static_cast<std::size_t>(i)); }
  const std::vector<TabularMRP>& components() const { return components_; }
  double gamma() const { return components_.front().gamma(); }
  std::vector<int> sizes() const;

  // First k components, used for nested experiments of growing dimension.
  DecoupledMRP prefix(Eigen::Index k) const;

 private:
  std::vector<TabularMRP> components_;
};

// V(s) = Σ_i tables[i](s_i). Only the joint function is identified: adding
// constants c_i with Σ c_i = 0 to the tables leaves it unchanged.
struct SeparableValue {
  std::vector<Eigen::VectorXd> tables;

  // O(d) evaluation; never touches the product space.
  double evaluate(std::span<const int> components) const;
  double evaluate(const Eigen::Ref<const Eigen::VectorXi>& components) const;

  SeparableValue operator-(const SeparableValue& other) const;
};

// Saturating product of the component sizes.
std::uint64_t joint_size(std::span<const int> sizes);
Eigen::Index joint_index(std::span<const int> sizes, std::span<const int> components);
std::vector<int> joint_components(std::span<const int> sizes, Eigen::Index index);

TabularMRP product_mrp(const DecoupledMRP& dmrp);

SeparableValue separable_value(const DecoupledMRP& dmrp);

// Joint value vector of a separable value over the enumerated product space.
Eigen::VectorXd expand_separable(const SeparableValue& value);

// Reward vector r with exact_value(TabularMRP(p, r, gamma)) == v. Solves
// γ P r = (I − γP) V, falling back to the minimum-norm solution when P is
// singular, and verifies the round trip (1e-9, relative to max(1, ‖v‖_∞)).
// Throws NumericalError when v is not realizable under p.
Eigen::VectorXd reward_from_value(const Eigen::MatrixXd& p, const Eigen::VectorXd& v,
                                  double gamma);

// n triples of the joint process. Component states start from their own
// stationary distributions and evolve independently; the reward of a triple
// is N(Σ_i r_i(s_i), 1).
TransitionDataset simulate_decoupled(const DecoupledMRP& dmrp, Eigen::Index n, RngSeed seed);

// E[(ΔV(s))²] for s uniform on the product space, computed per component:
// (Σ_i μ_i)² + Σ_i v_i with μ_i, v_i the uniform mean and variance of table i.
double mse_uniform_separable(const SeparableValue& delta);

// Components with i.i.d. uniform(0,1) kernel entries (rows normalized) and
// i.i.d. uniform(0,1) mean rewards.
DecoupledMRP random_decoupled_instance(int components, int states_per_component, double gamma,
                                       RngSeed seed);

}  // namespace valuegap
